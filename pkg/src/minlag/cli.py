"""``minlag`` command-line interface.

Exit status: 0 on success, 1 when a verification or limit check fails,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import experiments as ex
from .crossratio_norm import NormConfig, estimate_norm, reference_lower_bound_power
from .earthquake_family import EarthquakeParams, earthquake_boundary_map, lambda_k
from .errors import MinlagError
from .power_family import power_boundary_map
from .verification import SUITES, run_suite

log = logging.getLogger("minlag")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    output: str | None = None
    fmt: str = "csv"
    samples: int = 1
    spacing: str = "linear"
    starts: int = 64
    verbose: int = 0


def parse_grid(spec: str, samples: int, spacing: str) -> list[float]:
    """``lo:hi`` with ``samples`` points, a comma list, or a single value."""
    try:
        if ":" in spec:
            lo_s, hi_s = spec.split(":", 1)
            lo, hi = float(lo_s), float(hi_s)
            if samples < 1:
                raise UsageError("--samples must be >= 1")
            if samples == 1:
                return [lo]
            if spacing == "log":
                if lo <= 0.0 or hi <= 0.0:
                    raise UsageError("log spacing needs positive endpoints")
                pts = 10.0 ** np.linspace(math.log10(lo), math.log10(hi), samples)
            else:
                pts = np.linspace(lo, hi, samples)
            vals = [float(x) for x in pts]
            vals[0], vals[-1] = lo, hi
            return vals
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse parameter grid {spec!r}: {exc}") from None


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_text(rows, fmt: str) -> str:
    return ex.samples_to_json(rows) if fmt == "json" else ex.write_csv(rows)


def cmd_earthquake_curve(args) -> int:
    if args.k is not None:
        grid = parse_grid(args.k, args.samples, args.spacing)
        if any(not 0.0 <= x < 1.0 for x in grid):
            raise UsageError("--k values must lie in [0, 1); use --eps near 1")
        rows = ex.ratio_curve_earthquake(k=grid)
    else:
        grid = parse_grid(args.eps, args.samples, args.spacing)
        if any(not 0.0 < x <= 1.0 for x in grid):
            raise UsageError("--eps values must lie in (0, 1]")
        rows = ex.ratio_curve_earthquake(eps=grid)
    _emit(_rows_text(rows, args.format), args.output)
    return 0


def cmd_power_curve(args) -> int:
    grid = parse_grid(args.alpha, args.samples, args.spacing)
    if any(x < 1.0 for x in grid):
        raise UsageError("--alpha values must be >= 1")
    rows = ex.ratio_curve_power(grid, estimated=args.estimate, norm_cfg=NormConfig(starts=args.starts))
    _emit(_rows_text(rows, args.format), args.output)
    return 0


def cmd_norm(args) -> int:
    cfg = NormConfig(starts=args.starts)
    if args.family == "earthquake":
        given = [x is not None for x in (args.lam, args.k, args.eps)]
        if sum(given) != 1:
            raise UsageError("earthquake norm needs exactly one of --lam, --k, --eps")
        if args.lam is not None:
            lam = args.lam
        elif args.k is not None:
            lam = lambda_k(EarthquakeParams(args.k))
        else:
            lam = lambda_k(EarthquakeParams.from_eps(args.eps))
        if lam < 0.0:
            raise UsageError("--lam must be >= 0")
        phi, reference, kind = earthquake_boundary_map(lam), lam, "exact"
    else:
        if args.alpha is None or args.alpha < 1.0:
            raise UsageError("power norm needs --alpha >= 1")
        phi, reference, kind = power_boundary_map(args.alpha), reference_lower_bound_power(args.alpha), "lower_bound"
    est = estimate_norm(phi, cfg)
    record = {
        "family": args.family,
        "value": est.value,
        "reference": reference,
        "reference_kind": kind,
        "argmax": [x.x for x in est.argmax.points],
        "starts_used": est.starts_used,
        "converged": est.converged,
    }
    if args.format == "json":
        text = json.dumps(record, indent=2) + "\n"
    else:
        text = "".join(f"{k}: {v!r}\n" for k, v in record.items())
    _emit(text, args.output)
    return 0


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    results = [run_suite(n) for n in names]
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in results], indent=2) + "\n"
    else:
        text = "".join(f"[{r.name}] {c.line()}\n" for r in results for c in r.checks)
    _emit(text, args.output)
    return 0 if all(r.passed for r in results) else 1


def cmd_limits(args) -> int:
    report = ex.limit_report()
    if args.format == "json":
        text = report.to_json()
    else:
        rows = [s for c in report.limits for s in c.samples]
        text = ex.write_csv(rows)
    _emit(text, args.output)
    for c in report.limits + report.corollaries:
        log.info("%s: %s", getattr(c, "name", "strebel_gap"), "pass" if c.passed else "FAIL")
    return 0 if report.all_pass else 1


def cmd_strebel_gap(args) -> int:
    grid = parse_grid(args.lam, args.samples, args.spacing)
    if any(x < 10.0 for x in grid):
        raise UsageError("--lam values must be >= 10")
    rows = ex.strebel_gap(grid)
    check = ex.StrebelCheck(rows)
    text = json.dumps(check.to_dict(), indent=2) + "\n" if args.format == "json" else ex.strebel_to_csv(rows)
    _emit(text, args.output)
    return 0 if check.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minlag", description="Minimal Lagrangian extension experiments.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json"), default="csv"):
        p.add_argument("--format", choices=formats, default=default, help=f"output format (default {default})")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")

    def sweep(p):
        p.add_argument("--samples", type=int, default=1, help="points in a lo:hi range (default 1)")
        p.add_argument("--spacing", choices=("linear", "log"), default="linear", help="range spacing")

    p = sub.add_parser("earthquake-curve", help="log K / norm along the earthquake family")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", help="k values: lo:hi, a comma list or one value, inside [0, 1)")
    g.add_argument("--eps", help="eps = 1 - k^2 values, for k close to 1")
    sweep(p)
    common(p)
    p.set_defaults(func=cmd_earthquake_curve)

    p = sub.add_parser("power-curve", help="log K / norm bound along the power family")
    p.add_argument("--alpha", required=True, help="exponents: lo:hi, a comma list or one value, >= 1")
    p.add_argument("--estimate", action="store_true", help="add rows with the numerically estimated norm")
    p.add_argument("--starts", type=int, default=64, help="quasi-random optimizer starts (default 64)")
    sweep(p)
    common(p)
    p.set_defaults(func=cmd_power_curve)

    p = sub.add_parser("norm", help="estimate the cross-ratio norm of a boundary map")
    p.add_argument("--family", choices=("earthquake", "power"), required=True, help="family of the boundary map")
    p.add_argument("--lam", type=float, help="earthquake weight")
    p.add_argument("--k", type=float, help="earthquake parameter k (weight computed)")
    p.add_argument("--eps", type=float, help="earthquake parameter eps = 1 - k^2")
    p.add_argument("--alpha", type=float, help="power exponent")
    p.add_argument("--starts", type=int, default=64, help="quasi-random optimizer starts (default 64)")
    common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("verify", help="run a numerical verification suite")
    p.add_argument("--suite", choices=SUITES + ("all",), required=True, help="check suite to run")
    common(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("limits", help="evaluate the limit checks and corollary bands")
    common(p, ("json", "csv"), "json")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("strebel-gap", help="compare with the extremal growth 2 log(lambda)")
    p.add_argument("--lam", default="10,20,40", help="weights >= 10 (default 10,20,40)")
    sweep(p)
    common(p)
    p.set_defaults(func=cmd_strebel_gap)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "starts", 1) < 0:
        parser.error("--starts must be >= 0")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"minlag: error: {exc}", file=sys.stderr)
        return 2
    except MinlagError as exc:
        print(f"minlag: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def run(argv: Sequence[str] | None = None) -> int:
    """Like :func:`main` but returns argparse's exit status instead of raising."""
    try:
        return main(argv)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
