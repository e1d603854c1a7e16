"""Parameter sweeps of ``log K / ||phi||_cr`` and the limit verdicts.

Rows are :class:`RatioSample` records; :func:`write_csv` fixes the column
order and the float format (``repr``, the shortest round-trip decimal) so
runs are byte-reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from scipy import optimize

from .crossratio_norm import (
    NormConfig,
    estimate_norm,
    reference_lower_bound_power,
    silver_slope,
)
from .earthquake_family import (
    EarthquakeParams,
    lambda_k,
    log_max_dilatation_earthquake,
)
from .errors import BisectionFailure, DomainError
from .parallel import ordered_map
from .power_family import log_max_dilatation_power_alpha, power_boundary_map

CSV_HEADER = ("family", "param_kind", "param", "log_K", "cr_norm", "cr_norm_kind", "ratio")

SMALL_K_GRID = (0.1, 0.05, 0.02, 0.01)
LARGE_EPS_GRID = (1e-4, 1e-6, 1e-8, 1e-10)
NEAR_ONE_ALPHA_GRID = (1.1, 1.01, 1.001)
LARGE_ALPHA_GRID = (10.0, 1e2, 1e3, 1e4)
BAND_K_GRID = (0.02, 0.05, 0.1, 0.15)
STREBEL_GRID = (10.0, 20.0, 40.0)

TWO_OVER_PI = 2.0 / math.pi
HALF_SQRT2 = 0.5 * math.sqrt(2.0)
POWER_NEAR_ONE = 2.0 / silver_slope()  # 0.80228...


@dataclass(frozen=True)
class RatioSample:
    family: str
    param_kind: str
    param: float
    log_K: float
    cr_norm: float
    cr_norm_kind: str
    ratio: float

    def __post_init__(self) -> None:
        if self.cr_norm_kind not in ("exact", "lower_bound", "estimated"):
            raise ValueError(f"unknown norm kind {self.cr_norm_kind!r}")

    @classmethod
    def build(cls, family, param_kind, param, log_K, cr_norm, kind) -> "RatioSample":
        return cls(family, param_kind, float(param), float(log_K), float(cr_norm), kind, log_K / cr_norm)

    def csv_row(self) -> list[str]:
        return [self.family, self.param_kind, repr(self.param), repr(self.log_K),
                repr(self.cr_norm), self.cr_norm_kind, repr(self.ratio)]


def _earthquake_sample(par: EarthquakeParams, kind: str, value: float) -> RatioSample:
    return RatioSample.build("earthquake", kind, value, log_max_dilatation_earthquake(par), lambda_k(par), "exact")


def ratio_curve_earthquake(
    k: Iterable[float] | None = None,
    eps: Iterable[float] | None = None,
    threads: int | None = None,
) -> list[RatioSample]:
    """One row per ``k`` (or per ``eps = 1 - k^2``); ``k = 0`` is skipped."""
    if (k is None) == (eps is None):
        raise DomainError("give exactly one of k or eps")
    if k is not None:
        items = [("k", float(x), EarthquakeParams(float(x))) for x in k if x != 0.0]
    else:
        items = [("eps", float(x), EarthquakeParams.from_eps(float(x))) for x in eps]
    return ordered_map(lambda it: _earthquake_sample(it[2], it[0], it[1]), items, threads)


def ratio_curve_power(
    alphas: Iterable[float],
    estimated: bool = False,
    norm_cfg: NormConfig | None = None,
    threads: int | None = None,
) -> list[RatioSample]:
    """Rows against the closed-form lower bound, so each ratio is an upper bound.

    With ``estimated=True`` every ``alpha`` gets a second row whose norm is
    the numerical estimate. ``alpha = 1`` is skipped.
    """
    alphas = [float(a) for a in alphas if a != 1.0]
    for a in alphas:
        if a < 1.0:
            raise DomainError(f"power sweep needs alpha > 1, got {a}")

    def rows(a: float) -> list[RatioSample]:
        log_k = log_max_dilatation_power_alpha(a)
        out = [RatioSample.build("power", "alpha", a, log_k, reference_lower_bound_power(a), "lower_bound")]
        if estimated:
            est = estimate_norm(power_boundary_map(a), norm_cfg or NormConfig(threads=1))
            out.append(RatioSample.build("power", "alpha", a, log_k, est.value, "estimated"))
        return out

    # the estimator parallelizes internally when run on its own
    per = ordered_map(rows, alphas, 1 if estimated else threads)
    return [r for group in per for r in group]


# --------------------------------------------------------------------------
# Limits
# --------------------------------------------------------------------------


@dataclass
class LimitCheck:
    """``pass`` iff the error at ``check_param`` is within tolerance and the
    errors never increase along the sequence."""

    name: str
    target: float
    tolerance: float
    samples: list[RatioSample]
    check_index: int = -1
    mode: str = "abs"  # "abs": |ratio - target|; "upper": ratio itself
    errors: list[float] = field(init=False)
    final_error: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.mode == "abs":
            self.errors = [abs(s.ratio - self.target) for s in self.samples]
        else:
            self.errors = [s.ratio - self.target for s in self.samples]
        self.final_error = self.errors[self.check_index]
        monotone = all(b <= a for a, b in zip(self.errors, self.errors[1:]))
        self.passed = bool(self.final_error <= self.tolerance and monotone)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "target": self.target,
            "tolerance": self.tolerance,
            "samples": [asdict(s) for s in self.samples],
            "final_error": self.final_error,
            "pass": self.passed,
        }


@dataclass
class BandCheck:
    name: str
    lower: float
    upper: float
    samples: list[RatioSample]
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        self.passed = bool(self.samples) and all(self.lower <= s.ratio <= self.upper for s in self.samples)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lower": self.lower,
            "upper": self.upper if math.isfinite(self.upper) else None,
            "samples": [asdict(s) for s in self.samples],
            "pass": self.passed,
        }


@dataclass(frozen=True)
class StrebelRow:
    lam: float
    eps: float
    log_K_minlag: float
    log_K_extremal_scale: float
    gap: float


@dataclass
class StrebelCheck:
    rows: list[StrebelRow]
    slope_margin: float = 0.05
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        lin = all(r.log_K_minlag >= (HALF_SQRT2 - self.slope_margin) * r.lam for r in self.rows)
        gaps = [r.gap for r in self.rows]
        self.passed = bool(lin and all(g > 0 for g in gaps) and all(b > a for a, b in zip(gaps, gaps[1:])))

    def to_dict(self) -> dict:
        return {"name": "strebel_gap", "rows": [asdict(r) for r in self.rows], "pass": self.passed}


@dataclass
class LimitReport:
    limits: list[LimitCheck]
    corollaries: list

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.limits) and all(c.passed for c in self.corollaries)

    def to_dict(self) -> dict:
        return {
            "limits": [c.to_dict() for c in self.limits],
            "corollaries": [c.to_dict() for c in self.corollaries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def limit_small_norm_earthquake(grid: Sequence[float] = SMALL_K_GRID) -> LimitCheck:
    return LimitCheck("earthquake_small_norm", TWO_OVER_PI, 1e-3, ratio_curve_earthquake(k=grid))


def limit_large_norm_earthquake(grid: Sequence[float] = LARGE_EPS_GRID) -> LimitCheck:
    return LimitCheck("earthquake_large_norm", HALF_SQRT2, 1e-2, ratio_curve_earthquake(eps=grid))


def limit_power_near_one(grid: Sequence[float] = NEAR_ONE_ALPHA_GRID) -> LimitCheck:
    return LimitCheck("power_near_identity", POWER_NEAR_ONE, 1e-2, ratio_curve_power(grid))


def limit_power_large(grid: Sequence[float] = LARGE_ALPHA_GRID) -> LimitCheck:
    # the tolerance is applied at alpha = 1e3, the rest must keep decreasing
    idx = list(grid).index(1e3) if 1e3 in grid else -1
    return LimitCheck("power_large_norm", 0.0, 0.02, ratio_curve_power(grid), check_index=idx, mode="upper")


def band_small_norm(grid: Sequence[float] = BAND_K_GRID, max_norm: float = 0.1) -> BandCheck:
    rows = [r for r in ratio_curve_earthquake(k=grid) if r.cr_norm <= max_norm]
    return BandCheck("small_norm_band", 0.5 - 1e-3, TWO_OVER_PI + 1e-3, rows)


def band_large_norm(grid: Sequence[float] = (1e-10,)) -> BandCheck:
    return BandCheck("large_norm_band", HALF_SQRT2 - 1e-2, math.inf, ratio_curve_earthquake(eps=grid))


def eps_for_weight(lam: float, log_lo: float = -40.0, log_hi: float = -1.0, xtol: float = 1e-12) -> float:
    """Invert ``lambda_k = lam`` by bisection in ``log(eps)``."""
    if not lam > 0.0:
        raise DomainError(f"earthquake weight must be positive, got {lam}")

    def excess(x: float) -> float:
        return lambda_k(EarthquakeParams.from_eps(math.exp(x))) - lam

    lo_val, hi_val = excess(log_lo), excess(log_hi)
    if not (lo_val > 0.0 > hi_val):
        raise BisectionFailure(
            f"weight {lam} not bracketed by log(eps) in [{log_lo}, {log_hi}]"
        )
    return math.exp(optimize.bisect(excess, log_lo, log_hi, xtol=xtol, maxiter=200))


def strebel_gap(lams: Sequence[float] = STREBEL_GRID, threads: int | None = None) -> list[StrebelRow]:
    """Minimal Lagrangian dilatation versus the ``2 log(lam)`` growth of the extremal one."""
    for lam in lams:
        if not lam >= 10.0:
            raise DomainError(f"strebel_gap needs lam >= 10, got {lam}")

    def row(lam: float) -> StrebelRow:
        eps = eps_for_weight(lam)
        log_k = log_max_dilatation_earthquake(EarthquakeParams.from_eps(eps))
        ext = 2.0 * math.log(lam)
        return StrebelRow(float(lam), eps, log_k, ext, log_k - ext)

    return ordered_map(row, list(lams), threads)


def limit_report() -> LimitReport:
    limits = [
        limit_small_norm_earthquake(),
        limit_large_norm_earthquake(),
        limit_power_near_one(),
        limit_power_large(),
    ]
    corollaries = [band_small_norm(), band_large_norm(), StrebelCheck(strebel_gap())]
    return LimitReport(limits, corollaries)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def write_csv(rows: Iterable[RatioSample], stream=None) -> str:
    """Write the fixed-header CSV; returns the text when no stream is given."""
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue() if stream is None else ""


def samples_to_json(rows: Iterable[RatioSample]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"


def strebel_to_csv(rows: Iterable[StrebelRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("lambda", "eps", "log_K_minlag", "log_K_extremal_scale", "gap"))
    for r in rows:
        w.writerow([repr(r.lam), repr(r.eps), repr(r.log_K_minlag), repr(r.log_K_extremal_scale), repr(r.gap)])
    return buf.getvalue()
