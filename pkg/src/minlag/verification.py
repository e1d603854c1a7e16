"""Numerical verification suites shared by the CLI and the test-suite.

Each suite returns a :class:`SuiteResult` made of named :class:`Check`
records; a check compares one measured error against its tolerance.
Random samples come from fixed seeds so reports are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import earthquake_family as eq
from . import power_family as pw
from .geometry import (
    HALF_PI,
    band_christoffel_array,
    band_metric,
    band_to_uhp_xy,
    fd_gaussian_curvature,
    fermi_christoffel_array,
    fermi_metric,
    fermi_to_uhp_xy,
    uhp_metric,
)
from .qc_analysis import (
    BAND_GRID,
    FERMI_GRID,
    _metric_matrix,
    codazzi_residual_numeric,
    max_dilatation_numeric,
    pullback_metric_array,
)
from .special_functions import adaptive_quad, elliptic_E, elliptic_K, elliptic_K_from_eps

SUITES = ("ode", "codazzi", "curvature", "elliptic", "pullback", "dilatation")
SEED = 20240917


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)

    def line(self) -> str:
        flag, op = ("PASS", "<=") if self.passed else ("FAIL", ">")
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{flag}  {self.name}: error {self.error:.3e} {op} {self.tolerance:.1e}{extra}"


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "pass": self.passed,
            "checks": [
                {"name": c.name, "error": c.error, "tolerance": c.tolerance, "pass": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


def _rng(offset: int = 0) -> np.random.Generator:
    return np.random.default_rng(SEED + offset)


def random_k_u(n: int = 100, offset: int = 0):
    rng = _rng(offset)
    k = rng.uniform(0.05, 0.95, n)
    u = rng.uniform(-HALF_PI + 0.05, HALF_PI - 0.05, n)
    return k, u


def random_a_s(n: int = 100, offset: int = 1):
    rng = _rng(offset)
    return rng.uniform(0.0, 10.0, n), rng.uniform(-5.0, 5.0, n)


# --------------------------------------------------------------------------
# Suites
# --------------------------------------------------------------------------


def suite_ode(n: int = 100) -> SuiteResult:
    res = SuiteResult("ode")
    k, u = random_k_u(n)
    worst = max(
        abs(eq.codazzi_residual_closed(eq.h_prime(ki, ui), eq.h_second(ki, ui), ui))
        for ki, ui in zip(k, u)
    )
    res.checks.append(Check("earthquake Codazzi ODE residual", worst, 1e-9, f"{n} random (k, u)"))

    step = 1e-5
    fd = max(
        abs((eq.h_prime(ki, ui + step) - eq.h_prime(ki, ui - step)) / (2 * step) - eq.h_second(ki, ui))
        / (1.0 + abs(eq.h_second(ki, ui)))
        for ki, ui in zip(k, u)
    )
    res.checks.append(Check("h'' against central differences of h'", fd, 1e-6))

    a, s = random_a_s(n)
    worst = max(
        abs(pw.ode_residual_power(lambda x: pw.g_profile(ai, x), lambda x: pw.g_profile_derivative(ai, x), si))
        for ai, si in zip(a, s)
    )
    res.checks.append(Check("power determinant ODE residual", worst, 1e-9, f"{n} random (a, s)"))
    return res


def codazzi_orders(b_field, christoffels, p, steps=(0.04, 0.02, 0.01, 0.005)) -> list[float]:
    r = [float(np.linalg.norm(codazzi_residual_numeric(b_field, christoffels, p, h))) for h in steps]
    return [math.log2(r[i] / r[i + 1]) for i in range(len(r) - 1)]


def earthquake_b_field(k):
    return lambda u, v: eq.b_tensor_earthquake(k, u).matrix


def power_b_field(a):
    # diagonal, so the coordinate and orthonormal matrices agree
    return lambda s, t: pw.b_tensor_power(a, s).matrix


def suite_codazzi() -> SuiteResult:
    res = SuiteResult("codazzi")
    for k, p in ((0.5, (0.3, 0.2)), (0.9, (-0.6, 1.0))):
        order = codazzi_orders(earthquake_b_field(k), band_christoffel_array, p)[-1]
        res.checks.append(Check(f"earthquake k={k} residual order", abs(order - 2.0), 0.2, f"order {order:.4f}"))
    for a, p in ((2.0, (0.7, 0.1)), (8.0, (-1.2, 0.5))):
        order = codazzi_orders(power_b_field(a), fermi_christoffel_array, p)[-1]
        res.checks.append(Check(f"power a={a} residual order", abs(order - 2.0), 0.2, f"order {order:.4f}"))
    return res


def power_curvature_errors(n: int = 20, offset: int = 2) -> list[float]:
    rng = _rng(offset)
    out = []
    for a, s, t in zip(rng.uniform(0.1, 10.0, n), rng.uniform(-3.0, 3.0, n), rng.uniform(-2.0, 2.0, n)):
        curv = fd_gaussian_curvature(lambda x, y, a=a: pw.domain_metric_power(a, x), (s, t))
        out.append(abs(curv + 1.0))
    return out


def suite_curvature() -> SuiteResult:
    res = SuiteResult("curvature")
    res.checks.append(Check("domain metric curvature = -1", max(power_curvature_errors()), 1e-4, "20 random (a, s, t)"))
    fermi = fd_gaussian_curvature(lambda s, t: (1.0, math.cosh(s) ** 2), (0.4, -0.3))
    res.checks.append(Check("Fermi metric curvature = -1", abs(fermi + 1.0), 1e-6))
    flat = fd_gaussian_curvature(lambda s, t: (1.0, 1.0), (0.4, -0.3))
    res.checks.append(Check("flat metric curvature = 0", abs(flat), 1e-8))
    return res


def log_asymptotic_error(eps: float = 1e-8) -> float:
    return abs(elliptic_K_from_eps(eps) - (math.log(4.0) + -0.5 * math.log(eps)))


def agm_vs_quadrature_error() -> float:
    worst = 0.0
    for k in np.arange(1, 10) / 10.0:
        quad = adaptive_quad(lambda th, k=k: 1.0 / np.sqrt(1.0 - (k * np.sin(th)) ** 2), 0.0, HALF_PI)
        worst = max(worst, abs(elliptic_K(float(k)) - quad))
    return worst


def suite_elliptic() -> SuiteResult:
    res = SuiteResult("elliptic")
    res.checks.append(Check("K(0) = pi/2", abs(elliptic_K(0.0) - HALF_PI), 1e-15))
    res.checks.append(Check("E(0) = pi/2", abs(elliptic_E(0.0) - HALF_PI), 1e-15))
    res.checks.append(Check("E(1) = 1", abs(elliptic_E(1.0) - 1.0), 1e-15))
    res.checks.append(Check("AGM against quadrature, k = 0.1..0.9", agm_vs_quadrature_error(), 1e-9))
    res.checks.append(Check("K near k = 1 against log 4 - log(eps)/2, eps = 1e-8", log_asymptotic_error(), 2e-8))
    r = 1.0 / math.sqrt(2.0)
    res.checks.append(Check("2 E/K - 1 at k = 1/sqrt2", abs(2.0 * elliptic_E(r) / elliptic_K(r) - 1.0 - 0.457), 1e-3))
    return res


def earthquake_pullback_error(k: float, pts) -> float:
    f = eq.f_k_map(k)
    worst = 0.0
    for u, v in pts:
        got = pullback_metric_array(f, band_metric, u, v)
        hp = eq.h_prime(k, u)
        want = np.array([[1.0 + hp * hp, hp], [hp, 1.0]]) / math.cos(u) ** 2
        worst = max(worst, float(np.max(np.abs(got - want))))
    return worst


def power_pullback_error(a: float, pts) -> float:
    f = pw.g_a_map(a)
    worst = 0.0
    for s, t in pts:
        got = pullback_metric_array(f, fermi_metric, s, t)
        e, g = pw.domain_metric_power(a, s)
        want = np.diag([e, g])
        worst = max(worst, float(np.max(np.abs(got - want) / (1.0 + np.abs(want)))))
    return worst


def chart_isometry_error(chart, chart_metric, pts) -> float:
    worst = 0.0
    for x, y in pts:
        got = pullback_metric_array(chart, uhp_metric, x, y)
        want = _metric_matrix(chart_metric, x, y)
        worst = max(worst, float(np.max(np.abs(got - want) / (1.0 + np.abs(want)))))
    return worst


def suite_pullback(n: int = 50) -> SuiteResult:
    res = SuiteResult("pullback")
    rng = _rng(3)
    band_pts = list(zip(rng.uniform(-1.3, 1.3, n), rng.uniform(-2.0, 2.0, n)))
    fermi_pts = list(zip(rng.uniform(-3.0, 3.0, 4 * n), rng.uniform(-2.0, 2.0, 4 * n)))
    for k in (0.3, 0.7, 0.95):
        res.checks.append(Check(f"earthquake k={k} pullback matrix", earthquake_pullback_error(k, band_pts), 1e-6))
    for a in (0.5, 2.0, 8.0):
        res.checks.append(Check(f"power a={a} pullback = domain metric", power_pullback_error(a, fermi_pts), 1e-8,
                                f"{len(fermi_pts)} points"))
    res.checks.append(Check("band chart is an isometry", chart_isometry_error(band_to_uhp_xy, band_metric, band_pts), 1e-7))
    res.checks.append(Check("Fermi chart is an isometry", chart_isometry_error(fermi_to_uhp_xy, fermi_metric, fermi_pts), 1e-8))
    return res


def suite_dilatation() -> SuiteResult:
    res = SuiteResult("dilatation")
    for k in (0.2, 0.5, 0.8):
        got = max_dilatation_numeric(eq.f_k_map(k), band_metric, band_metric, BAND_GRID)
        res.checks.append(Check(f"earthquake k={k} max dilatation", abs(got.value - eq.max_dilatation_earthquake(k)), 1e-6,
                                f"at u={got.point[0]:.2e}"))
    for a in (0.5, 2.0, 8.0):
        got = max_dilatation_numeric(pw.g_a_map(a), fermi_metric, fermi_metric, FERMI_GRID)
        res.checks.append(Check(f"power a={a} max dilatation", abs(got.value - pw.max_dilatation_power(a)), 1e-6,
                                f"at s={got.point[0]:.2e}"))
    return res


SUITE_FUNCTIONS = {
    "ode": suite_ode,
    "codazzi": suite_codazzi,
    "curvature": suite_curvature,
    "elliptic": suite_elliptic,
    "pullback": suite_pullback,
    "dilatation": suite_dilatation,
}


def run_suite(name: str) -> SuiteResult:
    try:
        return SUITE_FUNCTIONS[name]()
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
