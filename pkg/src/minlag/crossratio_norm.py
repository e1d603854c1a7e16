"""Cross-ratio norm of circle maps.

The norm of ``phi`` is the supremum of ``|log|cr(phi(Q))||`` over symmetric
quadruples ``Q`` (those with ``cr(Q) = -1``). Symmetric quadruples form a
three-parameter family: pick ``x1 < x2 < x3`` in cyclic order and complete
with :func:`complete_symmetric`. The optimizer works on circle angles, so the
point at infinity needs no special treatment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .errors import DegenerateQuadruple, DomainError
from .geometry import BoundaryPoint, Quadruple, circle_gap, complete_symmetric, cross_ratio
from .parallel import ordered_map

BoundaryMap = Callable[[BoundaryPoint], BoundaryPoint]

TWO_PI = 2.0 * math.pi
SQRT2 = math.sqrt(2.0)
# log(sqrt(2) + 1); note sinh of it is exactly 1
SILVER_LOG = math.asinh(1.0)
SYMMETRY_TOL = 1e-9
COLLISION_TOL = 1e-13

STANDARD_QUADRUPLE = (-1.0, 0.0, 1.0, math.inf)
DOUBLING_QUADRUPLE = (0.0, 1.0, 2.0, math.inf)
SILVER_QUADRUPLE = (-SQRT2 - 1.0, 1.0 - SQRT2, SQRT2 - 1.0, SQRT2 + 1.0)


def distortion(phi: BoundaryMap, q: Quadruple) -> float:
    """``|log|cr(phi(q))||`` for a symmetric quadruple ``q``.

    Raises
    ------
    DomainError
        If ``q`` is not symmetric to within ``1e-9``.
    DegenerateQuadruple
        If two image points are closer than ``1e-13`` on the circle.
    """
    c = cross_ratio(q)
    if abs(c + 1.0) > SYMMETRY_TOL:
        raise DomainError(f"quadruple is not symmetric: cr = {c!r}")
    img = [phi(x) for x in q.points]
    for a, b in zip(img, img[1:] + img[:1]):
        if circle_gap(a, b) < COLLISION_TOL:
            raise DegenerateQuadruple("image points collide on the circle")
    return abs(math.log(abs(cross_ratio(Quadruple(*img)))))


# --------------------------------------------------------------------------
# Closed-form references
# --------------------------------------------------------------------------


def reference_norm_earthquake(lam: float) -> float:
    """The norm of a simple earthquake equals its weight."""
    if not lam >= 0.0:
        raise DomainError("earthquake weight must be non-negative")
    return float(lam)


def doubling_branch(alpha: float) -> float:
    """``log(2^alpha - 1)``, the distortion of ``(0, 1, 2, inf)`` under the power map."""
    _check_alpha(alpha)
    if alpha > 40.0:
        return alpha * math.log(2.0) + math.log1p(-(2.0 ** -alpha))
    return math.log1p(2.0 * math.expm1((alpha - 1.0) * math.log(2.0)))


def silver_branch(alpha: float) -> float:
    """``2 log((sqrt2+1)^alpha - (sqrt2-1)^alpha) - log 4 = 2 log sinh(alpha L)``, ``L = log(sqrt2+1)``."""
    _check_alpha(alpha)
    x = alpha * SILVER_LOG
    if x > 20.0:
        return 2.0 * (x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x)))
    # sinh(x) - sinh(L) as a product, exact near alpha = 1
    h = 0.5 * (alpha - 1.0) * SILVER_LOG
    return 2.0 * math.log1p(2.0 * math.cosh(0.5 * (alpha + 1.0) * SILVER_LOG) * math.sinh(h))


def reference_lower_bound_power(alpha: float) -> float:
    """The larger of the two quadruple lower bounds for the power map norm."""
    return max(doubling_branch(alpha), silver_branch(alpha))


def silver_slope() -> float:
    """Slope of :func:`silver_branch` at ``alpha = 1``: ``2 sqrt2 L``."""
    return 2.0 * SQRT2 * SILVER_LOG


def _check_alpha(alpha: float) -> None:
    if not alpha >= 1.0:
        raise DomainError(f"power exponent must be >= 1, got {alpha}")


# --------------------------------------------------------------------------
# Estimator
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NormConfig:
    """Optimizer settings. Defaults are the recorded reproducible ones."""

    starts: int = 64
    y_range: float = 4.0
    xatol: float = 1e-10
    fatol: float = 1e-14
    maxiter: int = 1500
    maxfev: int = 2000
    agree_rtol: float = 1e-8
    agree_atol: float = 1e-12
    seeds: tuple = (STANDARD_QUADRUPLE, DOUBLING_QUADRUPLE, SILVER_QUADRUPLE)
    threads: int | None = None

    def __post_init__(self) -> None:
        if self.starts < 0:
            raise DomainError("starts must be >= 0")
        if self.starts + len(self.seeds) < 3:
            raise DomainError("need at least three starts in total")


@dataclass(frozen=True)
class NormEstimate:
    value: float
    argmax: Quadruple
    starts_used: int
    converged: bool


def params_to_quadruple(z: Sequence[float]) -> Quadruple:
    """``(theta1, y1, y2)`` -> symmetric quadruple.

    The three arcs ``x1->x2``, ``x2->x3`` and ``x3->x1`` get the shares
    ``softmax(y1, y2, 0)`` of the full turn, so any real vector is a valid,
    strictly ordered triple.
    """
    theta1, y1, y2 = (float(c) for c in z)
    m = max(y1, y2, 0.0)
    w = np.exp(np.array([y1, y2, 0.0]) - m)
    gaps = TWO_PI * w / w.sum()
    x1 = BoundaryPoint.from_angle(theta1)
    x2 = BoundaryPoint.from_angle(theta1 + gaps[0])
    x3 = BoundaryPoint.from_angle(theta1 + gaps[0] + gaps[1])
    return Quadruple(x1, x2, x3, complete_symmetric(x1, x2, x3))


def quadruple_to_params(q: Quadruple) -> np.ndarray:
    g1 = circle_gap(q.x1, q.x2)
    g2 = circle_gap(q.x2, q.x3)
    g3 = TWO_PI - g1 - g2
    return np.array([q.x1.angle, math.log(g1 / g3), math.log(g2 / g3)])


def _pair_angle(p: float, q: float) -> float:
    return 2.0 * math.atan2(p, q)


def _lean_distortion(phi: BoundaryMap, z) -> float:
    """:func:`distortion` of :func:`params_to_quadruple` without the dataclass checks.

    Used only inside the optimizer loop; the reported value is recomputed
    through the validated path.
    """
    theta1, y1, y2 = z
    m = max(y1, y2, 0.0)
    w1, w2, w3 = math.exp(y1 - m), math.exp(y2 - m), math.exp(-m)
    tot = w1 + w2 + w3
    t2 = theta1 + TWO_PI * w1 / tot
    t3 = t2 + TWO_PI * w2 / tot
    p1, q1 = math.sin(0.5 * theta1), math.cos(0.5 * theta1)
    p2, q2 = math.sin(0.5 * t2), math.cos(0.5 * t2)
    p3, q3 = math.sin(0.5 * t3), math.cos(0.5 * t3)
    s13 = p1 * q3 + p3 * q1
    p4 = 2.0 * p1 * p3 * q2 - p2 * s13
    q4 = q2 * s13 - 2.0 * p2 * q1 * q3
    src = [BoundaryPoint(p, q) for p, q in ((p1, q1), (p2, q2), (p3, q3), (p4, q4))]
    if abs(_raw_cross_ratio(*src) + 1.0) > SYMMETRY_TOL:
        raise DomainError("completion lost accuracy")
    img = [phi(x) for x in src]
    ang = [_pair_angle(x.p, x.q) for x in img]
    for a, b in zip(ang, ang[1:] + ang[:1]):
        if (b - a) % TWO_PI < COLLISION_TOL:
            raise DegenerateQuadruple("image points collide on the circle")
    return abs(math.log(abs(_raw_cross_ratio(*img))))


def _raw_cross_ratio(a, b, c, d) -> float:
    num = (d.p * a.q - a.p * d.q) * (c.p * b.q - b.p * c.q)
    den = (b.p * a.q - a.p * b.q) * (c.p * d.q - d.p * c.q)
    return num / den


def _objective(phi: BoundaryMap):
    def neg(z) -> float:
        try:
            return -_lean_distortion(phi, z)
        except (DegenerateQuadruple, DomainError, OverflowError, ValueError, ZeroDivisionError):
            return math.inf

    return neg


def start_points(cfg: NormConfig) -> list[np.ndarray]:
    """Deterministic seeds followed by unscrambled Halton points."""
    pts = [quadruple_to_params(Quadruple.from_reals(*s)) for s in cfg.seeds]
    if cfg.starts:
        # skip the origin of the sequence, which duplicates a corner
        h = qmc.Halton(d=3, scramble=False).random(cfg.starts + 1)[1:]
        lo = np.array([-math.pi, -cfg.y_range, -cfg.y_range])
        hi = np.array([math.pi, cfg.y_range, cfg.y_range])
        pts += list(qmc.scale(h, lo, hi))
    return pts


def estimate_norm(phi: BoundaryMap, cfg: NormConfig = NormConfig()) -> NormEstimate:
    """Multi-start Nelder-Mead maximization of :func:`distortion`.

    ``converged`` is true when the three best local maxima agree to
    ``agree_rtol``; the best value is returned either way.
    """
    neg = _objective(phi)
    opts = {"xatol": cfg.xatol, "fatol": cfg.fatol, "maxiter": cfg.maxiter, "maxfev": cfg.maxfev}

    def run(z0):
        if not math.isfinite(neg(z0)):
            return math.inf, z0
        res = optimize.minimize(neg, z0, method="Nelder-Mead", options=opts)
        # one restart shakes off a collapsed simplex
        res = optimize.minimize(neg, res.x, method="Nelder-Mead", options=opts)
        return float(res.fun), res.x

    starts = start_points(cfg)
    results = ordered_map(run, starts, cfg.threads)
    order = sorted(range(len(results)), key=lambda i: (results[i][0], i))
    finite = [results[i][0] for i in order if math.isfinite(results[i][0])]
    if not finite:
        raise DegenerateQuadruple("every start produced a degenerate image quadruple")
    best_q = params_to_quadruple(results[order[0]][1])
    value = distortion(phi, best_q)
    top = [-v for v in finite[:3]]
    converged = len(top) == 3 and (top[0] - top[2]) <= cfg.agree_rtol * abs(top[0]) + cfg.agree_atol
    return NormEstimate(value, best_q, len(starts), bool(converged))
