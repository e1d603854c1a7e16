"""Complete elliptic integrals and adaptive quadrature.

``K`` and ``E`` come from the arithmetic-geometric mean, which converges
quadratically and needs no quadrature. Near ``k = 1`` callers should pass the
complementary parameter ``eps = 1 - k^2`` (``elliptic_K_from_eps``) because
forming ``1 - k^2`` from ``k`` loses every digit below ``1e-16``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoConvergence

__all__ = [
    "QuadratureConfig",
    "adaptive_quad",
    "agm",
    "elliptic_E",
    "elliptic_E_from_eps",
    "elliptic_K",
    "elliptic_K_from_eps",
]

_AGM_RTOL = 1e-16
_AGM_MAXITER = 64


def _agm_with_sum(a: float, b: float, c: float) -> tuple[float, float]:
    """Return ``(AGM(a, b), sum 2^(n-1) c_n^2)`` where ``c_0 = c = sqrt(a^2 - b^2)``."""
    total = 0.5 * c * c
    weight = 0.5
    for _ in range(_AGM_MAXITER):
        if c <= _AGM_RTOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        # c_{n+1} = c_n^2 / (4 a_{n+1}); the textbook (a_n - b_n)/2 stalls at
        # one ulp while the 2^n weight keeps growing
        c = c * c / (4.0 * a)
        weight *= 2.0
        total += weight * c * c
    return a, total


def agm(a: float, b: float) -> float:
    if a < 0 or b < 0:
        raise DomainError("AGM is defined for non-negative arguments")
    if a == 0.0 or b == 0.0:
        return 0.0
    hi, lo = max(a, b), min(a, b)
    return _agm_with_sum(hi, lo, math.sqrt((hi - lo) * (hi + lo)))[0]


def _check_k(k: float, allow_one: bool) -> None:
    ok = 0.0 <= k <= 1.0 if allow_one else 0.0 <= k < 1.0
    if not ok:
        raise DomainError(f"elliptic modulus k={k} outside the supported range")


def _check_eps(eps: float, allow_zero: bool) -> None:
    ok = 0.0 <= eps <= 1.0 if allow_zero else 0.0 < eps <= 1.0
    if not ok:
        raise DomainError(f"complementary parameter eps={eps} outside (0, 1]")


def elliptic_K_from_eps(eps: float) -> float:
    """K as a function of ``eps = 1 - k^2``."""
    _check_eps(eps, allow_zero=False)
    if eps == 1.0:
        return 0.5 * math.pi
    a, _ = _agm_with_sum(1.0, math.sqrt(eps), math.sqrt(1.0 - eps))
    return 0.5 * math.pi / a


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention."""
    _check_k(k, allow_one=False)
    return elliptic_K_from_eps((1.0 - k) * (1.0 + k))


def elliptic_E_from_eps(eps: float) -> float:
    _check_eps(eps, allow_zero=True)
    if eps == 0.0:
        return 1.0
    if eps == 1.0:
        return 0.5 * math.pi
    a, total = _agm_with_sum(1.0, math.sqrt(eps), math.sqrt(1.0 - eps))
    return 0.5 * math.pi / a * (1.0 - total)


def elliptic_E(k: float) -> float:
    """Complete elliptic integral of the second kind; ``E(1) = 1``."""
    _check_k(k, allow_one=True)
    return elliptic_E_from_eps((1.0 - k) * (1.0 + k))


# --------------------------------------------------------------------------
# Adaptive Gauss-Kronrod (7/15)
# --------------------------------------------------------------------------

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KRONROD_W = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-11
    abs_tol: float = 1e-14
    max_depth: int = 60

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_depth < 10:
            raise DomainError("max_depth must be at least 10")


DEFAULT_QUAD = QuadratureConfig()


def _evaluate(f, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except TypeError:
        pass
    return np.array([float(f(xi)) for xi in x])


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    y = _evaluate(f, c + h * _NODES)
    kron = h * float(_KRONROD_W @ y)
    gauss = h * float(_GAUSS_W @ y)
    return kron, abs(kron - gauss)


def adaptive_quad(f, a: float, b: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Integrate ``f`` over ``[a, b]`` by globally adaptive G7/K15 bisection.

    ``f`` should accept a numpy array of nodes; scalar-only callables are
    evaluated point by point. The interval with the largest error estimate
    is split until the summed estimate is below
    ``max(abs_tol, rel_tol * |I|)``.

    Raises
    ------
    NoConvergence
        If an interval at depth ``cfg.max_depth`` would need splitting.
    """
    if not a < b:
        raise DomainError(f"adaptive_quad needs a < b, got [{a}, {b}]")
    value, err = _gk15(f, a, b)
    # heap entries: (-err, insertion order, a, b, value, err, depth)
    heap = [(-err, 0, a, b, value, err, 0)]
    total, total_err = value, err
    counter = 1
    while total_err > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        _, _, lo, hi, v, e, depth = heapq.heappop(heap)
        if depth >= cfg.max_depth:
            raise NoConvergence(
                f"adaptive_quad reached depth {depth} on [{lo}, {hi}] "
                f"with error estimate {total_err:.3e}"
            )
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1, depth + 1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2, e2, depth + 1))
        counter += 2
    # re-sum to shed the drift of the running updates
    return math.fsum(item[4] for item in heap)


def adaptive_quad_breaks(f, points, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Sum of :func:`adaptive_quad` over consecutive pairs of ``points``."""
    pts = sorted(set(float(p) for p in points))
    return math.fsum(adaptive_quad(f, lo, hi, cfg) for lo, hi in zip(pts, pts[1:]))
