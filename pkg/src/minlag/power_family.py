"""Minimal Lagrangian maps extending power functions.

In Fermi coordinates ``ds^2 + cosh(s)^2 dt^2`` around the geodesic
``{x = 0}`` the operator is ``b_a = diag(1/g_a(s), g_a(s))`` with

    g_a(s) = sqrt(1 + a sech(s)^2),   a >= 0,

and the map itself is the isometry from ``(1/g_a^2) ds^2 + g_a^2 cosh^2 dt^2``
to the hyperbolic metric. Its boundary value is the sign-odd power
``x -> sign(x) |x|^alpha`` with ``alpha = sqrt(1 + a)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .geometry import BoundaryPoint, FermiPoint
from .qc_analysis import Tensor2


@dataclass(frozen=True)
class PowerParams:
    """Parameter ``a >= 0`` with ``alpha = sqrt(1 + a)``."""

    a: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a >= 0.0):
            raise DomainError(f"power parameter a={self.a} must be finite and >= 0")
        object.__setattr__(self, "a", float(self.a))

    @property
    def alpha(self) -> float:
        return math.sqrt(1.0 + self.a)

    @classmethod
    def from_alpha(cls, alpha: float) -> "PowerParams":
        """Build from the boundary exponent.

        Exponents below 1 are replaced by ``1/alpha`` with a warning: the
        inverse map has the same dilatation and cross-ratio norm.
        """
        if not (math.isfinite(alpha) and alpha > 0.0):
            raise DomainError(f"exponent alpha={alpha} must be positive")
        if alpha < 1.0:
            warnings.warn(
                f"alpha={alpha} < 1 handled through the inverse map, alpha -> {1.0 / alpha}",
                stacklevel=2,
            )
            alpha = 1.0 / alpha
        # (alpha - 1)(alpha + 1) keeps a accurate for alpha close to 1
        return cls((alpha - 1.0) * (alpha + 1.0))


def _a(a) -> float:
    return a.a if isinstance(a, PowerParams) else PowerParams(a).a


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _sech2(s):
    # 1/cosh^2 underflows gracefully instead of overflowing cosh first
    e = np.exp(-2.0 * np.abs(np.asarray(s, dtype=float)))
    return 4.0 * e / (1.0 + e) ** 2


def g_profile(a, s):
    """``sqrt(1 + a sech(s)^2)``; always ``>= 1``."""
    return _out(np.sqrt(1.0 + _a(a) * _sech2(s)))


def g_profile_derivative(a, s):
    """``-a sech^2(s) tanh(s) / g_a(s)``."""
    av = _a(a)
    s = np.asarray(s, dtype=float)
    sech2 = _sech2(s)
    return _out(-av * sech2 * np.tanh(s) / np.sqrt(1.0 + av * sech2))


def ode_residual_power(g: Callable, dg: Callable, s: float) -> float:
    """``g'(s) - tanh(s) (1/g(s) - g(s))``; zero exactly on solutions of the determinant ODE."""
    gs = float(g(s))
    if gs == 0.0:
        raise ZeroDivisionError("the determinant ODE is singular where g = 0")
    return float(dg(s)) - math.tanh(s) * (1.0 / gs - gs)


def b_tensor_power(a, s) -> Tensor2:
    """``diag(1/g_a, g_a)``; the frame is orthonormal for the Fermi metric."""
    g = np.asarray(g_profile(a, s), dtype=float)
    mat = np.zeros(g.shape + (2, 2))
    mat[..., 0, 0] = 1.0 / g
    mat[..., 1, 1] = g
    return Tensor2(mat, frame="orthonormal")


def b_tensor_power_coordinate(a, s) -> np.ndarray:
    """Same operator in the coordinate frame ``(d_s, d_t)``; still diagonal."""
    return b_tensor_power(a, s).matrix


def domain_metric_power(a, s):
    """``(1/g_a^2, g_a^2 cosh^2)`` = ``(cosh^2/(cosh^2 + a), cosh^2 + a)``."""
    av = _a(a)
    c2 = np.cosh(np.asarray(s, dtype=float)) ** 2
    return _out(c2 / (c2 + av)), _out(c2 + av)


def domain_metric_power_full(a):
    """``(s, t) -> (E, F, G)`` for use with :mod:`qc_analysis`."""
    av = _a(a)

    def metric(s, t):
        e, g = domain_metric_power(av, s)
        e = np.asarray(e) + 0.0 * np.asarray(t, dtype=float)
        g = np.asarray(g) + 0.0 * np.asarray(t, dtype=float)
        return e, np.zeros_like(e), g

    return metric


def g_a_map(a):
    """Vectorized ``(s, t) -> (arcsinh(sinh(s)/alpha), alpha t)``."""
    alpha = math.sqrt(1.0 + _a(a))

    def f(s, t):
        s = np.asarray(s, dtype=float)
        return np.arcsinh(np.sinh(s) / alpha), alpha * np.asarray(t, dtype=float)

    return f


def g_a_jacobian(a):
    """Analytic Jacobian of :func:`g_a_map`: ``diag(cosh(s) / (alpha cosh(sigma)), alpha)``."""
    av = _a(a)
    alpha = math.sqrt(1.0 + av)

    def jac(s, t):
        s = np.asarray(s, dtype=float)
        # cosh(sigma) = sqrt(1 + sinh^2/alpha^2), so the ratio is 1 / g_a(s)
        d = 1.0 / np.sqrt(1.0 + av * _sech2(s)) + 0.0 * np.asarray(t, dtype=float)
        out = np.zeros(d.shape + (2, 2))
        out[..., 0, 0] = d
        out[..., 1, 1] = alpha
        return out

    return jac


def apply_g_a(a, p: FermiPoint) -> FermiPoint:
    s, t = g_a_map(a)(p.s, p.t)
    return FermiPoint(float(s), float(t))


def boundary_psi(alpha: float, x: BoundaryPoint) -> BoundaryPoint:
    """Sign-odd power ``sign(x) |x|^alpha``, fixing 0 and infinity."""
    if not alpha >= 1.0:
        raise DomainError(f"boundary_psi needs alpha >= 1, got {alpha}")
    p, q = x.p, x.q
    if q == 0.0 or p == 0.0:
        return x
    sign = 1.0 if p > 0.0 else -1.0
    # raise whichever of |p|/q or q/|p| is <= 1, so nothing overflows
    if abs(p) >= q:
        return BoundaryPoint(sign, (q / abs(p)) ** alpha)
    return BoundaryPoint(sign * (abs(p) / q) ** alpha, 1.0)


def power_boundary_map(alpha: float):
    if not alpha >= 1.0:
        raise DomainError(f"boundary_psi needs alpha >= 1, got {alpha}")
    return lambda x: boundary_psi(alpha, x)


def max_dilatation_power(a) -> float:
    return 1.0 + _a(a)


def log_max_dilatation_power_alpha(alpha: float) -> float:
    """``log(1 + a) = 2 log(alpha)``."""
    return 2.0 * math.log(alpha)


def hessian_radial(r: Callable, dr: Callable, ddr: Callable, s: float) -> Tensor2:
    """``Hess(rho) - rho`` for ``rho(s, t) = r(s)`` in the orthonormal Fermi frame."""
    rs = float(r(s))
    return Tensor2(
        np.array([[float(ddr(s)) - rs, 0.0], [0.0, float(dr(s)) * math.tanh(s) - rs]]),
        frame="orthonormal",
    )
