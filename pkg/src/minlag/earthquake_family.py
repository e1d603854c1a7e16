"""Minimal Lagrangian maps extending simple left earthquakes.

In the band chart the maps are vertical shears ``(u, v) -> (u, v + h_k(u))``
with

    h_k'(u) = 2 k^2 cos(u)^2 / sqrt(1 - k^4 cos(u)^4),   h_k(-pi/2) = 0,

and the shear at the right-hand boundary, ``lambda_k = h_k(pi/2)``, is the
weight of the earthquake seen on RP^1.

Everything below evaluates ``1 - k^4 cos^4`` as
``(sin^2 + eps cos^2)(1 + k^2 cos^2)`` with ``eps = 1 - k^2`` carried
explicitly, so parameters with ``eps`` down to ``1e-17`` stay accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import DomainError
from .geometry import HALF_PI, BandBoundaryPoint, BandPoint, BoundaryPoint
from .qc_analysis import Tensor2
from .special_functions import DEFAULT_QUAD, QuadratureConfig, adaptive_quad_breaks

PEAK_SPLIT_EPS = 1e-6
INTERPOLANT_TOL = 1e-9


@dataclass(frozen=True)
class EarthquakeParams:
    """Parameter ``k`` in ``[0, 1)`` together with ``eps = 1 - k^2``.

    Build from ``eps`` with :meth:`from_eps` when ``k`` is close to 1.
    """

    k: float
    eps: float

    def __init__(self, k: float, eps: float | None = None) -> None:
        if eps is None:
            if not 0.0 <= k < 1.0:
                raise DomainError(f"earthquake parameter k={k} outside [0, 1)")
            eps = (1.0 - k) * (1.0 + k)
        object.__setattr__(self, "k", float(k))
        object.__setattr__(self, "eps", float(eps))

    @classmethod
    def from_eps(cls, eps: float) -> "EarthquakeParams":
        if not 0.0 < eps <= 1.0:
            raise DomainError(f"eps={eps} outside (0, 1]")
        return cls(math.sqrt(1.0 - eps), eps)

    @property
    def k2(self) -> float:
        return 1.0 - self.eps if self.eps < 0.5 else self.k * self.k


ParamLike = Union[float, EarthquakeParams]


def as_params(k: ParamLike) -> EarthquakeParams:
    return k if isinstance(k, EarthquakeParams) else EarthquakeParams(k)


def _check_u(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > HALF_PI) or np.any(~np.isfinite(u)):
        raise DomainError("the band coordinate u must satisfy |u| <= pi/2")
    return u


def _profile_parts(par: EarthquakeParams, u: np.ndarray):
    c2 = np.cos(u) ** 2
    s2 = np.sin(u) ** 2
    low = s2 + par.eps * c2  # 1 - k^2 cos^2
    high = 1.0 + par.k2 * c2  # 1 + k^2 cos^2
    return c2, low * high


def h_prime(k: ParamLike, u):
    """Derivative of the shear profile; zero at ``u = +-pi/2``."""
    par = as_params(k)
    u = _check_u(u)
    c2, det = _profile_parts(par, u)
    out = 2.0 * par.k2 * c2 / np.sqrt(det)
    out = np.where(np.abs(u) >= HALF_PI, 0.0, out)
    return float(out) if out.ndim == 0 else out


def h_second(k: ParamLike, u):
    """``-4 k^2 sin(u) cos(u) (1 - k^4 cos^4 u)^(-3/2)``."""
    par = as_params(k)
    u = _check_u(u)
    _, det = _profile_parts(par, u)
    out = -4.0 * par.k2 * np.sin(u) * np.cos(u) / det**1.5
    out = np.where(np.abs(u) >= HALF_PI, 0.0, out)
    return float(out) if out.ndim == 0 else out


def _break_points(par: EarthquakeParams, lo: float, hi: float) -> list[float]:
    pts = [lo, hi]
    if lo < 0.0 < hi:
        pts.append(0.0)
    if par.eps < PEAK_SPLIT_EPS:
        # peak of height eps^(-1/2) and width eps^(1/2) around u = 0
        for w in (par.eps**0.25, math.sqrt(par.eps)):
            pts += [x for x in (-w, w) if lo < x < hi]
    return pts


def h_value(k: ParamLike, u: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``h_k(u) = int_{-pi/2}^u h_k'``."""
    par = as_params(k)
    u = float(_check_u(u))
    if par.k == 0.0 or u == -HALF_PI:
        return 0.0
    return adaptive_quad_breaks(
        lambda x: h_prime(par, x), _break_points(par, -HALF_PI, u), cfg
    )


def lambda_k(k: ParamLike, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Earthquake weight (total shear) ``h_k(pi/2)``."""
    return h_value(k, HALF_PI, cfg)


class ShearProfile:
    """Chebyshev interpolant of ``h_k`` on ``[-pi/2, pi/2]``.

    The derivative ``h_k'`` is interpolated and integrated exactly, so
    ``derivative`` and ``__call__`` are consistent. If no degree up to
    ``max_degree`` meets the error budget the profile falls back to direct
    quadrature (``self.interpolant is None``).
    """

    def __init__(self, k: ParamLike, tol: float = INTERPOLANT_TOL, max_degree: int = 4096):
        self.params = as_params(k)
        self.lam = lambda_k(self.params)
        self.interpolant = None
        self._dinterp = None
        if self.params.k == 0.0:
            return
        deg = 32
        while deg <= max_degree:
            d = C.Chebyshev.interpolate(
                lambda x: h_prime(self.params, np.clip(x, -HALF_PI, HALF_PI)),
                deg,
                domain=[-HALF_PI, HALF_PI],
            )
            h = d.integ(lbnd=-HALF_PI)
            if abs(h(HALF_PI) - self.lam) <= 0.1 * tol and np.max(np.abs(d.coef[-8:])) <= 0.01 * tol:
                self._dinterp, self.interpolant = d, h
                return
            deg *= 2

    def __call__(self, u):
        u = _check_u(u)
        if self.params.k == 0.0:
            return np.zeros_like(u) if u.ndim else 0.0
        if self.interpolant is None:
            vals = np.vectorize(lambda x: h_value(self.params, x))(u)
            return float(vals) if u.ndim == 0 else vals
        out = self.interpolant(u)
        return float(out) if u.ndim == 0 else out

    def derivative(self, u):
        if self._dinterp is None:
            return h_prime(self.params, u)
        u = _check_u(u)
        out = self._dinterp(u)
        return float(out) if u.ndim == 0 else out


@lru_cache(maxsize=64)
def shear_profile(k: ParamLike) -> ShearProfile:
    return ShearProfile(as_params(k))


def f_k_map(k: ParamLike):
    """Vectorized chart map ``(u, v) -> (u, v + h_k(u))`` for grid work."""
    prof = shear_profile(as_params(k))

    def f(u, v):
        u = np.asarray(u, dtype=float)
        return u, np.asarray(v, dtype=float) + prof(u)

    return f


def f_k_jacobian(k: ParamLike):
    """Analytic Jacobian ``[[1, 0], [h', 1]]`` of :func:`f_k_map`."""
    par = as_params(k)

    def jac(u, v):
        hp = np.asarray(h_prime(par, u), dtype=float)
        one = np.ones_like(hp + 0.0 * np.asarray(v, dtype=float))
        return np.stack([np.stack([one, 0.0 * one], -1), np.stack([hp * one, one], -1)], -2)

    return jac


def apply_f_k(k: ParamLike, p: BandPoint | BandBoundaryPoint):
    """Apply the map to an interior band point or a boundary-line point."""
    par = as_params(k)
    if isinstance(p, BandBoundaryPoint):
        if p.side < 0:
            return p
        return BandBoundaryPoint(1, p.v + lambda_k(par))
    return BandPoint(p.u, p.v + h_value(par, p.u))


def boundary_phi(lam: float, x: BoundaryPoint) -> BoundaryPoint:
    """Simple left earthquake: identity on ``x <= 0`` and ``inf``, ``x -> e^lam x`` on ``x > 0``."""
    if lam < 0.0:
        raise DomainError("earthquake weight must be non-negative")
    if x.q > 0.0 and x.p > 0.0:
        # shrink q instead of growing p so large weights cannot overflow
        return BoundaryPoint(x.p, x.q * math.exp(-lam))
    return x


def earthquake_boundary_map(lam: float):
    """``boundary_phi`` with the weight bound, for use as a circle map."""
    if lam < 0.0:
        raise DomainError("earthquake weight must be non-negative")
    return lambda x: boundary_phi(lam, x)


def b_tensor_earthquake(k: ParamLike, u) -> Tensor2:
    """``(4 + h'^2)^(-1/2) [[2 + h'^2, h'], [h', 2]]`` in the ``(d_u, d_v)`` frame."""
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) >= HALF_PI):
        raise DomainError("b is defined in the open band |u| < pi/2")
    hp = np.asarray(h_prime(k, u))
    scale = 1.0 / np.sqrt(4.0 + hp**2)
    mat = np.empty(hp.shape + (2, 2))
    mat[..., 0, 0] = (2.0 + hp**2) * scale
    mat[..., 0, 1] = mat[..., 1, 0] = hp * scale
    mat[..., 1, 1] = 2.0 * scale
    return Tensor2(mat, frame="coordinate")


def codazzi_residual_closed(hp: float, hpp: float, u: float) -> float:
    """``tan(u) + 2 h'' / ((4 + h'^2) h')``; zero exactly when the Codazzi ODE holds."""
    if hp == 0.0:
        raise ZeroDivisionError("the Codazzi ODE is singular where h' = 0")
    return math.tan(u) + 2.0 * hpp / ((4.0 + hp * hp) * hp)


def max_dilatation_earthquake(k: ParamLike) -> float:
    """``(1 + k^2) / (1 - k^2)``, i.e. ``(2 - eps) / eps``."""
    par = as_params(k)
    return (2.0 - par.eps) / par.eps


def log_max_dilatation_earthquake(k: ParamLike) -> float:
    par = as_params(k)
    if par.eps > 0.5:
        k2 = par.k * par.k
        return math.log1p(k2) - math.log1p(-k2)
    return math.log(2.0 - par.eps) - math.log(par.eps)


def eta_plus(k: ParamLike, u):
    """Largest eigenvalue ``(sqrt(4 + h'^2) + h') / 2`` of ``b``."""
    hp = np.asarray(h_prime(k, u))
    out = 0.5 * (np.sqrt(4.0 + hp**2) + hp)
    return float(out) if out.ndim == 0 else out
