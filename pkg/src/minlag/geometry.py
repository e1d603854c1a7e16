"""Charts of the hyperbolic plane, the boundary circle and cross-ratios.

Three interior charts are used:

* the upper half-plane ``z = x + iy``, metric ``(dx^2 + dy^2) / y^2``;
* the band ``|u| < pi/2``, metric ``(du^2 + dv^2) / cos(u)^2``, mapped to the
  half-plane by ``z = i exp(-i(u + iv))``;
* Fermi coordinates ``(s, t)`` around the geodesic ``{x = 0}``, metric
  ``ds^2 + cosh(s)^2 dt^2``.

Boundary points live on RP^1 and are stored as unit homogeneous pairs, so the
point at infinity is an ordinary value everywhere below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import DegenerateQuadruple, DomainError, NonPositiveMetric

HALF_PI = 0.5 * math.pi
_EPS = np.finfo(float).eps


# --------------------------------------------------------------------------
# Boundary points
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class BoundaryPoint:
    """A point ``p/q`` of RP^1 with ``p^2 + q^2 = 1`` and ``q >= 0``.

    When ``q == 0`` the canonical representative is ``(1, 0)``, the point at
    infinity.
    """

    p: float
    q: float

    def __post_init__(self) -> None:
        p, q = float(self.p), float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise DomainError(f"non-finite homogeneous pair ({p}, {q})")
        r = math.hypot(p, q)
        if r == 0.0:
            raise DomainError("homogeneous pair (0, 0) is not a point of RP^1")
        if abs(r - 1.0) > 4 * _EPS:
            p, q = p / r, q / r
        if q == 0.0:
            p, q = 1.0, 0.0
        elif q < 0.0:
            p, q = -p, -q
        object.__setattr__(self, "p", p + 0.0)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_real(cls, x: float) -> "BoundaryPoint":
        if math.isinf(x):
            return cls(1.0, 0.0)
        return cls(x, 1.0)

    @classmethod
    def infinity(cls) -> "BoundaryPoint":
        return cls(1.0, 0.0)

    @classmethod
    def from_angle(cls, theta: float) -> "BoundaryPoint":
        """Inverse of :attr:`angle` (Cayley transform ``x = tan(theta/2)``)."""
        return cls(math.sin(0.5 * theta), math.cos(0.5 * theta))

    @property
    def x(self) -> float:
        """Affine coordinate; ``math.inf`` for the point at infinity."""
        if self.q == 0.0:
            return math.inf
        return self.p / self.q

    @property
    def angle(self) -> float:
        """Circle angle in ``(-pi, pi]``; infinity sits at ``pi``."""
        return 2.0 * math.atan2(self.p, self.q)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0.0

    def __repr__(self) -> str:
        return f"BoundaryPoint(x={self.x!r})"


def _det(a: BoundaryPoint, b: BoundaryPoint) -> float:
    # homogeneous stand-in for (x_a - x_b)
    return a.p * b.q - b.p * a.q


def circle_gap(a: BoundaryPoint, b: BoundaryPoint) -> float:
    """Counter-clockwise angle from ``a`` to ``b`` on the circle, in [0, 2pi)."""
    return (b.angle - a.angle) % (2.0 * math.pi)


# --------------------------------------------------------------------------
# Interior points
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class UhpPoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not self.y > 0.0:
            raise DomainError(f"upper half-plane point needs y > 0, got {self.y}")

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True, slots=True)
class BandPoint:
    u: float
    v: float

    def __post_init__(self) -> None:
        if not abs(self.u) < HALF_PI:
            raise DomainError(f"band point needs |u| < pi/2, got u={self.u}")

    def __iter__(self) -> Iterator[float]:
        yield self.u
        yield self.v


@dataclass(frozen=True, slots=True)
class BandBoundaryPoint:
    """A point of one of the two boundary lines ``u = side * pi/2``."""

    side: int
    v: float

    def __post_init__(self) -> None:
        if self.side not in (-1, 1):
            raise DomainError(f"side must be -1 or +1, got {self.side}")


@dataclass(frozen=True, slots=True)
class FermiPoint:
    s: float
    t: float

    def __iter__(self) -> Iterator[float]:
        yield self.s
        yield self.t


# --------------------------------------------------------------------------
# Mobius transformations
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Mobius:
    """Element of PSL(2, R) acting by ``x -> (a x + b) / (c x + d)``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        det = self.a * self.d - self.b * self.c
        if not det > 0.0:
            raise DomainError(f"Mobius matrix needs positive determinant, got {det}")
        r = math.sqrt(det)
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, getattr(self, name) / r)

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, distance: float) -> "Mobius":
        """Hyperbolic translation along ``{x = 0}``: ``x -> e^distance x``."""
        h = 0.5 * distance
        return cls(math.exp(h), 0.0, 0.0, math.exp(-h))

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = 1.0) -> "Mobius":
        while True:
            a, b, c, d = rng.normal(scale=scale, size=4)
            if a * d - b * c > 1e-3:
                return cls(a, b, c, d)

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, x: BoundaryPoint) -> BoundaryPoint:
        return apply_mobius(self, x)

    def apply_complex(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)


def apply_mobius(m: Mobius, x: BoundaryPoint) -> BoundaryPoint:
    return BoundaryPoint(m.a * x.p + m.b * x.q, m.c * x.p + m.d * x.q)


# --------------------------------------------------------------------------
# Quadruples and cross-ratio
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Quadruple:
    """Four distinct, positively cyclically ordered points of RP^1."""

    x1: BoundaryPoint
    x2: BoundaryPoint
    x3: BoundaryPoint
    x4: BoundaryPoint

    def __post_init__(self) -> None:
        pts = self.points
        for i in range(4):
            for j in range(i + 1, 4):
                if _det(pts[i], pts[j]) == 0.0:
                    raise DegenerateQuadruple(f"points {i + 1} and {j + 1} coincide")
        g2, g3, g4 = (circle_gap(self.x1, x) for x in pts[1:])
        if not (0.0 < g2 < g3 < g4 < 2.0 * math.pi):
            raise DegenerateQuadruple("points are not positively cyclically ordered")

    @classmethod
    def from_reals(cls, *xs: float) -> "Quadruple":
        return cls(*(BoundaryPoint.from_real(x) for x in xs))

    @property
    def points(self) -> tuple[BoundaryPoint, BoundaryPoint, BoundaryPoint, BoundaryPoint]:
        return (self.x1, self.x2, self.x3, self.x4)

    def map(self, f: Callable[[BoundaryPoint], BoundaryPoint]) -> "Quadruple":
        return Quadruple(*(f(x) for x in self.points))

    def rotated(self) -> "Quadruple":
        """Relabel as ``(x2, x3, x4, x1)``."""
        return Quadruple(self.x2, self.x3, self.x4, self.x1)


def cross_ratio_points(
    x1: BoundaryPoint, x2: BoundaryPoint, x3: BoundaryPoint, x4: BoundaryPoint
) -> float:
    """``(x4-x1)(x3-x2) / ((x2-x1)(x3-x4))`` evaluated homogeneously."""
    den = _det(x2, x1) * _det(x3, x4)
    num = _det(x4, x1) * _det(x3, x2)
    if den == 0.0 or num == 0.0:
        raise DegenerateQuadruple("cross-ratio of a quadruple with repeated points")
    return num / den


def cross_ratio(q: Quadruple) -> float:
    return cross_ratio_points(*q.points)


def complete_symmetric(
    x1: BoundaryPoint, x2: BoundaryPoint, x3: BoundaryPoint
) -> BoundaryPoint:
    """The unique ``x4`` with ``cr(x1, x2, x3, x4) = -1``."""
    if _det(x1, x2) == 0.0 or _det(x2, x3) == 0.0 or _det(x1, x3) == 0.0:
        raise DegenerateQuadruple("complete_symmetric needs three distinct points")
    s13 = x1.p * x3.q + x3.p * x1.q
    num = 2.0 * x1.p * x3.p * x2.q - x2.p * s13
    den = x2.q * s13 - 2.0 * x2.p * x1.q * x3.q
    return BoundaryPoint(num, den)


# --------------------------------------------------------------------------
# Chart maps
# --------------------------------------------------------------------------


def band_to_uhp_xy(u, v):
    """Array form of the band chart: returns ``(x, y)``."""
    ev = np.exp(v)
    return ev * np.sin(u), ev * np.cos(u)


def band_to_uhp(p: BandPoint) -> UhpPoint:
    x, y = band_to_uhp_xy(p.u, p.v)
    return UhpPoint(float(x), float(y))


def band_boundary_to_rp1(side: int, v: float) -> BoundaryPoint:
    """``u = -pi/2`` goes to ``-e^v`` and ``u = +pi/2`` to ``+e^v``."""
    if side not in (-1, 1):
        raise DomainError(f"side must be -1 or +1, got {side}")
    return BoundaryPoint.from_real(side * math.exp(v))


def fermi_to_uhp_xy(s, t):
    et = np.exp(t)
    return et * np.tanh(s), et / np.cosh(s)


def fermi_to_uhp(p: FermiPoint) -> UhpPoint:
    x, y = fermi_to_uhp_xy(p.s, p.t)
    return UhpPoint(float(x), float(y))


# --------------------------------------------------------------------------
# Metrics and connections
# --------------------------------------------------------------------------


def uhp_metric(x, y):
    w = 1.0 / np.asarray(y, dtype=float) ** 2
    return w, np.zeros_like(w), w


def band_metric(u, v):
    w = 1.0 / np.cos(u) ** 2 + 0.0 * np.asarray(v, dtype=float)
    return w, np.zeros_like(w), w


def fermi_metric(s, t):
    g = np.cosh(s) ** 2 + 0.0 * np.asarray(t, dtype=float)
    return np.ones_like(g), np.zeros_like(g), g


def christoffel_band(u: float) -> tuple[float, float, float, float]:
    """``(G^u_uu, G^v_vu, G^u_vv, G^v_uu)`` of the band metric.

    The remaining symbols ``G^u_uv`` and ``G^v_vv`` vanish.
    """
    if not abs(u) < HALF_PI:
        raise DomainError(f"band chart needs |u| < pi/2, got {u}")
    t = math.tan(u)
    return (t, t, -t, 0.0)


def band_christoffel_array(u, v) -> np.ndarray:
    """Full symbol array ``G[m, i, j] = Gamma^m_{ij}`` at a band point."""
    t_uu_u, t_vu_v, t_vv_u, t_uu_v = christoffel_band(float(u))
    gam = np.zeros((2, 2, 2))
    gam[0, 0, 0] = t_uu_u
    gam[1, 0, 1] = gam[1, 1, 0] = t_vu_v
    gam[0, 1, 1] = t_vv_u
    gam[1, 0, 0] = t_uu_v
    return gam


def fermi_christoffel_array(s, t) -> np.ndarray:
    """Symbols of ``ds^2 + cosh(s)^2 dt^2``: ``G^s_tt = -sinh cosh``, ``G^t_st = tanh``."""
    gam = np.zeros((2, 2, 2))
    gam[0, 1, 1] = -math.sinh(s) * math.cosh(s)
    gam[1, 0, 1] = gam[1, 1, 0] = math.tanh(s)
    return gam


def fd_gaussian_curvature(
    metric: Callable[[float, float], tuple[float, float]],
    p,
    h: float = 1e-4,
) -> float:
    """Gaussian curvature of an orthogonal metric ``E dx^2 + G dy^2`` at ``p``.

    Uses

        K = -1/(2W) [ d/dx (G_x / W) + d/dy (E_y / W) ],   W = sqrt(E G),

    with central differences at steps ``h`` and ``h/2`` combined by Richardson
    extrapolation.
    """
    if not h > 0.0:
        raise DomainError("finite-difference step must be positive")
    x0, y0 = (float(c) for c in p)

    def estimate(step: float) -> float:
        vals = {}
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                if i and j:
                    continue
                e, g = metric(x0 + i * step, y0 + j * step)
                e, g = float(e), float(g)
                if not (e > 0.0 and g > 0.0):
                    raise NonPositiveMetric(
                        f"metric not positive at ({x0 + i * step}, {y0 + j * step})"
                    )
                vals[i, j] = (e, g, math.sqrt(e * g))
        e0, g0, w0 = vals[0, 0]
        ep, gp, wp = vals[1, 0]
        em, gm, wm = vals[-1, 0]
        g_x = (gp - gm) / (2 * step)
        g_xx = (gp - 2 * g0 + gm) / step**2
        w_x = (wp - wm) / (2 * step)
        ep, gp, wp = vals[0, 1]
        em, gm, wm = vals[0, -1]
        e_y = (ep - em) / (2 * step)
        e_yy = (ep - 2 * e0 + em) / step**2
        w_y = (wp - wm) / (2 * step)
        bracket = (g_xx * w0 - g_x * w_x) / w0**2 + (e_yy * w0 - e_y * w_y) / w0**2
        return -bracket / (2.0 * w0)

    coarse = estimate(h)
    fine = estimate(0.5 * h)
    return (4.0 * fine - coarse) / 3.0
