"""Chart-level quasiconformal analysis.

Maps and metrics are plain callables on chart coordinates:

* a map is ``f(x, y) -> (X, Y)``;
* a metric is ``g(x, y) -> (E, F, G)`` for ``E dx^2 + 2F dx dy + G dy^2``.

Both are expected to broadcast over numpy arrays, which is how grids are
evaluated. For a map ``f`` between charts with metrics ``g_src`` and
``g_tgt`` the operator ``b`` solves ``f* g_tgt = g_src(b., b.)``; it is
computed in a ``g_src``-orthonormal frame so its eigenvalues are the
principal stretches ``eta_-`` and ``eta_+`` of ``df``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .errors import NonPositiveMetric

DEFAULT_STEP = 1e-4


@dataclass(frozen=True)
class Metric2:
    """Symmetric positive definite ``[[E, F], [F, G]]`` at one chart point."""

    E: float
    F: float
    G: float

    def __post_init__(self) -> None:
        if not (self.E > 0.0 and self.E * self.G - self.F * self.F > 0.0):
            raise NonPositiveMetric(f"metric ({self.E}, {self.F}, {self.G}) is not positive definite")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.E, self.F], [self.F, self.G]])

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Metric2":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(0.5 * (m[0, 1] + m[1, 0])), float(m[1, 1]))


@dataclass(frozen=True)
class Tensor2:
    """A (1,1)-tensor given by its matrix in a chart frame.

    ``matrix[..., i, j]`` is the ``i``-th component of ``b(e_j)``; leading
    axes, if any, index grid points. ``frame`` is ``"coordinate"`` or
    ``"orthonormal"``.
    """

    matrix: np.ndarray
    frame: str = "coordinate"

    def __post_init__(self) -> None:
        if self.frame not in ("coordinate", "orthonormal"):
            raise ValueError(f"unknown frame tag {self.frame!r}")
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))

    @property
    def det(self):
        m = self.matrix
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]

    @property
    def trace(self):
        return self.matrix[..., 0, 0] + self.matrix[..., 1, 1]

    def eigenvalues(self):
        """``(eta_minus, eta_plus)`` assuming a real spectrum."""
        return _sym_eigs(self.matrix)

    def is_self_adjoint(self, metric: Metric2 | None = None, tol: float = 1e-12) -> bool:
        """Check ``g b = (g b)^T``; orthonormal frames use the identity metric."""
        g = np.eye(2) if metric is None or self.frame == "orthonormal" else metric.matrix
        gb = g @ self.matrix
        return bool(np.all(np.abs(gb - np.swapaxes(gb, -1, -2)) <= tol * (1.0 + np.abs(gb))))


def _as_array(m) -> np.ndarray:
    if isinstance(m, Metric2):
        return m.matrix
    if isinstance(m, Tensor2):
        return m.matrix
    return np.asarray(m, dtype=float)


def _metric_matrix(metric, x, y) -> np.ndarray:
    e, f, g = (np.asarray(c, dtype=float) for c in metric(x, y))
    e, f, g = np.broadcast_arrays(e, f, g)
    return np.stack([np.stack([e, f], -1), np.stack([f, g], -1)], -2)


def _sym_eigs(m: np.ndarray):
    a, b, d = m[..., 0, 0], 0.5 * (m[..., 0, 1] + m[..., 1, 0]), m[..., 1, 1]
    mean = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), b)
    return mean - rad, mean + rad


def spd_sqrt_array(m: np.ndarray) -> np.ndarray:
    """Vectorized ``(M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))``."""
    m = np.asarray(m, dtype=float)
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    tr = m[..., 0, 0] + m[..., 1, 1]
    asym = np.abs(m[..., 0, 1] - m[..., 1, 0])
    if np.any(det <= 0.0) or np.any(tr <= 0.0) or np.any(asym > 1e-10 * (1.0 + np.abs(tr))):
        raise NonPositiveMetric("matrix is not symmetric positive definite")
    sd = np.sqrt(det)
    out = m + sd[..., None, None] * np.eye(2)
    return out / np.sqrt(tr + 2.0 * sd)[..., None, None]


def spd_sqrt_2x2(m) -> Tensor2:
    """The unique SPD square root of a 2x2 SPD matrix (Cayley-Hamilton form)."""
    frame = m.frame if isinstance(m, Tensor2) else "orthonormal"
    return Tensor2(spd_sqrt_array(_as_array(m)), frame=frame)


def _fd_jacobian(f, x, y, h: float) -> np.ndarray:
    def central(step):
        xp, yp = (np.asarray(c, dtype=float) for c in f(x + step, y))
        xm, ym = (np.asarray(c, dtype=float) for c in f(x - step, y))
        xq, yq = (np.asarray(c, dtype=float) for c in f(x, y + step))
        xr, yr = (np.asarray(c, dtype=float) for c in f(x, y - step))
        col1 = np.stack([xp - xm, yp - ym], -1) / (2 * step)
        col2 = np.stack([xq - xr, yq - yr], -1) / (2 * step)
        return np.stack([col1, col2], -1)

    # Richardson over h and h/2 cancels the O(h^2) term
    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def pullback_metric_array(f, target_metric, x, y, step: float = DEFAULT_STEP, jacobian=None) -> np.ndarray:
    """``J^T g_tgt(f(p)) J`` as an array of shape ``(..., 2, 2)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    jac = jacobian(x, y) if jacobian is not None else _fd_jacobian(f, x, y, step)
    fx, fy = f(x, y)
    g = _metric_matrix(target_metric, fx, fy)
    return np.swapaxes(jac, -1, -2) @ g @ jac


def pullback_metric(f, target_metric, p: Sequence[float], step: float = DEFAULT_STEP, jacobian=None) -> Metric2:
    """Pull ``target_metric`` back through ``f`` at the chart point ``p``.

    Raises
    ------
    NonPositiveMetric
        If the finite-difference result is not positive definite, usually a
        sign that ``step`` is too large or ``p`` too close to the chart edge.
    """
    x, y = (float(c) for c in p)
    return Metric2.from_matrix(pullback_metric_array(f, target_metric, x, y, step, jacobian))


def b_orthonormal_array(f, source_metric, target_metric, x, y, step: float = DEFAULT_STEP, jacobian=None) -> np.ndarray:
    """Matrix of ``b`` in a ``source_metric``-orthonormal frame."""
    pull = pullback_metric_array(f, target_metric, x, y, step, jacobian)
    s = spd_sqrt_array(_metric_matrix(source_metric, np.asarray(x, float), np.asarray(y, float)))
    s_inv = np.linalg.inv(s)
    m = s_inv @ pull @ s_inv
    m = 0.5 * (m + np.swapaxes(m, -1, -2))
    return spd_sqrt_array(m)


@dataclass(frozen=True)
class DilatationSample:
    point: tuple[float, float]
    eta_plus: float
    eta_minus: float

    @property
    def K_point(self) -> float:
        return self.eta_plus / self.eta_minus


@dataclass(frozen=True)
class MaxDilatation:
    value: float
    point: tuple[float, float]


def _mesh(grid):
    xs, ys = (np.asarray(g, dtype=float) for g in grid)
    return np.meshgrid(xs, ys, indexing="ij")


def dilatation_arrays(f, source_metric, target_metric, grid, step: float = DEFAULT_STEP, jacobian=None):
    """``(X, Y, eta_minus, eta_plus)`` over the tensor grid ``grid = (xs, ys)``."""
    X, Y = _mesh(grid)
    b = b_orthonormal_array(f, source_metric, target_metric, X, Y, step, jacobian)
    em, ep = _sym_eigs(b)
    return X, Y, em, ep


def dilatation_field(f, source_metric, target_metric, grid, step: float = DEFAULT_STEP, jacobian=None) -> list[DilatationSample]:
    X, Y, em, ep = dilatation_arrays(f, source_metric, target_metric, grid, step, jacobian)
    return [
        DilatationSample((float(x), float(y)), float(a), float(b))
        for x, y, b, a in zip(X.ravel(), Y.ravel(), em.ravel(), ep.ravel())
    ]


def max_dilatation_numeric(
    f,
    source_metric,
    target_metric,
    grid,
    refine_axis: int = 0,
    step: float = DEFAULT_STEP,
    jacobian=None,
) -> MaxDilatation:
    """Maximum of ``eta_+ / eta_-`` over ``grid``, refined along one axis.

    The grid maximum is used to bracket a golden-section search along
    ``refine_axis`` with the other coordinate held fixed. Rows of the grid
    are reduced in index order, so ties resolve deterministically.
    """
    X, Y, em, ep = dilatation_arrays(f, source_metric, target_metric, grid, step, jacobian)
    K = ep / em
    idx = np.unravel_index(int(np.argmax(K)), K.shape)
    best = MaxDilatation(float(K[idx]), (float(X[idx]), float(Y[idx])))
    axis_vals = np.asarray(grid[refine_axis], dtype=float)
    i = idx[refine_axis]
    if 0 < i < len(axis_vals) - 1:
        fixed = best.point[1 - refine_axis]

        def neg_k(c: float) -> float:
            pt = (c, fixed) if refine_axis == 0 else (fixed, c)
            b = b_orthonormal_array(f, source_metric, target_metric, pt[0], pt[1], step, jacobian)
            lo, hi = _sym_eigs(b)
            return -float(hi / lo)

        bracket = (axis_vals[i - 1], axis_vals[i], axis_vals[i + 1])
        c = optimize.golden(neg_k, brack=bracket, tol=1e-10)
        val = -neg_k(c)
        if val > best.value:
            pt = (float(c), fixed) if refine_axis == 0 else (fixed, float(c))
            best = MaxDilatation(val, pt)
    return best


def codazzi_residual_numeric(
    b_field: Callable[[float, float], np.ndarray],
    christoffels: Callable[[float, float], np.ndarray],
    p: Sequence[float],
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """Components of ``(d^nabla b)(d_1, d_2)`` in the coordinate frame.

    ``b_field(x, y)`` returns the coordinate matrix ``B[i, j]`` (component
    ``i`` of ``b(d_j)``) and ``christoffels(x, y)`` the array
    ``G[m, i, j] = Gamma^m_{ij}``. Partial derivatives use plain central
    differences, so an exact Codazzi field has residual ``O(step^2)``.
    """
    x, y = (float(c) for c in p)
    B = np.asarray(b_field(x, y), dtype=float)
    dB1 = (np.asarray(b_field(x + step, y)) - np.asarray(b_field(x - step, y))) / (2 * step)
    dB2 = (np.asarray(b_field(x, y + step)) - np.asarray(b_field(x, y - step))) / (2 * step)
    gam = np.asarray(christoffels(x, y), dtype=float)
    # nabla_1 (b d_2) - nabla_2 (b d_1); [d_1, d_2] = 0
    conn = gam[:, 0, :] @ B[:, 1] - gam[:, 1, :] @ B[:, 0]
    return dB1[:, 1] - dB2[:, 0] + conn


def delta_grid(n: int, lo: float, hi: float) -> np.ndarray:
    return np.linspace(lo, hi, n)


BAND_GRID = (delta_grid(129, -np.pi / 2 + 0.05, np.pi / 2 - 0.05), delta_grid(129, -3.0, 3.0))
FERMI_GRID = (delta_grid(129, -6.0, 6.0), delta_grid(129, -3.0, 3.0))
