"""Sampled functions on rectangular grids.

A :class:`Grid` is a product of one or two axes. Every axis is either
uniform on ``[lo, hi]`` or, when ``half_line`` is set, log-uniform on
``[lo, hi] ⊂ (0, ∞)``. Values live in a complex array shaped like the grid.

Fourier convention (used everywhere in the package)::

    forward:  ĝ(s) = ∫ g(t) exp(-i s·t) dt
    inverse:  g(t) = (2π)^(-n) ∫ ĝ(s) exp(+i s·t) ds

Both are discretised with the trapezoidal rule on uniform grids. The
s-grid and t-grid are independent; a chirp-z evaluation is used as a fast
path for large sums and gives the same sums up to rounding.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

__all__ = [
    "Axis",
    "Grid",
    "SampledFunction",
    "EvalContext",
    "GridError",
    "interpolate",
    "interpolate_many",
    "fourier_forward",
    "fourier_inverse",
    "convolve",
    "norm_l2",
    "distance_linf",
    "rel_linf",
    "rel_l2",
    "dual_grid",
    "inside_hull",
    "boundary_max",
    "edge_bound",
    "crop",
]

# chirp-z is used once the direct sum would exceed this many terms
_CZT_THRESHOLD = 2_000_000
_DIRECT_CHUNK = 4_000_000


class GridError(ValueError):
    """Invalid grid, mismatched grids or invalid sample values."""


@dataclass(frozen=True)
class Axis:
    """One axis of a grid.

    ``coords`` are the internal (uniform) coordinates: the points themselves
    for ordinary axes and their logarithms for half-line axes.
    """

    lo: float
    hi: float
    count: int
    half_line: bool = False

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise GridError(f"axis needs finite lo < hi, got [{lo}, {hi}]")
        if int(self.count) != self.count or self.count < 2:
            raise GridError(f"axis count must be an integer >= 2, got {self.count}")
        if self.half_line and lo <= 0:
            raise GridError("half-line axis needs lo > 0")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "count", int(self.count))

    @property
    def coords(self) -> np.ndarray:
        if self.half_line:
            return np.linspace(math.log(self.lo), math.log(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)

    @property
    def points(self) -> np.ndarray:
        c = self.coords
        if self.half_line:
            # pin the end points so exp(log(lo)) round-off cannot leak out
            p = np.exp(c)
            p[0], p[-1] = self.lo, self.hi
            return p
        return c

    @property
    def spacing(self) -> float:
        """Spacing of the internal coordinate (log-spacing on half-lines)."""
        c0 = math.log(self.lo) if self.half_line else self.lo
        c1 = math.log(self.hi) if self.half_line else self.hi
        return (c1 - c0) / (self.count - 1)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal weights for integrals in the *original* variable."""
        w = np.full(self.count, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        if self.half_line:
            w = w * self.points
        return w

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "count": self.count, "half_line": self.half_line}


@dataclass(frozen=True)
class Grid:
    """Rectangular product grid of dimension 1 or 2."""

    axes: tuple[Axis, ...]

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(axes) not in (1, 2):
            raise GridError(f"grid dimension must be 1 or 2, got {len(axes)}")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def uniform(cls, lo, hi, count) -> "Grid":
        return cls((Axis(lo, hi, count),))

    @classmethod
    def half_line(cls, lo, hi, count) -> "Grid":
        return cls((Axis(lo, hi, count, half_line=True),))

    @classmethod
    def product(cls, *axes: Axis) -> "Grid":
        return cls(tuple(axes))

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def weights(self) -> np.ndarray:
        w = self.axes[0].weights
        for a in self.axes[1:]:
            w = np.multiply.outer(w, a.weights)
        return w

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*[a.points for a in self.axes], indexing="ij")

    def flat_points(self) -> np.ndarray:
        """All grid points as an array of shape ``(size, n)`` in C order."""
        return np.stack([m.ravel() for m in self.mesh()], axis=-1)

    def to_dict(self) -> dict:
        return {"axes": [a.to_dict() for a in self.axes]}


def dual_grid(t_grid: Grid, oversample: int = 2) -> Grid:
    """Frequency grid on which trapezoidal forward/inverse are exact inverses.

    Each axis spans ``[-π/h, π/h]`` with ``oversample * count + 1`` points,
    so the trapezoidal inverse sum covers exactly one period and a
    convolution of two t-grid functions does not wrap around.
    """
    axes = []
    for a in t_grid.axes:
        if a.half_line:
            raise GridError("dual grid needs uniform t-axes")
        m = oversample * a.count
        nyq = math.pi / a.spacing
        axes.append(Axis(-nyq, nyq, m + 1))
    return Grid(tuple(axes))


@dataclass(frozen=True)
class SampledFunction:
    """Complex samples of a function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.size != self.grid.size:
            raise GridError(f"{v.size} values for a grid of {self.grid.size} points")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise GridError("sampled values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "SampledFunction":
        return cls(grid, fn(*grid.mesh()))

    @classmethod
    def zeros(cls, grid: Grid) -> "SampledFunction":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def __add__(self, other):
        _require_same_grid(self, other)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _require_same_grid(self, other)
        return SampledFunction(self.grid, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, SampledFunction):
            _require_same_grid(self, other)
            return SampledFunction(self.grid, self.values * other.values)
        return SampledFunction(self.grid, self.values * other)

    __rmul__ = __mul__

    def map(self, fn) -> "SampledFunction":
        return SampledFunction(self.grid, fn(self.values))


@dataclass
class EvalContext:
    """Mutable diagnostics collected while evaluating off-grid samples."""

    out_of_domain: int = 0
    evaluations: int = 0
    lost_mass: float = 0.0
    warnings: list[str] = field(default_factory=list)
    history: list[float] = field(default_factory=list)

    def warn(self, message: str):
        if message not in self.warnings:
            self.warnings.append(message)


def _require_same_grid(f: SampledFunction, g: SampledFunction):
    if f.grid != g.grid:
        raise GridError("grids differ")


def interpolate_many(f: SampledFunction, points, ctx: EvalContext | None = None) -> np.ndarray:
    """Multilinear interpolation of ``f`` at ``points`` (shape ``(..., n)``).

    Half-line axes interpolate linearly in ``log x``. Points outside the
    grid hull evaluate to zero and are tallied in ``ctx.out_of_domain``.
    """
    pts = np.asarray(points, dtype=float)
    n = f.grid.n
    if n == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
        pts = pts[..., None]
    if pts.shape[-1] != n:
        raise GridError(f"points must have trailing dimension {n}")
    if not np.all(np.isfinite(pts)):
        raise GridError("interpolation point is not finite")
    batch = pts.shape[:-1]
    pts = pts.reshape(-1, n)

    inside = np.ones(len(pts), dtype=bool)
    idx, frac = [], []
    for k, axis in enumerate(f.grid.axes):
        x = pts[:, k]
        if axis.half_line:
            with np.errstate(divide="ignore", invalid="ignore"):
                c = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)
            c0, c1 = math.log(axis.lo), math.log(axis.hi)
            # end points are stored exactly; admit them despite log round-off
            c = np.where(x == axis.lo, c0, np.where(x == axis.hi, c1, c))
        else:
            c = x
            c0, c1 = axis.lo, axis.hi
        inside &= (c >= c0) & (c <= c1)
        pos = (np.clip(c, c0, c1) - c0) / axis.spacing
        i = np.clip(np.floor(pos).astype(np.int64), 0, axis.count - 2)
        idx.append(i)
        frac.append(pos - i)

    vals = f.values
    if n == 1:
        (i,), (w,) = idx, frac
        out = vals[i] * (1 - w) + vals[i + 1] * w
    else:
        (i, j), (wi, wj) = idx, frac
        out = (
            vals[i, j] * (1 - wi) * (1 - wj)
            + vals[i + 1, j] * wi * (1 - wj)
            + vals[i, j + 1] * (1 - wi) * wj
            + vals[i + 1, j + 1] * wi * wj
        )
    out = np.where(inside, out, 0.0)
    if ctx is not None:
        ctx.evaluations += len(pts)
        ctx.out_of_domain += int(np.count_nonzero(~inside))
    return out.reshape(batch)


def inside_hull(grid: Grid, points) -> np.ndarray:
    """Boolean mask of ``points`` (shape ``(..., n)``) inside the grid hull."""
    pts = np.asarray(points, dtype=float)
    inside = np.ones(pts.shape[:-1], dtype=bool)
    for k, axis in enumerate(grid.axes):
        x = pts[..., k]
        inside &= (x >= axis.lo) & (x <= axis.hi)
    return inside


def boundary_max(f: SampledFunction) -> float:
    """Largest modulus on the boundary of the grid."""
    v = np.abs(f.values)
    return float(max(max(np.take(v, 0, axis=k).max(), np.take(v, -1, axis=k).max())
                     for k in range(f.grid.n)))


def edge_bound(f: SampledFunction, points) -> np.ndarray:
    """Per-point stand-in for |f| off the grid: the modulus on the nearest side.

    Zero inside the hull. Points below an axis use the largest modulus on
    that axis' lower face, points above it the upper face.
    """
    pts = np.asarray(points, dtype=float)
    v = np.abs(f.values)
    out = np.zeros(pts.shape[:-1])
    for k, axis in enumerate(f.grid.axes):
        x = pts[..., k]
        low = float(np.take(v, 0, axis=k).max())
        high = float(np.take(v, -1, axis=k).max())
        out = np.maximum(out, np.where(x < axis.lo, low, 0.0))
        out = np.maximum(out, np.where(x > axis.hi, high, 0.0))
    return out


def interpolate(f: SampledFunction, x, ctx: EvalContext | None = None) -> complex:
    """Value of ``f`` at a single point ``x`` (scalar for 1-D grids)."""
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    return complex(interpolate_many(f, pt[None, :], ctx)[0])


# -- Fourier transforms ------------------------------------------------------


def _trap_weights(axis: Axis) -> np.ndarray:
    w = np.full(axis.count, axis.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _exp_sum_axis(values: np.ndarray, src: Axis, dst: Axis, sign: int, axis: int, method: str):
    """Σ_n values[n] exp(sign·i·dst_k·src_n) along ``axis`` (uniform axes)."""
    values = np.moveaxis(values, axis, -1)
    x = src.coords
    y = dst.coords
    n_src, n_dst = len(x), len(y)
    if method == "auto":
        method = "czt" if n_src * n_dst > _CZT_THRESHOLD else "direct"
    if method == "czt":
        h, dy = src.spacing, dst.spacing
        a = np.exp(-sign * 1j * y[0] * h)
        w = np.exp(sign * 1j * dy * h)
        out = signal.czt(values, m=n_dst, w=w, a=a, axis=-1)
        out = out * np.exp(sign * 1j * y * x[0])
    elif method == "direct":
        flat = values.reshape(-1, n_src)
        out = np.empty((flat.shape[0], n_dst), dtype=complex)
        step = max(1, _DIRECT_CHUNK // n_src)
        for k in range(0, n_dst, step):
            kern = np.exp(sign * 1j * np.outer(x, y[k : k + step]))
            out[:, k : k + step] = flat @ kern
        out = out.reshape(values.shape[:-1] + (n_dst,))
    else:
        raise ValueError(f"unknown transform method {method!r}")
    return np.moveaxis(out, -1, axis)


def _check_decay(f: SampledFunction, label: str, rel: float = 1e-12):
    v = np.abs(f.values)
    peak = v.max()
    if peak == 0:
        return
    edge = 0.0
    for k in range(f.grid.n):
        edge = max(edge, np.take(v, 0, axis=k).max(), np.take(v, -1, axis=k).max())
    if edge > rel * peak:
        warnings.warn(f"{label}: input does not decay at the grid boundary "
                      f"(edge/peak = {edge / peak:.2e})", RuntimeWarning, stacklevel=3)


def _check_axes(src: Grid, dst: Grid):
    if src.n != dst.n:
        raise GridError("input and output grids must have the same dimension")
    for a in src.axes + dst.axes:
        if a.half_line:
            raise GridError("Fourier transforms need uniform (full-line) axes")


def _transform(f: SampledFunction, out_grid: Grid, sign: int, method: str) -> np.ndarray:
    vals = f.values
    for k, axis in enumerate(f.grid.axes):
        shape = [1] * f.grid.n
        shape[k] = axis.count
        vals = vals * _trap_weights(axis).reshape(shape)
    for k in range(f.grid.n):
        vals = _exp_sum_axis(vals, f.grid.axes[k], out_grid.axes[k], sign, k, method)
    return vals


def fourier_forward(g: SampledFunction, s_grid: Grid, method: str = "auto",
                    decay_tol: float | None = 1e-12) -> SampledFunction:
    """Trapezoidal ĝ(s) = ∫ g(t) exp(-i s·t) dt evaluated on ``s_grid``."""
    _check_axes(g.grid, s_grid)
    if decay_tol is not None:
        _check_decay(g, "fourier_forward", decay_tol)
    return SampledFunction(s_grid, _transform(g, s_grid, -1, method))


def fourier_inverse(g_hat: SampledFunction, t_grid: Grid, method: str = "auto",
                    decay_tol: float | None = 1e-3) -> SampledFunction:
    """Trapezoidal g(t) = (2π)^(-n) ∫ ĝ(s) exp(+i s·t) ds evaluated on ``t_grid``."""
    _check_axes(g_hat.grid, t_grid)
    if decay_tol is not None:
        _check_decay(g_hat, "fourier_inverse", decay_tol)
    vals = _transform(g_hat, t_grid, +1, method) / (2 * math.pi) ** t_grid.n
    return SampledFunction(t_grid, vals)


def convolve(f: SampledFunction, g: SampledFunction, window=None) -> SampledFunction:
    """Discrete convolution ``(f*g)(t) ≈ Σ h f(τ) g(t-τ)`` on the sum-support grid.

    ``window`` optionally crops the result to ``[(lo, hi), ...]`` per axis.
    """
    if f.grid.n != g.grid.n:
        raise GridError("convolution operands differ in dimension")
    axes = []
    cell = 1.0
    for a, b in zip(f.grid.axes, g.grid.axes):
        if a.half_line or b.half_line:
            raise GridError("convolution needs uniform axes")
        if not math.isclose(a.spacing, b.spacing, rel_tol=1e-9):
            raise GridError(f"grid spacings differ: {a.spacing} vs {b.spacing}")
        count = a.count + b.count - 1
        axes.append(Axis(a.lo + b.lo, a.lo + b.lo + (count - 1) * a.spacing, count))
        cell *= a.spacing
    vals = signal.convolve(f.values, g.values, method="auto") * cell
    # FFT round-off would otherwise leave noise where the true result is exactly zero
    support = signal.convolve((f.values != 0).astype(float), (g.values != 0).astype(float), method="auto")
    vals = np.where(support > 0.5, vals, 0.0)
    out = SampledFunction(Grid(tuple(axes)), vals)
    if window is not None:
        out = crop(out, window)
    return out


def crop(f: SampledFunction, window) -> SampledFunction:
    """Restrict ``f`` to the grid points inside ``window = [(lo, hi), ...]``."""
    slices, axes = [], []
    for axis, (lo, hi) in zip(f.grid.axes, window):
        p = axis.points
        keep = np.nonzero((p >= lo - 1e-12 * abs(lo)) & (p <= hi + 1e-12 * abs(hi)))[0]
        if len(keep) < 2:
            raise GridError("window keeps fewer than two points")
        i0, i1 = keep[0], keep[-1]
        slices.append(slice(i0, i1 + 1))
        axes.append(Axis(p[i0], p[i1], i1 - i0 + 1, axis.half_line))
    return SampledFunction(Grid(tuple(axes)), f.values[tuple(slices)])


# -- norms -------------------------------------------------------------------


def norm_l2(f: SampledFunction) -> float:
    """Trapezoidal L² norm."""
    return float(np.sqrt(np.sum(f.grid.weights * np.abs(f.values) ** 2)))


def distance_linf(f: SampledFunction, g: SampledFunction) -> float:
    _require_same_grid(f, g)
    return float(np.max(np.abs(f.values - g.values)))


def rel_linf(f: SampledFunction, ref: SampledFunction) -> float:
    """``max|f - ref| / max|ref|``."""
    scale = float(np.max(np.abs(ref.values)))
    d = distance_linf(f, ref)
    return d / scale if scale > 0 else d


def rel_l2(f: SampledFunction, ref: SampledFunction) -> float:
    _require_same_grid(f, ref)
    scale = norm_l2(ref)
    d = norm_l2(f - ref)
    return d / scale if scale > 0 else d
