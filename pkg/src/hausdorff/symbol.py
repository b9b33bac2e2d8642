"""Scalar and matrix symbols, symbol norm and spectrum.

For a positive-definite family the scalar symbol is

    φ(s) = ∫ K(u) a(u)^{-1/2 - i s} du,     a^{-1/2-is} = Π a_k^{-1/2-is_k},

and in general the matrix symbol Φ = (φ_ij) collects the same integral
restricted to the regions Ω_ij where sgn a(u) = ε(i, j), with |a| in place
of a. Two independent routes are offered: direct quadrature of the
defining integral ("direct") and the Fourier transform of the
log-coordinate kernel ("log-fourier").
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, SampledFunction, fourier_forward
from .model import kernel_nodes, octant_signature, to_log_coordinates
from .operator import OperatorSpec
from .quadrature import QuadratureConfig

__all__ = [
    "SymbolError",
    "SymbolMatrix",
    "SpectrumEstimate",
    "scalar_symbol",
    "matrix_symbol",
    "symbol_norm",
    "largest_singular_values",
    "spectrum_estimate",
    "default_s_grid",
    "default_symbol_quadrature",
    "default_log_t_grid",
]


class SymbolError(ValueError):
    pass


def default_s_grid() -> Grid:
    return Grid.uniform(-20.0, 20.0, 4001)


def default_symbol_quadrature(n: int = 1) -> QuadratureConfig:
    if n == 1:
        return QuadratureConfig(truncation=80.0, panel_width=0.5, order=16)
    return QuadratureConfig(truncation=30.0, panel_width=1.0, order=8)


def default_log_t_grid(n: int = 1) -> Grid:
    if n == 1:
        return Grid.uniform(-80.0, 80.0, 160001)
    return Grid.product(*[Grid.uniform(-40.0, 40.0, 801).axes[0]] * 2)


@dataclass(frozen=True)
class SymbolMatrix:
    """The 2ⁿ×2ⁿ matrix of sampled functions φ_ij on a shared s-grid."""

    n: int
    s_grid: Grid
    entries: dict = field(default_factory=dict)  # (i, j) -> SampledFunction

    @property
    def size(self) -> int:
        return 2**self.n

    def __getitem__(self, pair) -> SampledFunction:
        return self.entries[tuple(pair)]

    def as_array(self) -> np.ndarray:
        """Values with shape ``s_grid.shape + (2ⁿ, 2ⁿ)``."""
        m = self.size
        out = np.empty(self.s_grid.shape + (m, m), dtype=complex)
        for (i, j), f in self.entries.items():
            out[..., i - 1, j - 1] = f.values
        return out

    @classmethod
    def from_array(cls, n: int, s_grid: Grid, arr: np.ndarray) -> "SymbolMatrix":
        m = 2**n
        return cls(n, s_grid, {(i + 1, j + 1): SampledFunction(s_grid, arr[..., i, j])
                               for i in range(m) for j in range(m)})

    def __matmul__(self, other: "SymbolMatrix") -> "SymbolMatrix":
        if other.s_grid != self.s_grid or other.n != self.n:
            raise SymbolError("symbols live on different grids")
        return SymbolMatrix.from_array(self.n, self.s_grid, self.as_array() @ other.as_array())

    def is_symmetric(self) -> bool:
        a = self.as_array()
        return bool(np.array_equal(a, np.swapaxes(a, -1, -2)))


def _exp_sum(amp: np.ndarray, tau: np.ndarray, s_grid: Grid) -> np.ndarray:
    """Σ_m amp_m exp(-i s·τ_m) on a product s-grid."""
    s_axes = [a.points for a in s_grid.axes]
    if len(s_axes) == 1:
        s = s_axes[0]
        out = np.zeros(len(s), dtype=complex)
        step = max(1, 4_000_000 // max(1, len(s)))
        for k in range(0, len(amp), step):
            e = np.exp(-1j * np.outer(tau[k : k + step, 0], s))
            out += amp[k : k + step] @ e
        return out
    s1, s2 = s_axes
    out = np.zeros((len(s1), len(s2)), dtype=complex)
    step = max(1, 2_000_000 // max(1, len(s1) + len(s2)))
    for k in range(0, len(amp), step):
        e1 = np.exp(-1j * np.outer(tau[k : k + step, 0], s1))
        e2 = np.exp(-1j * np.outer(tau[k : k + step, 1], s2))
        out += (e1 * amp[k : k + step, None]).T @ e2
    return out


def _direct_parts(op: OperatorSpec, s_grid: Grid, cfg: QuadratureConfig | None):
    """Direct-route symbol per sign pattern ε of a(u): {ε: values}."""
    cfg = cfg or default_symbol_quadrature(op.n)
    parts: dict = {}
    for u, kw in kernel_nodes(op.kernel, op.family, cfg):
        a = op.family.eigvals(u)
        if np.any(a == 0) or not np.all(np.isfinite(a)):
            raise SymbolError("A(u) is singular on the kernel support")
        sgn = np.sign(a).astype(int)
        with np.errstate(all="ignore"):
            tau = np.log(np.abs(a))
            amp = kw * np.exp(-0.5 * tau.sum(axis=-1))
        keep = np.abs(amp) > 1e-18 * np.abs(amp).max()
        for eps in {tuple(int(v) for v in r) for r in sgn[keep]}:
            m = keep & np.all(sgn == np.asarray(eps), axis=-1)
            val = _exp_sum(amp[m], tau[m], s_grid)
            parts[eps] = parts.get(eps, 0) + val
    return parts


def scalar_symbol(op: OperatorSpec, s_grid: Grid | None = None, method: str = "direct",
                  quadrature: QuadratureConfig | None = None, t_grid: Grid | None = None) -> SampledFunction:
    """φ_{K,A} on ``s_grid`` for a positive-definite family.

    ``method="direct"`` integrates the defining integral with the composite
    log rule; ``"log-fourier"`` transforms the log-coordinate kernel L(t)
    sampled on ``t_grid`` (log kernels default to their own table).
    """
    if not op.family.positive_definite:
        raise SymbolError("scalar symbol needs a positive-definite family; use matrix_symbol")
    s_grid = s_grid or default_s_grid()
    if s_grid.n != op.n:
        raise SymbolError("s-grid dimension differs from the operator's")
    if op.kernel.is_zero:
        return SampledFunction.zeros(s_grid)
    if method == "direct":
        parts = _direct_parts(op, s_grid, quadrature)
        pos = (1,) * op.n
        if set(parts) - {pos}:
            raise SymbolError("kernel support meets points where a(u) is not positive")
        return SampledFunction(s_grid, parts.get(pos, np.zeros(s_grid.shape)))
    if method == "log-fourier":
        L = _own_table(op.kernel, (1,) * op.n, t_grid)
        if L is None:
            L = to_log_coordinates(op.kernel, op.family, (1, 1), t_grid or default_log_t_grid(op.n))
        return fourier_forward(L, s_grid, decay_tol=None)
    raise SymbolError(f"unknown symbol method {method!r}")


def matrix_symbol(op: OperatorSpec, s_grid: Grid | None = None, method: str = "direct",
                  quadrature: QuadratureConfig | None = None, t_grid: Grid | None = None) -> SymbolMatrix:
    """Φ(s) = (φ_ij(s)) for i, j = 1..2ⁿ.

    Entries depend on (i, j) only through ε(i, j), so each distinct ε is
    computed once and shared; the matrix is symmetric by construction.
    """
    n = op.n
    s_grid = s_grid or default_s_grid()
    m = 2**n
    by_eps: dict = {}
    if op.kernel.is_zero:
        pass
    elif method == "direct":
        by_eps = _direct_parts(op, s_grid, quadrature)
    elif method == "log-fourier" and _own_table(op.kernel, (1,) * n, t_grid, any_table=True) is not None:
        for eps, q in op.kernel.log_tables.items():
            by_eps[eps] = fourier_forward(q, s_grid, decay_tol=None).values
    elif method == "log-fourier":
        t_grid = t_grid or default_log_t_grid(n)
        signs = _support_signs(op)
        for j in range(1, m + 1):
            eps = octant_signature(1, j, n)
            if not op.family.has_pair(1, j):
                if eps in signs:
                    raise SymbolError(f"family has no inverse map for pairs with sign pattern {eps}, "
                                      "which meet the kernel support")
                continue
            L = to_log_coordinates(op.kernel, op.family, (1, j), t_grid)
            by_eps[eps] = fourier_forward(L, s_grid, decay_tol=None).values
    else:
        raise SymbolError(f"unknown symbol method {method!r}")
    zero = np.zeros(s_grid.shape, dtype=complex)
    entries = {}
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            eps = octant_signature(i, j, n)
            entries[(i, j)] = SampledFunction(s_grid, by_eps.get(eps, zero))
    return SymbolMatrix(n, s_grid, entries)


def _own_table(kernel, eps, t_grid, any_table=False):
    # log kernels are transformed on their own tables unless a t-grid is forced
    if kernel.kind != "log" or t_grid is not None:
        return None
    if any_table:
        return kernel.log_tables or None
    return kernel.log_tables.get(eps)


def _support_signs(op: OperatorSpec) -> set:
    out = set()
    cfg = QuadratureConfig(truncation=20.0, panel_width=2.0, order=4)
    for u, kw in kernel_nodes(op.kernel, op.family, cfg):
        sgn = np.sign(op.family.eigvals(u[kw != 0])).astype(int)
        out |= {tuple(int(v) for v in r) for r in sgn}
    return out


# -- norms --------------------------------------------------------------------------


def _jacobi_eigvals(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 50) -> np.ndarray:
    """Eigenvalues of a batch of small Hermitian matrices, shape (B, m, m).

    Cyclic Jacobi: each (p, q) step first rotates the phase of a_pq away
    and then applies the real symmetric rotation that annihilates it.
    """
    a = np.array(h, dtype=complex)
    m = a.shape[-1]
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-1, -2)))
    scale = np.where(scale > 0, scale, 1.0)
    for _ in range(max_sweeps):
        diag = np.sum(np.abs(np.diagonal(a, axis1=-2, axis2=-1)) ** 2, axis=-1)
        off = np.sqrt(np.clip(np.sum(np.abs(a) ** 2, axis=(-1, -2)) - diag, 0.0, None))
        if np.all(off <= tol * scale):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[:, p, q]
                mag = np.abs(apq)
                act = mag > 1e-300
                phase = np.where(act, apq / np.where(act, mag, 1.0), 1.0)
                a[:, :, q] *= np.conj(phase)[:, None]
                a[:, q, :] *= phase[:, None]
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                tau = np.where(act, (aqq - app) / (2 * np.where(act, mag, 1.0)), 0.0)
                big = np.abs(tau) > 1e150
                tau_s = np.where(big, 0.0, tau)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau_s) + np.sqrt(1 + tau_s**2))
                t = np.where(big, 0.5 / np.where(big, tau, 1.0), t)
                t = np.where(act, t, 0.0)
                c = 1 / np.sqrt(1 + t**2)
                s = t * c
                cp = a[:, :, p].copy()
                cq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * cp - s[:, None] * cq
                a[:, :, q] = s[:, None] * cp + c[:, None] * cq
                rp = a[:, p, :].copy()
                rq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rp - s[:, None] * rq
                a[:, q, :] = s[:, None] * rp + c[:, None] * rq
    return np.diagonal(a, axis1=-2, axis2=-1).real


def largest_singular_values(mats: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in a batch (..., m, m)."""
    mats = np.asarray(mats, dtype=complex)
    lead = mats.shape[:-2]
    flat = mats.reshape((-1,) + mats.shape[-2:])
    if flat.shape[-1] == 1:
        return np.abs(flat[:, 0, 0]).reshape(lead)
    gram = np.conj(np.swapaxes(flat, -1, -2)) @ flat
    ev = _jacobi_eigvals(gram)
    return np.sqrt(np.clip(ev.max(axis=-1), 0, None)).reshape(lead)


def symbol_norm(phi) -> float:
    """sup_s ‖Φ(s)‖_op over the sampled s-grid.

    Accepts a :class:`SymbolMatrix` or a scalar symbol (1×1 case).
    """
    if isinstance(phi, SampledFunction):
        return float(np.max(np.abs(phi.values)))
    return float(np.max(largest_singular_values(phi.as_array())))


# -- spectrum -------------------------------------------------------------------------


@dataclass
class SpectrumEstimate:
    points: np.ndarray
    interval: tuple[float, float] | None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self):
        return {"interval": list(self.interval) if self.interval else None,
                "n_points": int(self.points.size), "warnings": list(self.warnings)}


def spectrum_estimate(phi: SampledFunction, decay_tol: float = 1e-3, real_tol: float = 1e-10) -> SpectrumEstimate:
    """Sampled range of the symbol plus its closure hull when it is real.

    The spectrum of the operator is the closure of the symbol's range. A
    symbol vanishing at infinity adds 0. For real non-negative symbols the
    hull ``[0, max φ]`` is returned.
    """
    v = phi.values.ravel()
    warn = []
    peak = float(np.max(np.abs(v))) if v.size else 0.0
    if peak == 0.0:
        return SpectrumEstimate(np.zeros(1, dtype=complex), (0.0, 0.0), warn)
    edge = max(float(np.max(np.abs(np.take(phi.values, idx, axis=k))))
               for k in range(phi.grid.n) for idx in (0, -1))
    if edge >= decay_tol * peak:
        warn.append(f"symbol does not decay on the s-grid (edge/peak = {edge / peak:.2e}); "
                    "the range may be incomplete")
    pts = np.concatenate([v, [0.0]])
    interval = None
    if np.all(np.abs(v.imag) <= real_tol * peak) and np.all(v.real >= -real_tol * peak):
        interval = (0.0, float(np.max(v.real)))
    return SpectrumEstimate(pts, interval, warn)
