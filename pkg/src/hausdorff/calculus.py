"""Products, holomorphic functions and fractional powers of Hausdorff operators.

Every construction goes through log coordinates. The product of two
operators over one family has log kernel

    Q_ε = Σ_δ K_δ * L_{δε}

(a single convolution when the family is positive definite), and a function
F of an operator with symbol φ has log kernel Q_F with Q̂_F = F∘φ.

Functions of one operator are computed on the frequency grid dual to the
t-grid (see :func:`hausdorff.grid.dual_grid`), where the trapezoidal
transform and its inverse are exact discrete inverses. F(z) = z then
returns the input table up to rounding, and polynomial F reproduce the
discrete convolution powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import Grid, SampledFunction, convolve, dual_grid, fourier_forward, fourier_inverse
from .model import (
    KernelSpec,
    MatrixFamily,
    ModelError,
    from_log_coordinates,
    kernel_nodes,
    octant_index,
    to_log_coordinates,
)
from .operator import OperatorSpec
from .presets import _boyd_text, family_preset
from .quadrature import QuadratureConfig
from .specfun import SpecFunConfig, bessel_k_real, gamma_real

__all__ = [
    "CalculusError",
    "HoloFunctionSpec",
    "default_calculus_t_grid",
    "product_kernel",
    "holomorphic_kernel",
    "fractional_kernel",
    "boyd_power_kernel",
    "boyd_symbol",
    "boyd_Q",
    "calderon_Q",
    "calderon_fractional_kernel",
    "calderon_kernel_table",
]

NEGATIVE_CLIP = 1e-10
IMAG_TOL = 1e-9


class CalculusError(ValueError):
    pass


def default_calculus_t_grid(n: int = 1) -> Grid:
    if n == 1:
        return Grid.uniform(-60.0, 60.0, 48001)
    ax = Grid.uniform(-20.0, 20.0, 401).axes[0]
    return Grid.product(ax, ax)


# -- holomorphic function specs -------------------------------------------------------


@dataclass(frozen=True)
class HoloFunctionSpec:
    """A function F with F(0) = 0, applied pointwise to symbols.

    Build with :meth:`polynomial`, :meth:`power`, :meth:`expm1`,
    :meth:`fractional` or :meth:`pointwise`.
    """

    kind: str
    coeffs: tuple = ()
    alpha: float | None = None
    fn: Callable | None = field(default=None, compare=False)
    name: str = "F"

    @classmethod
    def polynomial(cls, coeffs, name=None) -> "HoloFunctionSpec":
        """F(z) = Σ_k coeffs[k] z^k."""
        c = tuple(complex(x) for x in coeffs)
        if not c:
            raise CalculusError("polynomial needs at least one coefficient")
        return cls("polynomial", coeffs=c, name=name or f"poly{list(coeffs)}")

    @classmethod
    def power(cls, l: int) -> "HoloFunctionSpec":
        if int(l) != l or l < 1:
            raise CalculusError(f"power needs a positive integer, got {l}")
        return cls.polynomial([0] * int(l) + [1], name=f"z^{int(l)}")

    @classmethod
    def expm1(cls) -> "HoloFunctionSpec":
        return cls("expm1", name="exp(z)-1")

    @classmethod
    def fractional(cls, alpha: float) -> "HoloFunctionSpec":
        """Principal z^α on the closed right half-plane, real α > 0."""
        alpha = float(alpha)
        if not alpha > 0:
            raise CalculusError(f"fractional power needs alpha > 0, got {alpha}")
        return cls("power", alpha=alpha, name=f"z^{alpha}")

    @classmethod
    def pointwise(cls, fn: Callable, name: str = "F") -> "HoloFunctionSpec":
        return cls("pointwise", fn=fn, name=name)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "polynomial":
            out = np.zeros_like(z)
            for c in reversed(self.coeffs):
                out = out * z + c
            return out
        if self.kind == "expm1":
            return np.expm1(z)
        if self.kind == "power":
            if np.any(z.real < -NEGATIVE_CLIP * max(1.0, float(np.max(np.abs(z), initial=0.0)))):
                raise CalculusError("z^alpha is only taken on the closed right half-plane")
            return np.power(z, self.alpha)
        return np.asarray(self.fn(z), dtype=complex)

    def at_zero(self) -> complex:
        return complex(self(np.zeros(1))[0])


# -- products ------------------------------------------------------------------------


def _kernel_family(k) -> tuple[KernelSpec, MatrixFamily | None]:
    if isinstance(k, OperatorSpec):
        return k.kernel, k.family
    if k.kind == "log":
        return k, k.family
    return k, None


def _same_family(a: MatrixFamily, b: MatrixFamily) -> bool:
    return a is b or a.to_dict() == b.to_dict()


def _kernel_signs(kernel: KernelSpec, family: MatrixFamily) -> set:
    signs = set()
    cfg = QuadratureConfig(truncation=20.0, panel_width=2.0, order=4)
    for u, kw in kernel_nodes(kernel, family, cfg):
        sgn = np.sign(family.eigvals(u[kw != 0])).astype(int)
        signs |= {tuple(int(v) for v in r) for r in sgn}
    return signs


def _log_tables(kernel: KernelSpec, family: MatrixFamily, t_grid: Grid) -> dict:
    n = family.n
    if family.positive_definite:
        return {(1,) * n: to_log_coordinates(kernel, family, (1, 1), t_grid)}
    signs = _kernel_signs(kernel, family)
    out = {}
    for eps in signs:
        j = octant_index(eps)
        if not family.has_pair(1, j):
            raise ModelError(f"family has no inverse map for sign pattern {eps}, "
                             "which meets the kernel support")
        out[eps] = to_log_coordinates(kernel, family, (1, j), t_grid)
    return out


def product_kernel(K, L, family: MatrixFamily | None = None, t_grid: Grid | None = None,
                   window=None, name: str | None = None) -> KernelSpec:
    """Kernel of the product H_{K,A} H_{L,A}.

    ``K`` and ``L`` are kernels or operators. All families involved (those
    of operators and log kernels, and ``family``) must agree. The log
    tables are convolved on the sum-support grid, optionally cropped to
    ``window``.
    """
    K, fk = _kernel_family(K)
    L, fl = _kernel_family(L)
    fams = [f for f in (family, fk, fl) if f is not None]
    if not fams:
        raise ModelError("product_kernel needs a family")
    family = fams[0]
    if any(not _same_family(family, f) for f in fams[1:]):
        raise ModelError("kernels belong to different matrix families")
    n = family.n
    t_grid = t_grid or default_calculus_t_grid(n)
    tk = _log_tables(K, family, t_grid)
    tl = _log_tables(L, family, t_grid)
    out: dict = {}
    for delta, kd in tk.items():
        for gamma, lg in tl.items():
            eps = tuple(int(a * b) for a, b in zip(delta, gamma))
            term = convolve(kd, lg, window)
            out[eps] = out[eps] + term if eps in out else term
    if not out:
        zero = convolve(SampledFunction.zeros(t_grid), SampledFunction.zeros(t_grid), window)
        out = {(1,) * n: zero}
    if family.positive_definite:
        return from_log_coordinates(out[(1,) * n], family, name=name or f"({K.name})*({L.name})")
    return from_log_coordinates(out, family, name=name or f"({K.name})*({L.name})")


# -- functions of one operator -----------------------------------------------------------


def _symbol_on_dual(op: OperatorSpec, t_grid: Grid) -> tuple[SampledFunction, Grid]:
    if not op.family.positive_definite:
        raise CalculusError("functional calculus needs a positive-definite family")
    L = to_log_coordinates(op.kernel, op.family, (1, 1), t_grid)
    s_grid = dual_grid(t_grid)
    return fourier_forward(L, s_grid, decay_tol=None), s_grid


def _edge_ratio(v: np.ndarray) -> float:
    a = np.abs(v)
    peak = a.max()
    if peak == 0:
        return 0.0
    edge = max(max(np.take(a, 0, axis=k).max(), np.take(a, -1, axis=k).max()) for k in range(a.ndim))
    return float(edge / peak)


def _synthesize(values: np.ndarray, s_grid: Grid, t_grid: Grid, family: MatrixFamily,
                decay_tol: float, name: str) -> KernelSpec:
    ratio = _edge_ratio(values)
    if ratio > decay_tol:
        raise CalculusError(
            f"F(symbol) does not decay on the frequency grid (edge/peak = {ratio:.2e} > {decay_tol:.0e}); "
            "refine the t-grid or check that F(symbol) is a Fourier transform of an integrable function")
    q = fourier_inverse(SampledFunction(s_grid, values), t_grid, decay_tol=None)
    vals = q.values
    if np.max(np.abs(vals.imag)) <= IMAG_TOL * max(np.max(np.abs(vals)), 1e-300):
        vals = vals.real
    return from_log_coordinates(SampledFunction(t_grid, vals), family, name=name)


def holomorphic_kernel(op: OperatorSpec, F: HoloFunctionSpec, t_grid: Grid | None = None,
                       decay_tol: float = 1e-2) -> KernelSpec:
    """Kernel K_F of F(H_{K,A}) for a positive-definite family.

    Samples φ on the grid dual to ``t_grid``, applies F pointwise and
    inverts. Fails when F(0) ≠ 0 or F∘φ does not decay to ``decay_tol``
    times its peak at the ends of the frequency grid.
    """
    if abs(F.at_zero()) > 1e-14:
        raise CalculusError(f"F(0) must vanish, got {F.at_zero()}")
    t_grid = t_grid or default_calculus_t_grid(op.n)
    phi, s_grid = _symbol_on_dual(op, t_grid)
    vals = F(phi.values)
    return _synthesize(vals, s_grid, t_grid, op.family, decay_tol, f"{F.name}({op.name})")


def fractional_kernel(op: OperatorSpec, alpha: float, t_grid: Grid | None = None,
                      decay_tol: float = 1e-2) -> KernelSpec:
    """Kernel K_α of the real power H^α of an operator with symbol φ ≥ 0.

    Imaginary parts of φ above ``1e-9·max|φ|`` or negative values below
    ``-1e-10·max|φ|`` are rejected; smaller negative values are clipped.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise CalculusError(f"alpha must be positive, got {alpha}")
    t_grid = t_grid or default_calculus_t_grid(op.n)
    phi, s_grid = _symbol_on_dual(op, t_grid)
    v = phi.values
    peak = float(np.max(np.abs(v)))
    if peak == 0:
        return _synthesize(np.zeros(s_grid.shape), s_grid, t_grid, op.family, decay_tol, f"{op.name}^{alpha}")
    if np.max(np.abs(v.imag)) > IMAG_TOL * peak:
        raise CalculusError(f"symbol is not real (max |Im| / max|φ| = {np.max(np.abs(v.imag)) / peak:.2e})")
    re = v.real
    if re.min() < -NEGATIVE_CLIP * peak:
        raise CalculusError(f"symbol takes negative values (min {re.min():.3e})")
    vals = np.clip(re, 0.0, None) ** alpha
    return _synthesize(vals, s_grid, t_grid, op.family, decay_tol, f"{op.name}^{alpha}")


# -- closed forms ---------------------------------------------------------------------


def boyd_power_kernel(alpha: float, l: int = 1) -> KernelSpec:
    """(log 1/u)^{l-1} u^{-α} χ_(0,1)(u) / (l-1)!, the kernel of P_α^l."""
    return KernelSpec.from_text(_boyd_text(alpha, l), name=f"boyd(alpha={alpha})^{l}")


def boyd_symbol(alpha: float, s, l: int = 1):
    """1 / ((1/2 - α) - i s)^l."""
    if not alpha < 0.5:
        raise ModelError(f"Boyd operator needs alpha < 1/2, got {alpha}")
    s = np.asarray(s, dtype=float)
    out = 1.0 / ((0.5 - alpha) - 1j * s) ** l
    return complex(out) if out.ndim == 0 else out


def boyd_Q(alpha: float, l: int, t):
    """Log kernel of P_α^l: (-t)^{l-1} e^{(1/2-α)t} / (l-1)! for t < 0."""
    if not alpha < 0.5:
        raise ModelError(f"Boyd operator needs alpha < 1/2, got {alpha}")
    t = np.asarray(t, dtype=float)
    neg = t < 0
    tt = np.where(neg, t, 0.0)
    out = np.where(neg, (-tt) ** (l - 1) * np.exp((0.5 - alpha) * tt) / math.factorial(l - 1), 0.0)
    return float(out) if out.ndim == 0 else out


def calderon_Q(alpha: float, t, config: SpecFunConfig | None = None):
    """π^{-1/2} Γ(α)^{-1} |t|^{α-1/2} K_{α-1/2}(|t|/2).

    At t = 0 the limit π^{-1/2} Γ(α)^{-1} 2^{2α-2} Γ(α-1/2) is returned for
    α > 1/2 and +inf otherwise.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    t = np.abs(np.asarray(t, dtype=float))
    nu = alpha - 0.5
    c = 1.0 / (math.sqrt(math.pi) * gamma_real(alpha))
    out = np.empty(t.shape)
    zero = t == 0
    if np.any(~zero):
        tz = t[~zero]
        out[~zero] = c * tz**nu * bessel_k_real(nu, tz / 2, config)
    if np.any(zero):
        out[zero] = c * 2 ** (2 * nu - 1) * gamma_real(nu) if nu > 0 else math.inf
    return float(out) if out.ndim == 0 else out


def calderon_fractional_kernel(alpha: float, u, config: SpecFunConfig | None = None):
    """K_α(u) = u^{-3/2} Q_α(log u) for u > 0."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0)):
        raise ValueError("calderon_fractional_kernel needs u > 0")
    out = u**-1.5 * np.asarray(calderon_Q(alpha, np.log(u), config))
    return float(out) if out.ndim == 0 else out


def calderon_kernel_table(alpha: float, t_grid: Grid | None = None, exclude: float = 1e-6,
                          config: SpecFunConfig | None = None) -> KernelSpec:
    """Tabulated K_α from the closed form, as a log kernel of the Calderón family.

    Points with |t| < ``exclude`` are set to zero when Q_α is singular
    there (α ≤ 1/2).
    """
    t_grid = t_grid or default_calculus_t_grid(1)
    t = t_grid.axes[0].points
    q = np.zeros_like(t)
    keep = np.abs(t) >= exclude if alpha <= 0.5 else np.ones(t.shape, dtype=bool)
    q[keep] = calderon_Q(alpha, t[keep], config)
    return from_log_coordinates(SampledFunction(t_grid, q), family_preset("inversion-pd"),
                                name=f"calderon^{alpha}")
