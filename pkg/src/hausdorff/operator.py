"""Direct application of Hausdorff operators.

    (H f)(x) = ∫ K(u) f(A(u) x) du

evaluated by quadrature over ``u`` with multilinear interpolation of the
sampled ``f``. This is the brute-force side against which every symbol
calculus identity in the package is checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import EvalContext, Grid, SampledFunction, boundary_max, edge_bound, interpolate_many, norm_l2
from .model import AdmissibilityReport, KernelSpec, MatrixFamily, ModelError, admissibility_check, kernel_nodes
from .quadrature import QuadratureConfig

__all__ = ["OperatorSpec", "OperatorError", "apply", "apply_iterated"]

_CHUNK = 2_000_000


class OperatorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """A kernel together with its matrix family and quadrature settings.

    Construction runs :func:`admissibility_check` unless ``check=False``.
    """

    kernel: KernelSpec
    family: MatrixFamily
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    check: bool = True
    admissibility: AdmissibilityReport | None = None

    def __post_init__(self):
        if self.kernel.n != self.family.n:
            raise ModelError("kernel and family dimensions differ")
        if self.kernel.kind == "log" and self.kernel.family is not self.family:
            if self.kernel.family.to_dict() != self.family.to_dict():
                raise ModelError("log kernel was built for a different family")
        if self.check and self.admissibility is None:
            rep = admissibility_check(self.kernel, self.family)
            object.__setattr__(self, "admissibility", rep)
            if not rep.admissible:
                raise OperatorError(
                    f"kernel {self.kernel.name!r} is not admissible: "
                    f"|det A|^(-1/2) K not integrable (tail ratio {rep.tail_ratio:.2e})")

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def name(self) -> str:
        return self.kernel.name

    def nodes(self):
        cache = self.__dict__.setdefault("_nodes", {})
        if "v" not in cache:
            cache["v"] = kernel_nodes(self.kernel, self.family, self.quadrature)
        return cache["v"]


def apply(op: OperatorSpec, f: SampledFunction, x_grid: Grid | None = None,
          ctx: EvalContext | None = None, max_lost: float = 0.1) -> SampledFunction:
    """Samples of H f on ``x_grid`` (defaults to the grid of ``f``).

    Values of ``f`` needed outside its grid are taken as zero. The L² size
    of the error this can cause, bounded by the modulus of ``f`` on the
    nearest face of its grid, is compared with ‖Hf‖; above ``max_lost`` the
    call fails.
    """
    x_grid = x_grid or f.grid
    if f.grid.n != op.n or x_grid.n != op.n:
        raise OperatorError("function, grid and operator dimensions differ")
    x = x_grid.flat_points()
    out = np.zeros(len(x), dtype=complex)
    lost = np.zeros(len(x))
    edge = boundary_max(f)
    local = EvalContext()
    for u, kw in op.nodes():
        step = max(1, _CHUNK // max(1, len(x)))
        for k in range(0, len(u), step):
            pts = op.family.apply_matrix(u[k : k + step], x)
            vals = interpolate_many(f, pts, local)
            out += kw[k : k + step] @ vals
            if edge > 0:
                lost += np.abs(kw[k : k + step]) @ edge_bound(f, pts)
    result = SampledFunction(x_grid, out)
    ratio = 0.0
    if edge > 0 and np.any(lost):
        err = SampledFunction(x_grid, lost)
        denom = norm_l2(result)
        ratio = norm_l2(err) / denom if denom > 0 else math.inf
    if ctx is not None:
        ctx.out_of_domain += local.out_of_domain
        ctx.evaluations += local.evaluations
        ctx.lost_mass += ratio
        ctx.history.append(ratio)
    if ratio > max_lost:
        raise OperatorError(
            f"{ratio:.1%} of the result may come from outside the sampled domain of f "
            f"({local.out_of_domain} of {local.evaluations} evaluations off-grid); enlarge the grid")
    return result


def apply_iterated(op: OperatorSpec, l: int, f: SampledFunction, x_grid: Grid | None = None,
                   ctx: EvalContext | None = None) -> SampledFunction:
    """H^l f by repeated application, each iterate resampled on ``x_grid``.

    ``ctx.lost_mass`` accumulates the per-step extension error estimates.
    """
    if int(l) != l or l < 1:
        raise OperatorError(f"l must be a positive integer, got {l}")
    g = f
    for _ in range(int(l)):
        g = apply(op, g, x_grid, ctx)
    return g
