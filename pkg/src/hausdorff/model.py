"""Kernels, matrix families, octants and the log-coordinate change of variables.

Octant enumeration: octant ``i`` (1-based) has sign vector ``σ`` with
``σ_k = -1`` exactly when bit ``k`` of ``i - 1`` is set. In two dimensions
octants 1..4 are ``(+,+), (-,+), (+,-), (-,-)``.

A :class:`MatrixFamily` stores the eigenvalue maps ``a_k(u)`` of the
commuting self-adjoint family ``A(u) = C diag(a(u)) Cᵀ`` together with, for
each octant pair ``(i, j)``, the inverse map ``t ↦ b_ij(t)`` solving
``|a_k(u)| = e^{t_k}`` on ``Ω_ij`` and its Jacobian determinant ``J_ij``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import expr as ex
from .grid import Grid, SampledFunction, interpolate_many
from .quadrature import QuadratureConfig, log_rule

__all__ = [
    "ModelError",
    "octant_signs",
    "octant_index",
    "octant_signature",
    "MatrixFamily",
    "KernelSpec",
    "omega_membership",
    "to_log_coordinates",
    "from_log_coordinates",
    "kernel_nodes",
    "AdmissibilityReport",
    "admissibility_check",
    "check_family",
]


class ModelError(ValueError):
    """Kernel or family definitions that violate their contracts."""


# -- octants -------------------------------------------------------------------


def octant_signs(i: int, n: int) -> tuple[int, ...]:
    if not 1 <= i <= 2**n:
        raise ModelError(f"octant index {i} out of range 1..{2**n}")
    return tuple(-1 if (i - 1) >> k & 1 else 1 for k in range(n))


def octant_index(signs) -> int:
    return 1 + sum(1 << k for k, s in enumerate(signs) if s < 0)


def octant_signature(i: int, j: int, n: int) -> tuple[int, ...]:
    """ε(i, j): the sign flip carrying octant i onto octant j."""
    return tuple(a * b for a, b in zip(octant_signs(i, n), octant_signs(j, n)))


def _pair_key(text: str) -> tuple[int, int]:
    i, j = (int(p) for p in text.split(","))
    return i, j


# -- matrix families -----------------------------------------------------------


def _env(prefix: str, pts: np.ndarray) -> dict:
    pts = np.asarray(pts, dtype=float)
    return {f"{prefix}{k + 1}": pts[..., k] for k in range(pts.shape[-1])}


def _broadcast(value, shape):
    return np.broadcast_to(np.asarray(value, dtype=float), shape)


@dataclass(frozen=True)
class MatrixFamily:
    """Commuting self-adjoint matrices given through their eigenvalues."""

    n: int
    eigenvalues: tuple[ex.Node, ...]
    inverse_maps: dict = field(default_factory=dict)  # (i, j) -> tuple[Node, ...]
    jacobians: dict = field(default_factory=dict)  # (i, j) -> Node
    positive_definite: bool = False
    conjugator: np.ndarray | None = None
    name: str = "custom"

    def __post_init__(self):
        if len(self.eigenvalues) != self.n:
            raise ModelError(f"need {self.n} eigenvalue maps, got {len(self.eigenvalues)}")
        if self.conjugator is not None:
            c = np.asarray(self.conjugator, dtype=float)
            if c.shape != (self.n, self.n) or not np.allclose(c @ c.T, np.eye(self.n), atol=1e-12, rtol=0):
                raise ModelError("conjugator must be an orthogonal n×n matrix")
            object.__setattr__(self, "conjugator", c)
        for key, b in self.inverse_maps.items():
            if len(b) != self.n:
                raise ModelError(f"inverse map for pair {key} needs {self.n} components")
            if key not in self.jacobians:
                raise ModelError(f"inverse map for pair {key} has no Jacobian")

    @classmethod
    def from_text(cls, a, b=None, jac=None, positive_definite=False, conjugator=None, name="custom"):
        """Build from expression strings; ``b``/``jac`` are keyed by ``"i,j"``."""
        n = len(a)
        inv = {_pair_key(k) if isinstance(k, str) else tuple(k): tuple(ex.parse(e, n) for e in v)
               for k, v in (b or {}).items()}
        jc = {_pair_key(k) if isinstance(k, str) else tuple(k): ex.parse(v, n)
              for k, v in (jac or {}).items()}
        return cls(n, tuple(ex.parse(e, n) for e in a), inv, jc, bool(positive_definite),
                   None if conjugator is None else np.asarray(conjugator, dtype=float), name)

    def to_dict(self) -> dict:
        d = {
            "a": [ex.to_text(e) for e in self.eigenvalues],
            "b": {f"{i},{j}": [ex.to_text(e) for e in v] for (i, j), v in sorted(self.inverse_maps.items())},
            "jac": {f"{i},{j}": ex.to_text(v) for (i, j), v in sorted(self.jacobians.items())},
            "positive_definite": self.positive_definite,
        }
        if self.conjugator is not None:
            d["C"] = self.conjugator.tolist()
        return d

    def eigvals(self, u) -> np.ndarray:
        """a(u) for points of shape ``(..., n)``; result has the same shape."""
        u = np.asarray(u, dtype=float)
        env = _env("u", u)
        with np.errstate(all="ignore"):
            cols = [_broadcast(e.evaluate(env), u.shape[:-1]) for e in self.eigenvalues]
        return np.stack(cols, axis=-1)

    def det(self, u) -> np.ndarray:
        return np.prod(self.eigvals(u), axis=-1)

    def apply_matrix(self, u, x) -> np.ndarray:
        """A(u) x for node array ``u`` (N, n) and points ``x`` (M, n) → (N, M, n)."""
        a = self.eigvals(u)
        x = np.asarray(x, dtype=float)
        if self.conjugator is None:
            return a[:, None, :] * x[None, :, :]
        c = self.conjugator
        y = x @ c  # coordinates in the eigenbasis: Cᵀx
        return (a[:, None, :] * y[None, :, :]) @ c.T

    def pair_for(self, i: int, j: int) -> tuple[int, int]:
        """Registered pair carrying the same ε as (i, j)."""
        if (i, j) in self.inverse_maps:
            return (i, j)
        eps = octant_signature(i, j, self.n)
        for key in sorted(self.inverse_maps):
            if octant_signature(*key, self.n) == eps:
                return key
        raise ModelError(f"family {self.name!r} has no inverse map for octant pair ({i},{j})")

    def has_pair(self, i: int, j: int) -> bool:
        try:
            self.pair_for(i, j)
        except ModelError:
            return False
        return True

    def inverse(self, pair, t) -> np.ndarray:
        """b_ij(t) for points of shape ``(..., n)``."""
        key = self.pair_for(*pair)
        t = np.asarray(t, dtype=float)
        env = _env("t", t)
        with np.errstate(all="ignore"):
            cols = [_broadcast(e.evaluate(env), t.shape[:-1]) for e in self.inverse_maps[key]]
        return np.stack(cols, axis=-1)

    def jacobian(self, pair, t) -> np.ndarray:
        key = self.pair_for(*pair)
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            return _broadcast(self.jacobians[key].evaluate(_env("t", t)), t.shape[:-1])

    def breakpoints(self) -> list[set[float]]:
        """Kinks of the eigenvalue maps along each u-axis."""
        out = [set() for _ in range(self.n)]
        for e in self.eigenvalues:
            for k in range(self.n):
                out[k] |= ex.breakpoints(e, f"u{k + 1}")
        return out


def omega_membership(u, i: int, j: int, family: MatrixFamily) -> bool:
    """True iff sgn a(u) equals ε(i, j)."""
    a = family.eigvals(np.atleast_1d(np.asarray(u, dtype=float)))
    if np.any(a == 0) or not np.all(np.isfinite(a)):
        raise ModelError(f"A(u) is singular at u={u}")
    return tuple(np.sign(a).astype(int)) == octant_signature(i, j, family.n)


# -- kernels ---------------------------------------------------------------------


@dataclass(frozen=True)
class KernelSpec:
    """A kernel K on ℝⁿ.

    kind ``"expr"`` evaluates an expression tree, ``"tabulated"`` interpolates
    a sampled function of ``u`` and ``"log"`` stores log-coordinate tables
    ``Q_ε(t)`` per sign pattern ε of ``a(u)`` and evaluates

        K(u) = |det A(u)|^{1/2} Q_ε(log|a(u)|) / |J_ε(log|a(u)|)|.
    """

    n: int
    kind: str
    expr: ex.Node | None = None
    table: SampledFunction | None = None
    log_tables: dict = field(default_factory=dict)
    family: MatrixFamily | None = None
    support: tuple = ()
    breaks: tuple = ()
    name: str = "kernel"

    def __post_init__(self):
        if self.kind not in ("expr", "tabulated", "log"):
            raise ModelError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "expr" and self.expr is None:
            raise ModelError("expression kernel without expression")
        if self.kind == "tabulated":
            if self.table is None or self.table.grid.n != self.n:
                raise ModelError("tabulated kernel needs a table of matching dimension")
        if self.kind == "log":
            if self.family is None or not self.log_tables:
                raise ModelError("log kernel needs a family and at least one table")
        if not self.support:
            object.__setattr__(self, "support", self._default_support())
        if not self.breaks:
            object.__setattr__(self, "breaks", self._default_breaks())

    @classmethod
    def from_text(cls, text: str, n: int = 1, support=None, name=None, breaks=None) -> "KernelSpec":
        tree = ex.parse(text, n)
        return cls(n, "expr", expr=tree, support=tuple(map(tuple, support)) if support else (),
                   breaks=tuple(tuple(b) for b in breaks) if breaks else (), name=name or text)

    def _default_support(self):
        if self.kind == "expr":
            return tuple(ex.support_box(self.expr, self.n))
        if self.kind == "tabulated":
            return tuple((a.lo, a.hi) for a in self.table.grid.axes)
        return tuple((-math.inf, math.inf) for _ in range(self.n))

    def _default_breaks(self):
        if self.kind == "expr":
            return tuple(tuple(sorted(ex.breakpoints(self.expr, f"u{k + 1}"))) for k in range(self.n))
        return tuple(() for _ in range(self.n))

    @property
    def is_zero(self) -> bool:
        if self.kind == "expr":
            c = ex.constant_value(self.expr)
            return c == 0.0
        if self.kind == "tabulated":
            return not np.any(self.table.values)
        return all(not np.any(q.values) for q in self.log_tables.values())

    def __call__(self, u) -> np.ndarray:
        """K at points ``u`` of shape ``(..., n)`` (a bare array for n = 1)."""
        u = np.asarray(u, dtype=float)
        if self.n == 1 and (u.ndim == 0 or u.shape[-1] != 1):
            u = u[..., None]
        if self.kind == "expr":
            with np.errstate(all="ignore"):
                v = _broadcast(self.expr.evaluate(_env("u", u)), u.shape[:-1]).astype(float)
            inside = np.ones(u.shape[:-1], dtype=bool)
            for k, (lo, hi) in enumerate(self.support):
                inside &= (u[..., k] >= lo) & (u[..., k] <= hi)
            return np.where(inside & np.isfinite(v), v, 0.0)
        if self.kind == "tabulated":
            return interpolate_many(self.table, u)
        return self._eval_log(u)

    def _eval_log(self, u):
        fam = self.family
        a = fam.eigvals(u)
        out = np.zeros(u.shape[:-1], dtype=complex)
        sgn = np.sign(a)
        with np.errstate(all="ignore"):
            t = np.log(np.abs(a))
        for eps, q in self.log_tables.items():
            mask = np.all(sgn == np.asarray(eps), axis=-1) & np.all(np.isfinite(t), axis=-1)
            if not np.any(mask):
                continue
            tt = t[mask]
            pair = (1, octant_index(eps))
            jac = np.abs(fam.jacobian(pair, tt))
            half_det = np.exp(0.5 * np.sum(tt, axis=-1))
            out[mask] = half_det * interpolate_many(q, tt) / jac
        return out

    def scaled(self, c: float) -> "KernelSpec":
        if self.kind == "expr":
            return replace(self, expr=ex.BinOp("*", ex.Num(float(c)), self.expr), name=f"{c}*{self.name}")
        if self.kind == "tabulated":
            return replace(self, table=self.table * c)
        return replace(self, log_tables={k: q * c for k, q in self.log_tables.items()})

    def to_dict(self) -> dict:
        if self.kind == "expr":
            return {"kind": "expr", "expr": ex.to_text(self.expr),
                    "support": [list(s) for s in self.support]}
        if self.kind == "tabulated":
            return {"kind": "tabulated", "grid": self.table.grid.to_dict()}
        return {"kind": "log", "tables": {",".join(map(str, k)): q.grid.to_dict()
                                           for k, q in self.log_tables.items()}}


def zero_kernel(n: int = 1) -> KernelSpec:
    return KernelSpec(n, "expr", expr=ex.Num(0.0), name="0")


# -- log coordinates ---------------------------------------------------------------


def to_log_coordinates(kernel: KernelSpec, family: MatrixFamily, pair, t_grid: Grid) -> SampledFunction:
    """Samples of K(b_ij(t)) e^{-Σt/2} |J_ij(t)| on ``t_grid``.

    Positive-definite families only have the all-positive pair.
    """
    n = family.n
    if t_grid.n != n or kernel.n != n:
        raise ModelError("dimension mismatch between kernel, family and t-grid")
    if family.positive_definite:
        pair = (1, 1)
    eps = octant_signature(*pair, n)
    if kernel.kind == "log" and kernel.family is family and eps in kernel.log_tables:
        q = kernel.log_tables[eps]
        if q.grid == t_grid:
            return q
        return SampledFunction(t_grid, interpolate_many(q, t_grid.flat_points()))
    if kernel.is_zero:
        return SampledFunction.zeros(t_grid)
    t = t_grid.flat_points()
    b = family.inverse(pair, t)
    jac = np.abs(family.jacobian(pair, t))
    with np.errstate(all="ignore"):
        vals = kernel(b) * np.exp(-0.5 * t.sum(axis=-1)) * jac
    vals = np.where(np.isfinite(vals), vals, 0.0)
    return SampledFunction(t_grid, vals)


def from_log_coordinates(q: SampledFunction | dict, family: MatrixFamily, u_range=None,
                         name: str = "log-kernel") -> KernelSpec:
    """Kernel K with K(b(t)) = e^{Σt/2} Q(t) / |J(t)|.

    ``q`` is a single table (positive-definite families) or a mapping from
    sign patterns ε to tables. ``u_range`` (per-axis ``(lo, hi)``, positive)
    is checked to lie inside the tables' t-range.
    """
    n = family.n
    if isinstance(q, SampledFunction):
        if not family.positive_definite:
            raise ModelError("a single log table needs a positive-definite family")
        tables = {(1,) * n: q}
    else:
        tables = {tuple(k): v for k, v in q.items()}
    for eps, tab in tables.items():
        if tab.grid.n != n:
            raise ModelError("log table dimension does not match the family")
        if any(a.half_line for a in tab.grid.axes):
            raise ModelError("log tables need uniform t-axes")
    if u_range is not None:
        for eps, tab in tables.items():
            corners = np.array(list(itertools.product(*u_range)), dtype=float)
            a = np.abs(family.eigvals(corners))
            with np.errstate(divide="ignore"):
                t = np.log(a)
            for k, axis in enumerate(tab.grid.axes):
                if t[:, k].min() < axis.lo - 1e-12 or t[:, k].max() > axis.hi + 1e-12:
                    raise ModelError(
                        f"t-grid [{axis.lo}, {axis.hi}] does not cover log a(u) for u in {u_range}")
    return KernelSpec(n, "log", log_tables=tables, family=family, name=name)


# -- quadrature nodes ---------------------------------------------------------------


def kernel_nodes(kernel: KernelSpec, family: MatrixFamily, cfg: QuadratureConfig | None = None):
    """Quadrature nodes for ∫ K(u) g(u) du.

    Returns a list of ``(u, kw)`` where ``kw`` holds K(u_m)·w_m. Expression
    kernels use the composite log rule; tabulated kernels their own grid;
    log kernels the trapezoidal rule on their t-grids mapped through b.
    """
    cfg = cfg or QuadratureConfig()
    if kernel.is_zero:
        return []
    if kernel.kind == "log":
        out = []
        for eps, q in kernel.log_tables.items():
            t = q.grid.flat_points()
            pair = (1, octant_index(eps))
            u = family.inverse(pair, t)
            kw = np.exp(0.5 * t.sum(axis=-1)) * q.values.ravel() * q.grid.weights.ravel()
            keep = kw != 0
            out.append((u[keep], kw[keep]))
        return out
    if kernel.kind == "tabulated":
        u = kernel.table.grid.flat_points()
        kw = kernel.table.values.ravel() * kernel.table.grid.weights.ravel()
        keep = kw != 0
        return [(u[keep], kw[keep])]
    breaks = [set(kernel.breaks[k]) | fb for k, fb in enumerate(family.breakpoints())]
    out = []
    for _sign, u, w in log_rule(kernel.support, breaks, cfg):
        kw = kernel(u) * w
        keep = kw != 0
        if np.any(keep):
            out.append((u[keep], kw[keep]))
    return out


# -- admissibility --------------------------------------------------------------------


@dataclass
class AdmissibilityReport:
    admissible: bool
    bound: float
    tail_ratio: float
    tail_estimate: float
    levels: list = field(default_factory=list)  # (T, integral)

    def to_dict(self):
        return {"admissible": self.admissible, "bound": self.bound,
                "tail_ratio": self.tail_ratio, "tail_estimate": self.tail_estimate,
                "levels": [list(x) for x in self.levels]}


def _bound_integral(kernel, family, cfg) -> float:
    total = 0.0
    for u, kw in kernel_nodes(kernel, family, cfg):
        with np.errstate(all="ignore"):
            g = np.abs(kw) * np.abs(family.det(u)) ** -0.5
        if not np.all(np.isfinite(g)):
            return math.inf
        total += float(g.sum())
    return total


def admissibility_check(kernel: KernelSpec, family: MatrixFamily, *, start: float = 7.5,
                        min_truncation: float = 60.0, max_truncation: float | None = None,
                        cfg: QuadratureConfig | None = None, tail_tol: float = 1e-3) -> AdmissibilityReport:
    """Estimate ∫ |det A(u)|^{-1/2} |K(u)| du and decide L²-boundedness.

    The log-coordinate truncation is doubled from ``start`` until the
    relative increment (plus a geometric tail estimate) drops below
    ``tail_tol``. Growing increments mean divergence.
    """
    if kernel.is_zero:
        return AdmissibilityReport(True, 0.0, 0.0, 0.0, [])
    if max_truncation is None:
        max_truncation = 480.0 if kernel.n == 1 else 60.0
    base = cfg or (QuadratureConfig(panel_width=1.0, order=10) if kernel.n == 1
                   else QuadratureConfig(panel_width=1.0, order=6))

    if kernel.kind != "expr":
        # fixed tables: compare the integral over inner halves of the t-range
        total = _bound_integral(kernel, family, base)
        edge = _table_edge_mass(kernel, family)
        ratio = edge / total if total > 0 else 0.0
        ok = math.isfinite(total) and ratio < tail_tol
        return AdmissibilityReport(ok, total, ratio, edge, [(None, total)])

    levels = []
    T = start
    prev_inc = None
    ratio = math.inf
    tail = math.inf
    while True:
        val = _bound_integral(kernel, family, base.with_truncation(T))
        levels.append((T, val))
        if not math.isfinite(val):
            break
        if len(levels) >= 2:
            inc = val - levels[-2][1]
            tail = inc
            if prev_inc is not None and prev_inc > 0:
                r = inc / prev_inc
                if r >= 1.0:
                    ratio = math.inf
                    break
                tail = inc * r / (1.0 - r)
            ratio = (abs(inc) + abs(tail)) / val if val > 0 else 0.0
            prev_inc = inc
            if T >= min_truncation and ratio < tail_tol:
                break
        if 2 * T > max_truncation:
            break
        T *= 2
    bound = levels[-1][1]
    ok = math.isfinite(bound) and ratio < tail_tol
    return AdmissibilityReport(ok, bound, ratio, tail if math.isfinite(tail) else math.inf, levels)


def _table_edge_mass(kernel, family) -> float:
    """Mass of the bound integrand on the outer eighth of each table."""
    edge = 0.0
    for u, kw in kernel_nodes(kernel, family):
        g = np.abs(kw) * np.abs(family.det(u)) ** -0.5
        if kernel.kind == "log":
            t = np.log(np.abs(family.eigvals(u)))
            span = np.abs(t).max(axis=0)
            outer = np.any(np.abs(t) > 0.875 * span, axis=-1)
        else:
            lo, hi = u.min(axis=0), u.max(axis=0)
            d = hi - lo
            outer = np.any((u < lo + d / 16) | (u > hi - d / 16), axis=-1)
        edge += float(g[outer].sum())
    return edge


# -- family checks -------------------------------------------------------------------


def check_family(family: MatrixFamily, kernel: KernelSpec | None = None, *, samples: int = 41,
                 t_span: float = 10.0, tol: float = 1e-10) -> list[str]:
    """Problems with ``family`` on sampled points (empty list when consistent).

    Checks |a_k(b_ij(t))| = e^{t_k}, b_ij(t) ∈ Ω_ij, and positivity of a(u)
    on the kernel support for positive-definite families.
    """
    n = family.n
    problems = []
    axis = np.linspace(-t_span, t_span, samples)
    t = np.stack([m.ravel() for m in np.meshgrid(*[axis] * n, indexing="ij")], axis=-1)
    for pair in sorted(family.inverse_maps):
        b = family.inverse(pair, t)
        a = family.eigvals(b)
        err = np.max(np.abs(np.abs(a) - np.exp(t)) / np.exp(t))
        if not err <= tol:
            problems.append(f"pair {pair}: |a(b(t))| differs from e^t by {err:.2e}")
        eps = np.asarray(octant_signature(*pair, n))
        if not np.all(np.sign(a) == eps):
            problems.append(f"pair {pair}: b(t) leaves Omega_{pair}")
        jac = family.jacobian(pair, t)
        if not np.all(np.isfinite(jac)) or np.any(jac == 0):
            problems.append(f"pair {pair}: Jacobian vanishes or is not finite")
    if family.positive_definite:
        box = kernel.support if kernel is not None else [(-math.inf, math.inf)] * n
        pts = []
        for lo, hi in box:
            lo = max(lo, 0.0) if lo > -math.inf else -1e3
            hi = hi if hi < math.inf else 1e3
            g = np.linspace(lo, hi, samples + 2)[1:-1]
            pts.append(g)
        u = np.stack([m.ravel() for m in np.meshgrid(*pts, indexing="ij")], axis=-1)
        if kernel is not None:
            u = u[np.abs(kernel(u)) > 0]
        if len(u) and np.any(family.eigvals(u) <= 0):
            problems.append("positive_definite family has non-positive eigenvalues on the kernel support")
    return problems
