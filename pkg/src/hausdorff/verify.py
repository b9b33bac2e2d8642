"""Named verification suites.

Each suite compares a calculus identity with an independent oracle (direct
operator application, closed forms or reference special-function values)
and returns a :class:`VerificationReport`. Random test functions are
Gaussians with seeded centres in [-3, 3] and widths in [0.3, 2]; on
half-line grids they are Gaussians in log x.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import (
    HoloFunctionSpec,
    boyd_power_kernel,
    boyd_symbol,
    calderon_fractional_kernel,
    fractional_kernel,
    holomorphic_kernel,
    product_kernel,
)
from .grid import Grid, SampledFunction, fourier_forward, norm_l2, rel_l2, rel_linf
from .model import octant_signature, to_log_coordinates
from .operator import OperatorSpec, apply, apply_iterated
from .presets import family_preset, kernel_preset, preset
from .quadrature import panel_rule
from .specfun import bessel_k_real, gamma_real
from .symbol import default_s_grid, matrix_symbol, scalar_symbol, symbol_norm

__all__ = ["Check", "VerificationReport", "SUITES", "run_suite", "gaussians", "VerifyError"]


class VerifyError(ValueError):
    pass


@dataclass
class Check:
    name: str
    error: float
    tol: float
    passed: bool
    note: str = ""

    def to_dict(self):
        d = {"name": self.name, "error": _json_float(self.error), "tol": self.tol, "pass": self.passed}
        if self.note:
            d["note"] = self.note
        return d


def _json_float(x):
    return x if math.isfinite(x) else str(x)


@dataclass
class VerificationReport:
    suite: str
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def max_error(self) -> float:
        return max((c.error for c in self.checks), default=0.0)

    def add(self, name, error, tol, note=""):
        error = float(error)
        self.checks.append(Check(name, error, tol, bool(error <= tol), note))

    def fail(self, name, exc, tol=0.0):
        self.checks.append(Check(name, math.inf, tol, False, f"{type(exc).__name__}: {exc}"))

    def to_dict(self):
        return {"suite": self.suite, "seed": self.seed,
                "checks": [c.to_dict() for c in self.checks], "pass": self.passed}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def gaussians(grid: Grid, count: int, rng: np.random.Generator) -> list[SampledFunction]:
    """Seeded Gaussian test functions on ``grid`` (in log x on half-line axes)."""
    out = []
    for _ in range(count):
        factors = []
        for axis in grid.axes:
            factors.append((rng.uniform(-3, 3), rng.uniform(0.3, 2.0), axis.half_line))

        def fn(*x, factors=factors):
            v = 1.0
            for xi, (c, w, half) in zip(x, factors):
                y = np.log(xi) if half else xi
                v = v * np.exp(-0.5 * ((y - c) / w) ** 2)
            return v

        out.append(SampledFunction.from_callable(grid, fn))
    return out


def _op(name, family=None, **params) -> OperatorSpec:
    if family is None:
        k, fam = preset(name, **params)
    else:
        k, fam = kernel_preset(name, **params), family_preset(family)
    return OperatorSpec(k, fam)


def _full_line(count=2001, half_width=10.0) -> Grid:
    return Grid.uniform(-half_width, half_width, count)


def _half_line(count=2001, span=30.0) -> Grid:
    return Grid.half_line(math.exp(-span), math.exp(span), count)


def _coarse_t() -> Grid:
    return Grid.uniform(-40.0, 40.0, 8001)


# -- suites -------------------------------------------------------------------------------


def _two_route(rep: VerificationReport, tol: float = 1e-6, **_):
    s_grid = default_s_grid()
    cases = [("cesaro", {}), ("boyd", {"alpha": 0.25}), ("boyd-power", {"alpha": 0.0, "l": 2}), ("calderon", {})]
    for name, params in cases:
        label = f"{name}{params or ''}"
        try:
            op = _op(name, **params)
            d = scalar_symbol(op, s_grid, method="direct")
            lf = scalar_symbol(op, s_grid, method="log-fourier")
            rep.add(f"direct vs log-fourier, {label}", rel_linf(lf, d), tol)
        except Exception as exc:  # noqa: BLE001
            rep.fail(label, exc, tol)


def _symbol_of_log_tables(kernel, family, s_grid, t_grid=None) -> np.ndarray:
    """Matrix symbol by the log-Fourier route, as an array (..., m, m)."""
    n = family.n
    m = 2**n
    if kernel.kind == "log":
        tables = kernel.log_tables
    else:
        tables = {}
        for j in range(1, m + 1):
            eps = octant_signature(1, j, n)
            if family.has_pair(1, j) and (not family.positive_definite or eps == (1,) * n):
                tables[eps] = to_log_coordinates(kernel, family, (1, j), t_grid)
    by_eps = {eps: fourier_forward(q, s_grid, decay_tol=None).values for eps, q in tables.items()}
    out = np.zeros(s_grid.shape + (m, m), dtype=complex)
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            eps = octant_signature(i, j, n)
            if eps in by_eps:
                out[..., i - 1, j - 1] = by_eps[eps]
    return out


def _multiplicativity(rep: VerificationReport, tol: float = 1e-6, op_tol: float = 1e-3, seed: int = 0,
                      operator_checks: bool = True, **_):
    s1 = default_s_grid()
    t1 = Grid.uniform(-60.0, 60.0, 12001)
    pairs = [
        ("cesaro", {}, "cesaro", {}, "dilation-pd"),
        ("cesaro", {}, "boyd", {"alpha": 0.25}, "dilation-pd"),
        ("boyd", {"alpha": 0.25}, "boyd", {"alpha": 0.25}, "dilation-pd"),
        ("boyd-power", {"alpha": 0.0, "l": 2}, "boyd", {"alpha": -0.5}, "dilation-pd"),
        ("calderon", {}, "calderon", {}, "inversion-pd"),
        ("neg-box", {}, "neg-box", {}, "dilation"),
        ("neg-box", {}, "cesaro", {}, "dilation"),
    ]
    for a, pa, b, pb, fam_name in pairs:
        label = f"{a}{pa or ''} x {b}{pb or ''} [{fam_name}]"
        try:
            fam = family_preset(fam_name)
            ka, kb = kernel_preset(a, **pa), kernel_preset(b, **pb)
            prod = product_kernel(ka, kb, fam, t_grid=t1)
            lhs = _symbol_of_log_tables(prod, fam, s1)
            rhs = _symbol_of_log_tables(ka, fam, s1, t1) @ _symbol_of_log_tables(kb, fam, s1, t1)
            rep.add(f"symbol of product, {label}", np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)), tol)
        except Exception as exc:  # noqa: BLE001
            rep.fail(label, exc, tol)
    # independent closed form: P_a P_b has symbol 1/((1/2-a)-is) · 1/((1/2-b)-is)
    for a, b in [(0.25, 0.25), (0.0, 0.25)]:
        try:
            fam = family_preset("dilation-pd")
            prod = product_kernel(kernel_preset("boyd", alpha=a), kernel_preset("boyd", alpha=b), fam,
                                  t_grid=Grid.uniform(-60.0, 60.0, 48001))
            got = scalar_symbol(OperatorSpec(prod, fam), s1, method="log-fourier").values
            s = s1.axes[0].points
            ref = boyd_symbol(a, s) * boyd_symbol(b, s)
            rep.add(f"product symbol vs closed form, boyd {a} x boyd {b}",
                    np.max(np.abs(got - ref)) / np.max(np.abs(ref)), 1e-4)
        except Exception as exc:  # noqa: BLE001
            rep.fail(f"boyd {a} x boyd {b} closed form", exc, 1e-4)
    # two dimensions: diagonal family, Gaussian kernel squared
    try:
        fam = family_preset("diag-2d")
        k = kernel_preset("dilation-diag-2d")
        ax = Grid.uniform(-40.0, 10.0, 501).axes[0]
        t2 = Grid.product(ax, ax)
        sax = Grid.uniform(-10.0, 10.0, 41).axes[0]
        s2 = Grid.product(sax, sax)
        prod = product_kernel(k, k, fam, t_grid=t2)
        lhs = _symbol_of_log_tables(prod, fam, s2)
        one = _symbol_of_log_tables(k, fam, s2, t2)
        rep.add("symbol of product, dilation-diag-2d squared",
                np.max(np.abs(lhs - one @ one)) / np.max(np.abs(one @ one)), tol)
    except Exception as exc:  # noqa: BLE001
        rep.fail("dilation-diag-2d squared", exc, tol)
    if not operator_checks:
        return
    rng = np.random.default_rng(seed)
    t_op = _coarse_t()
    op_pairs = [
        ("cesaro", {}, "boyd", {"alpha": 0.25}, "dilation-pd", _half_line()),
        ("calderon", {}, "calderon", {}, "inversion-pd", _half_line()),
        ("neg-box", {}, "cesaro", {}, "dilation", _full_line()),
    ]
    for a, pa, b, pb, fam_name, grid in op_pairs:
        label = f"{a} x {b} [{fam_name}]"
        try:
            fam = family_preset(fam_name)
            oa = OperatorSpec(kernel_preset(a, **pa), fam)
            ob = OperatorSpec(kernel_preset(b, **pb), fam)
            op = OperatorSpec(product_kernel(oa, ob, t_grid=t_op), fam)
            errs = [rel_l2(apply(op, f), apply(oa, apply(ob, f))) for f in gaussians(grid, 3, rng)]
            rep.add(f"operator of product, {label}", max(errs), op_tol)
        except Exception as exc:  # noqa: BLE001
            rep.fail(f"operator of product, {label}", exc, op_tol)


def _commutativity(rep: VerificationReport, tol: float = 1e-3, seed: int = 0, **_):
    rng = np.random.default_rng(seed)
    cases = [
        ("cesaro", {}, "boyd", {"alpha": 0.25}, "dilation-pd", _full_line()),
        ("boyd", {"alpha": 0.25}, "boyd-power", {"alpha": 0.0, "l": 2}, "dilation-pd", _full_line()),
        ("neg-box", {}, "cesaro", {}, "dilation", _full_line()),
        ("calderon", {}, "calderon^0.5", {}, "inversion-pd", _half_line()),
    ]
    for a, pa, b, pb, fam_name, grid in cases:
        label = f"{a}{pa or ''} with {b}{pb or ''}"
        try:
            fam = family_preset(fam_name)
            oa = OperatorSpec(kernel_preset(a, **pa), fam)
            if b == "calderon^0.5":
                ob = OperatorSpec(fractional_kernel(oa, 0.5, t_grid=_coarse_t()), fam)
            else:
                ob = OperatorSpec(kernel_preset(b, **pb), fam)
            errs = [rel_l2(apply(oa, apply(ob, f)), apply(ob, apply(oa, f))) for f in gaussians(grid, 3, rng)]
            rep.add(f"AB = BA, {label}", max(errs), tol)
        except Exception as exc:  # noqa: BLE001
            rep.fail(label, exc, tol)


def _boyd_power(rep: VerificationReport, tol: float = 1e-3, seed: int = 0, alpha=None, l=None,
                grid_count: int = 4096, **_):
    cases = [(0.0, 2), (0.0, 3), (0.25, 2)]
    if alpha is not None:
        cases = [c for c in cases if c[0] == float(alpha)] or [(float(alpha), int(l or 2))]
    if l is not None:
        cases = [c for c in cases if c[1] == int(l)] or [(float(alpha or 0.0), int(l))]
    grid = _full_line(grid_count)
    fam = family_preset("dilation-pd")
    for a, ll in cases:
        rng = np.random.default_rng(seed)
        label = f"alpha={a}, l={ll}"
        try:
            base = OperatorSpec(kernel_preset("boyd", alpha=a), fam)
            power = OperatorSpec(boyd_power_kernel(a, ll), fam)
            errs = [rel_l2(apply(power, f), apply_iterated(base, ll, f)) for f in gaussians(grid, 3, rng)]
            rep.add(f"P^l by iteration vs power kernel, {label}", max(errs), tol)
        except Exception as exc:  # noqa: BLE001
            rep.fail(label, exc, tol)
        try:
            kf = holomorphic_kernel(base, HoloFunctionSpec.power(ll))
            u = np.linspace(1e-3, 1 - 1e-3, 999)
            ref = boyd_power_kernel(a, ll)(u)
            err = np.max(np.abs(kf(u) - ref)) / np.max(np.abs(ref))
            rep.add(f"kernel of z^l vs power kernel, {label}", err, tol)
        except Exception as exc:  # noqa: BLE001
            rep.fail(f"kernel of z^l, {label}", exc, tol)


def _calderon_alpha1(rep: VerificationReport, tol: float = 1e-8, pipeline_tol: float = 1e-6, **_):
    u = np.logspace(-2, 2, 200)
    exact = 1.0 / (u * np.maximum(1.0, u))
    rep.add("closed-form K_1 vs 1/(u max(1,u))",
            np.max(np.abs(calderon_fractional_kernel(1.0, u) - exact) / exact), tol)
    try:
        op = _op("calderon")
        k1 = fractional_kernel(op, 1.0)
        uu = np.array([0.5, 2.0])
        rep.add("fractional_kernel(calderon, 1) at u = 0.5, 2",
                np.max(np.abs(k1(uu) - 1.0 / (uu * np.maximum(1.0, uu)))), pipeline_tol)
    except Exception as exc:  # noqa: BLE001
        rep.fail("fractional_kernel(calderon, 1)", exc, pipeline_tol)


def _frac_semigroup(rep: VerificationReport, tol: float = 1e-2, seed: int = 0, **_):
    rng = np.random.default_rng(seed)
    grid = _half_line(2001)
    fs = gaussians(grid, 3, rng)
    try:
        cal = _op("calderon")
        fam = cal.family
        t = _coarse_t()
        half = OperatorSpec(fractional_kernel(cal, 0.5, t_grid=t), fam)
        one = OperatorSpec(fractional_kernel(cal, 1.0, t_grid=t), fam)
        threehalf = OperatorSpec(fractional_kernel(cal, 1.5, t_grid=t), fam)
        two = OperatorSpec(fractional_kernel(cal, 2.0, t_grid=t), fam)
        hf = [apply(half, f) for f in fs]
        cf = [apply(cal, f) for f in fs]
        rep.add("K_0.5 twice vs Calderon operator",
                max(rel_l2(apply(half, h), c) for h, c in zip(hf, cf)), tol)
        rep.add("K_0.5 then K_1 vs K_1.5",
                max(rel_l2(apply(one, h), apply(threehalf, f)) for h, f in zip(hf, fs)), tol)
        rep.add("K_1 twice vs K_2",
                max(rel_l2(apply(one, apply(one, f)), apply(two, f)) for f in fs), tol)
    except Exception as exc:  # noqa: BLE001
        rep.fail("fractional semigroup", exc, tol)


def _norm_bound(rep: VerificationReport, tol: float = 1e-6, seed: int = 0, count: int = 100,
                attain: float = 0.5, **_):
    cases = [("cesaro", {}, _half_line(1201)), ("boyd", {"alpha": 0.25}, _half_line(1201)),
             ("calderon", {}, _half_line(1201)), ("neg-box", {}, _full_line(1201))]
    for name, params, grid in cases:
        rng = np.random.default_rng(seed)
        try:
            op = _op(name, **params)
            if op.family.positive_definite:
                norm = symbol_norm(scalar_symbol(op))
            else:
                norm = symbol_norm(matrix_symbol(op))
            worst, best = 0.0, 0.0
            for f in gaussians(grid, count, rng):
                ratio = norm_l2(apply(op, f)) / norm_l2(f)
                worst = max(worst, ratio / norm - 1.0)
                best = max(best, ratio)
            rep.add(f"||Hf|| <= (1+tol) ||Phi|| ||f||, {name}", max(worst, 0.0), tol,
                    note=f"symbol norm {norm:.8g}, max ratio {best:.6g}")
            if name == "cesaro":
                rep.add("near-attainment, cesaro", max(0.0, attain - best / norm), 0.0,
                        note=f"max ratio / norm = {best / norm:.4f}")
        except Exception as exc:  # noqa: BLE001
            rep.fail(name, exc, tol)


def balakrishnan_integral(x: float, alpha: float, m: int = 2) -> float:
    """Γ(m)/(Γ(α)Γ(m-α)) ∫₀^∞ t^{α-1} (x/(t+x))^m dt, by Gauss-Legendre in log t."""
    c = gamma_real(m) / (gamma_real(alpha) * gamma_real(m - alpha))
    lx = math.log(x)
    lo = lx - 40.0 / alpha
    hi = lx + 40.0 / (m - alpha)
    v, w = panel_rule(lo, hi, [lx], 0.25, 20)
    tt = np.exp(v)
    integrand = tt**alpha * (x / (tt + x)) ** m
    return c * float(integrand @ w)


def _balakrishnan(rep: VerificationReport, tol: float = 1e-6, m: int = 2, points: int = 50, **_):
    s = np.linspace(0.0, 20.0, points)
    xs = 1.0 / (s**2 + 0.25)
    for alpha in (0.5, 1.5):
        err = max(abs(balakrishnan_integral(x, alpha, m) - x**alpha) / x**alpha for x in xs)
        rep.add(f"Balakrishnan m={m}, alpha={alpha}, {points} points of the Calderon range", err, tol)


# frozen reference values
_K0_1 = 0.42102443824070834
_SQRT_PI = 1.7724538509055160


def _specfun(rep: VerificationReport, **_):
    z = np.linspace(0.1, 20.0, 400)
    closed = np.sqrt(np.pi / (2 * z)) * np.exp(-z)
    rep.add("K_1/2 vs closed form on [0.1, 20]", np.max(np.abs(bessel_k_real(0.5, z) - closed) / closed), 1e-9)
    xs = np.arange(1, 50) / 10.0
    rep.add("gamma recurrence on 0.1..4.9",
            max(abs(gamma_real(x + 1) - x * gamma_real(x)) / gamma_real(x + 1) for x in xs), 1e-12)
    nus = np.linspace(-2.0, 4.0, 13)
    zs = np.array([0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0])
    nn, zz = np.meshgrid(nus, zs)
    lhs = bessel_k_real(nn + 1, zz)
    rhs = bessel_k_real(nn - 1, zz) + 2 * nn / zz * bessel_k_real(nn, zz)
    rep.add("Bessel recurrence", np.max(np.abs(lhs - rhs) / np.abs(lhs)), 1e-8)
    rep.add("gamma(1/2) = sqrt(pi)", abs(gamma_real(0.5) - _SQRT_PI), 1e-10)
    rep.add("K_0(1) reference", abs(bessel_k_real(0.0, 1.0) - _K0_1), 1e-8)


SUITES = {
    "two-route-symbol": _two_route,
    "multiplicativity": _multiplicativity,
    "commutativity": _commutativity,
    "boyd-power": _boyd_power,
    "calderon-alpha1": _calderon_alpha1,
    "frac-semigroup": _frac_semigroup,
    "norm-bound": _norm_bound,
    "balakrishnan-pointwise": _balakrishnan,
    "specfun-reference": _specfun,
}


def run_suite(name: str, seed: int = 0, **overrides) -> VerificationReport:
    """Run a registered suite; failures inside become failed checks."""
    if name not in SUITES:
        raise VerifyError(f"unknown suite: {name}")
    rep = VerificationReport(name, seed)
    try:
        SUITES[name](rep, seed=seed, **overrides)
    except Exception as exc:  # noqa: BLE001
        rep.fail(name, exc)
    return rep
