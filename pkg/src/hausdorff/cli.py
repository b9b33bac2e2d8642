"""Command-line interface.

Every subcommand writes its CSV (or JSON) output plus a run manifest
``<out>.manifest.json`` of the form ``{command, config, warnings, timing_ms}``.
Exit status is 0 on success, 2 on usage errors (bad flags, unknown presets,
malformed files) and 1 when a numerical precondition fails; errors are a
single ``error: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import calculus, symbol
from .formats import ConfigError, load_definition, read_csv, resolve_preset, write_csv, write_json
from .grid import EvalContext, Grid, GridError, SampledFunction
from .model import ModelError
from .operator import OperatorError, OperatorSpec, apply, apply_iterated
from .presets import PRESETS
from .quadrature import QuadratureConfig
from .verify import SUITES, VerifyError, run_suite

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _source_flags(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", help=f"one of: {', '.join(PRESETS)}")
    g.add_argument("--config", help="kernel/family definition JSON")
    p.add_argument("--alpha", type=float, default=None, help="Boyd exponent for boyd presets (default 0.25)")
    p.add_argument("--l", type=int, default=None, help="power for boyd-power / power / apply")
    p.add_argument("--truncation", type=float, default=None, help="u-integration truncation T")
    p.add_argument("--no-check", action="store_true", help="skip the admissibility check")


def _s_flags(p, lo=-20.0, hi=20.0, count=4001):
    p.add_argument("--s-min", type=float, default=lo)
    p.add_argument("--s-max", type=float, default=hi)
    p.add_argument("--s-count", type=int, default=count)


def _t_flags(p):
    p.add_argument("--t-min", type=float, default=None, help="log-coordinate grid (default [-60, 60] in 1-D)")
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--t-count", type=int, default=None, help="default 48001 in 1-D, 401 per axis in 2-D")
    p.add_argument("--decay-tol", type=float, default=1e-2)


def _u_flags(p):
    p.add_argument("--u-min", type=float, default=math.exp(-10))
    p.add_argument("--u-max", type=float, default=math.exp(10))
    p.add_argument("--u-count", type=int, default=2001)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hausdorff", description="Symbol calculus for Hausdorff operators.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("symbol", help="scalar symbol on an s-grid")
    _source_flags(p)
    _s_flags(p)
    p.add_argument("--method", choices=["direct", "log-fourier"], default="direct")
    p.add_argument("--out", help="output CSV (stdout when omitted, without a manifest)")

    p = sub.add_parser("matrix-symbol", help="matrix symbol, one CSV per entry")
    _source_flags(p)
    _s_flags(p)
    p.add_argument("--method", choices=["direct", "log-fourier"], default="direct")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("apply", help="apply the operator (l times) to sampled data")
    _source_flags(p)
    p.add_argument("--input", help="function CSV; otherwise a Gaussian on the x-grid")
    p.add_argument("--gaussian", default="0,1", help="centre,width (in log x on half-line grids)")
    p.add_argument("--x-min", type=float, default=-10.0)
    p.add_argument("--x-max", type=float, default=10.0)
    p.add_argument("--x-count", type=int, default=2001)
    p.add_argument("--half-line", action="store_true", help="log-uniform x-grid on (0, inf)")
    p.add_argument("--max-lost", type=float, default=0.1)
    p.add_argument("--out", help="output CSV (stdout when omitted, without a manifest)")

    for name, helptext in (("power", "kernel of the l-th power"), ("function", "kernel of F(H)"),
                           ("fracpow", "kernel of a real power")):
        p = sub.add_parser(name, help=helptext)
        _source_flags(p)
        _t_flags(p)
        _u_flags(p)
        if name == "function":
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--poly", help="coefficients c0,c1,... of F(z) = sum c_k z^k (c0 must be 0)")
            g.add_argument("--expm1", action="store_true", help="F(z) = exp(z) - 1")
        if name == "fracpow":
            p.add_argument("--power", type=float, required=True, help="exponent > 0")
            p.add_argument("--closed-form", action="store_true",
                           help="Calderon only: evaluate the Macdonald-function closed form")
        p.add_argument("--out", help="output CSV (stdout when omitted, without a manifest)")

    p = sub.add_parser("spectrum", help="sampled symbol range and its hull")
    _source_flags(p)
    _s_flags(p)
    p.add_argument("--decay-tol", type=float, default=1e-3)
    p.add_argument("--out", help="output CSV (stdout when omitted, without a manifest)")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, help=f"one of: {', '.join(SUITES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report JSON path")
    return ap


# -- helpers --------------------------------------------------------------------------


def _operator(args) -> OperatorSpec:
    if args.preset is not None:
        params = {}
        if args.preset.startswith("boyd"):
            params["alpha"] = 0.25 if args.alpha is None else args.alpha
        if args.preset == "boyd-power":
            params["l"] = 2 if args.l is None else args.l
        kernel, family = resolve_preset(args.preset, **params)
    else:
        kernel, family = load_definition(args.config)
    cfg = QuadratureConfig()
    if args.truncation is not None:
        cfg = cfg.with_truncation(args.truncation)
    return OperatorSpec(kernel, family, quadrature=cfg, check=not args.no_check)


def _s_grid(args, n) -> Grid:
    axis = Grid.uniform(args.s_min, args.s_max, args.s_count).axes[0]
    return Grid((axis,) * n)


def _t_grid(args, n) -> Grid:
    d = calculus.default_calculus_t_grid(n).axes[0]
    lo = d.lo if args.t_min is None else args.t_min
    hi = d.hi if args.t_max is None else args.t_max
    count = d.count if args.t_count is None else args.t_count
    axis = Grid.uniform(lo, hi, count).axes[0]
    return Grid((axis,) * n)


def _u_table(kernel, args, n) -> SampledFunction:
    axis = Grid.half_line(args.u_min, args.u_max, args.u_count).axes[0]
    grid = Grid((axis,) * n)
    return SampledFunction(grid, kernel(grid.flat_points()).reshape(grid.shape))


def _manifest_path(out: str) -> str:
    return out + ".manifest.json"


def _config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "command"}


# -- commands -------------------------------------------------------------------------


def _cmd_symbol(args, notes):
    op = _operator(args)
    phi = symbol.scalar_symbol(op, _s_grid(args, op.n), method=args.method)
    write_csv(phi, args.out or sys.stdout)
    return {"n": op.n}


def _cmd_matrix_symbol(args, notes):
    op = _operator(args)
    phi = symbol.matrix_symbol(op, _s_grid(args, op.n), method=args.method)
    os.makedirs(args.out, exist_ok=True)
    files = {}
    for (i, j), f in sorted(phi.entries.items()):
        name = f"phi_{i}_{j}.csv"
        write_csv(f, os.path.join(args.out, name))
        files[f"{i},{j}"] = name
    return {"n": op.n, "entries": files, "symmetric": phi.is_symmetric(),
            "symbol_norm": symbol.symbol_norm(phi)}


def _cmd_apply(args, notes):
    op = _operator(args)
    if args.input:
        f = read_csv(args.input)
    else:
        try:
            c, w = (float(x) for x in args.gaussian.split(","))
        except ValueError:
            raise UsageError("--gaussian expects centre,width") from None
        grid = (Grid.half_line(args.x_min, args.x_max, args.x_count) if args.half_line
                else Grid.uniform(args.x_min, args.x_max, args.x_count))
        grid = Grid(grid.axes * op.n)

        def fn(*xs):
            v = 1.0
            for x in xs:
                y = np.log(x) if args.half_line else x
                v = v * np.exp(-0.5 * ((y - c) / w) ** 2)
            return v

        f = SampledFunction.from_callable(grid, fn)
    ctx = EvalContext()
    l = 1 if args.l is None else args.l
    g = apply_iterated(op, l, f, ctx=ctx) if l > 1 else apply(op, f, ctx=ctx, max_lost=args.max_lost)
    write_csv(g, args.out or sys.stdout)
    if ctx.out_of_domain:
        notes.append(f"{ctx.out_of_domain} of {ctx.evaluations} evaluations fell outside the input grid")
    return {"lost_mass": ctx.history, "l": l}


def _write_kernel(kernel, args, n):
    write_csv(_u_table(kernel, args, n), args.out or sys.stdout)


def _cmd_power(args, notes):
    op = _operator(args)
    l = 2 if args.l is None else args.l
    k = calculus.holomorphic_kernel(op, calculus.HoloFunctionSpec.power(l), _t_grid(args, op.n), args.decay_tol)
    _write_kernel(k, args, op.n)
    return {"l": l}


def _cmd_function(args, notes):
    op = _operator(args)
    if args.expm1:
        F = calculus.HoloFunctionSpec.expm1()
    else:
        try:
            coeffs = [complex(x) for x in args.poly.split(",")]
        except ValueError:
            raise UsageError("--poly expects comma-separated numbers") from None
        F = calculus.HoloFunctionSpec.polynomial(coeffs)
    k = calculus.holomorphic_kernel(op, F, _t_grid(args, op.n), args.decay_tol)
    _write_kernel(k, args, op.n)
    return {"F": F.name}


def _cmd_fracpow(args, notes):
    op = _operator(args)
    if args.closed_form:
        if args.preset != "calderon":
            raise UsageError("--closed-form is only available for the calderon preset")
        axis = Grid.half_line(args.u_min, args.u_max, args.u_count)
        vals = calculus.calderon_fractional_kernel(args.power, axis.axes[0].points)
        if not np.all(np.isfinite(vals)):
            raise OperatorError("closed form is singular at u = 1 for this power; exclude u = 1 from the grid")
        write_csv(SampledFunction(axis, vals), args.out or sys.stdout)
        return {"power": args.power, "route": "closed-form"}
    k = calculus.fractional_kernel(op, args.power, _t_grid(args, op.n), args.decay_tol)
    _write_kernel(k, args, op.n)
    return {"power": args.power, "route": "pipeline"}


def _cmd_spectrum(args, notes):
    op = _operator(args)
    phi = symbol.scalar_symbol(op, _s_grid(args, op.n))
    est = symbol.spectrum_estimate(phi, decay_tol=args.decay_tol)
    notes.extend(est.warnings)
    write_csv(phi, args.out or sys.stdout)
    print(json.dumps({"interval": est.interval}), file=sys.stderr if not args.out else sys.stdout)
    return est.to_dict()


def _cmd_verify(args, notes):
    rep = run_suite(args.suite, seed=args.seed)
    text = rep.to_json(indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    print(text)
    if not rep.passed:
        raise _SuiteFailed(f"suite {args.suite} failed")
    return {"pass": rep.passed}


class _SuiteFailed(Exception):
    pass


_COMMANDS = {
    "symbol": _cmd_symbol,
    "matrix-symbol": _cmd_matrix_symbol,
    "apply": _cmd_apply,
    "power": _cmd_power,
    "function": _cmd_function,
    "fracpow": _cmd_fracpow,
    "spectrum": _cmd_spectrum,
    "verify": _cmd_verify,
}


def _one_line(msg) -> str:
    return " ".join(str(msg).split())


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return 2
    notes: list[str] = []
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            info = _COMMANDS[args.command](args, notes)
        notes.extend(str(w.message) for w in caught)
    except (UsageError, ConfigError, VerifyError) as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return 2
    except _SuiteFailed as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return 1
    except (OperatorError, ModelError, GridError, ValueError) as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return 1
    elapsed = (time.perf_counter() - start) * 1000.0
    out = args.out
    if out:
        path = os.path.join(out, "manifest.json") if args.command == "matrix-symbol" else _manifest_path(out)
        write_json({"command": args.command, "config": _config_of(args), "result": info,
                    "warnings": notes, "timing_ms": round(elapsed, 3)}, path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
