"""CSV and JSON formats.

SampledFunction CSV: header ``coord1[,coord2],re,im`` then one row per grid
point in C order, numbers written with 17 significant digits, LF endings.

Kernel/family definition JSON::

    {"n": 1,
     "kernel": {"kind": "preset", "preset": "boyd", "params": {"alpha": 0.25}}
             | {"kind": "expr", "expr": "chi(0,1)(u)"}
             | {"kind": "tabulated", "path": "k.csv"},
     "family": {"preset": "dilation-pd"}
             | {"a": [...], "b": {"i,j": [...]}, "jac": {"i,j": "..."},
                "positive_definite": true}}
"""

from __future__ import annotations

import csv
import json
import math
import os

import numpy as np

from .grid import Axis, Grid, GridError, SampledFunction
from .model import KernelSpec, MatrixFamily, ModelError
from .presets import FAMILIES, PRESETS, family_preset, preset

__all__ = ["ConfigError", "write_csv", "read_csv", "load_definition", "resolve_preset", "write_json"]


class ConfigError(ValueError):
    """Malformed or unknown user input (files, presets)."""


def write_csv(f: SampledFunction, path) -> None:
    """Write ``f`` to a path or an open text stream."""
    n = f.grid.n
    header = [f"coord{k + 1}" for k in range(n)] + ["re", "im"]
    rows = np.column_stack([f.grid.flat_points(), f.values.real.ravel(), f.values.imag.ravel()])
    lines = [",".join(header)] + [",".join(f"{x:.17g}" for x in r) for r in rows]
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _axis_from_coords(c: np.ndarray) -> Axis:
    c = np.unique(c)
    if len(c) < 2:
        raise ConfigError("a grid axis needs at least two distinct coordinates")
    d = np.diff(c)
    if np.allclose(d, d.mean(), rtol=1e-6, atol=0):
        return Axis(float(c[0]), float(c[-1]), len(c))
    if c[0] > 0:
        ld = np.diff(np.log(c))
        if np.allclose(ld, ld.mean(), rtol=1e-6, atol=0):
            return Axis(float(c[0]), float(c[-1]), len(c), half_line=True)
    raise ConfigError("CSV coordinates are neither uniform nor log-uniform")


def read_csv(path) -> SampledFunction:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise ConfigError(f"{path} is empty")
    head = [h.strip() for h in rows[0]]
    n = len(head) - 2
    if n not in (1, 2) or head != [f"coord{k + 1}" for k in range(n)] + ["re", "im"]:
        raise ConfigError(f"{path}: header must be coord1[,coord2],re,im")
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != n + 2:
        raise ConfigError(f"{path}: ragged rows")
    grid = Grid(tuple(_axis_from_coords(data[:, k]) for k in range(n)))
    if grid.size != len(data):
        raise ConfigError(f"{path}: rows do not form a full rectangular grid")
    order = np.lexsort(tuple(data[:, k] for k in reversed(range(n))))
    data = data[order]
    try:
        return SampledFunction(grid, data[:, n] + 1j * data[:, n + 1])
    except GridError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def write_json(obj, path) -> None:
    """Strict JSON: numpy scalars and arrays become plain values, ±inf and nan strings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if x is None or isinstance(x, (str, int, float, bool)):
        return x
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


def _family_from(obj) -> MatrixFamily:
    if isinstance(obj, str):
        obj = {"preset": obj}
    if not isinstance(obj, dict):
        raise ConfigError("family must be an object or a preset name")
    if "preset" in obj:
        if obj["preset"] not in FAMILIES:
            raise ConfigError(f"unknown family preset: {obj['preset']}")
        return family_preset(obj["preset"])
    if "a" not in obj:
        raise ConfigError("family needs 'preset' or 'a'")
    try:
        return MatrixFamily.from_text(obj["a"], b=obj.get("b"), jac=obj.get("jac"),
                                      positive_definite=bool(obj.get("positive_definite", False)),
                                      conjugator=obj.get("conjugator"), name=obj.get("name", "custom"))
    except (ModelError, ValueError) as exc:
        raise ConfigError(f"family: {exc}") from None


def load_definition(path) -> tuple[KernelSpec, MatrixFamily]:
    """Kernel and family from a definition JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(obj, dict) or "kernel" not in obj:
        raise ConfigError(f"{path}: expected an object with 'kernel' and 'family'")
    n = int(obj.get("n", 1))
    k = obj["kernel"]
    kind = k.get("kind", "preset" if "preset" in k else "expr")
    try:
        if kind == "preset":
            name = k.get("preset")
            if name not in PRESETS:
                raise ConfigError(f"unknown preset: {name}")
            kernel, default_family = preset(name, **k.get("params", {}))
        elif kind == "expr":
            kernel = KernelSpec.from_text(k["expr"], n=n, support=k.get("support"), name=k.get("name"))
            default_family = None
        elif kind == "tabulated":
            base = os.path.dirname(os.path.abspath(path))
            table = read_csv(os.path.join(base, k["path"]))
            kernel = KernelSpec(n, "tabulated", table=table, name=k.get("name", k["path"]))
            default_family = None
        else:
            raise ConfigError(f"unknown kernel kind: {kind}")
    except KeyError as exc:
        raise ConfigError(f"kernel definition lacks {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "family" in obj:
        family = _family_from(obj["family"])
    elif default_family is not None:
        family = default_family
    else:
        raise ConfigError(f"{path}: a family is required for non-preset kernels")
    if family.n != kernel.n:
        raise ConfigError("kernel and family dimensions differ")
    return kernel, family


def resolve_preset(name: str, **params) -> tuple[KernelSpec, MatrixFamily]:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset: {name}")
    try:
        return preset(name, **params)
    except ModelError as exc:
        raise ConfigError(str(exc)) from None
