"""Named kernels and matrix families.

=================  =============================================  ===============
preset             kernel K(u)                                    family A(u)
=================  =============================================  ===============
cesaro             χ_(0,1)(u)                                     u
boyd               χ_(0,1)(u) u^(-α)                              u
boyd-power         χ_(0,1)(u) u^(-α) log(1/u)^(l-1)/(l-1)!        u
calderon           1/(u max(1,u)) on (0,∞)                        1/u
neg-box            χ_(-1,0)(u)                                    u
dilation-diag-2d   exp(-((u1-1/2)² + (u2+3/10)²))                 diag(u1, u2)
=================  =============================================  ===============
"""

from __future__ import annotations

import math

from .model import KernelSpec, MatrixFamily, ModelError, octant_signs

__all__ = ["family_preset", "kernel_preset", "preset", "PRESETS", "FAMILIES"]


def _dilation_1d(positive_definite: bool) -> MatrixFamily:
    return MatrixFamily.from_text(
        ["u"],
        b={"1,1": ["exp(t)"], "1,2": ["-exp(t)"]},
        jac={"1,1": "exp(t)", "1,2": "-exp(t)"},
        positive_definite=positive_definite,
        name="dilation-pd" if positive_definite else "dilation",
    )


def _inversion_1d(positive_definite: bool) -> MatrixFamily:
    return MatrixFamily.from_text(
        ["1/u"],
        b={"1,1": ["exp(-t)"], "1,2": ["-exp(-t)"]},
        jac={"1,1": "-exp(-t)", "1,2": "exp(-t)"},
        positive_definite=positive_definite,
        name="inversion-pd" if positive_definite else "inversion",
    )


def _diag_2d() -> MatrixFamily:
    b, jac = {}, {}
    for j in range(1, 5):
        s1, s2 = octant_signs(j, 2)
        b[f"1,{j}"] = [f"{s1}*exp(t1)", f"{s2}*exp(t2)"]
        jac[f"1,{j}"] = f"{s1 * s2}*exp(t1 + t2)"
    return MatrixFamily.from_text(["u1", "u2"], b=b, jac=jac, name="diag-2d")


FAMILIES = {
    "dilation": lambda: _dilation_1d(False),
    "dilation-pd": lambda: _dilation_1d(True),
    "inversion": lambda: _inversion_1d(False),
    "inversion-pd": lambda: _inversion_1d(True),
    "diag-2d": _diag_2d,
}


def family_preset(name: str) -> MatrixFamily:
    try:
        return FAMILIES[name]()
    except KeyError:
        raise ModelError(f"unknown family preset: {name}") from None


def _boyd_text(alpha: float, l: int = 1) -> str:
    if not alpha < 0.5:
        raise ModelError(f"Boyd operator needs alpha < 1/2 for L2 boundedness, got {alpha}")
    if int(l) != l or l < 1:
        raise ModelError(f"power l must be a positive integer, got {l}")
    text = f"chi(0,1)(u) * u^(-({alpha!r}))"
    if l > 1:
        text += f" * log(1/u)^{l - 1} / {float(math.factorial(l - 1))!r}"
    return text


def kernel_preset(name: str, alpha: float = 0.25, l: int = 1) -> KernelSpec:
    if name == "cesaro":
        return KernelSpec.from_text("chi(0,1)(u)", name="cesaro")
    if name == "boyd":
        return KernelSpec.from_text(_boyd_text(alpha), name=f"boyd(alpha={alpha})")
    if name == "boyd-power":
        return KernelSpec.from_text(_boyd_text(alpha, l), name=f"boyd(alpha={alpha})^{l}")
    if name == "calderon":
        return KernelSpec.from_text("chi(0,inf)(u) / (u * max(1, u))", name="calderon")
    if name == "neg-box":
        return KernelSpec.from_text("chi(-1,0)(u)", name="neg-box")
    if name == "dilation-diag-2d":
        return KernelSpec.from_text("exp(-((u1 - 0.5)^2 + (u2 + 0.3)^2))", n=2, name="dilation-diag-2d")
    raise ModelError(f"unknown preset: {name}")


_PRESET_FAMILY = {
    "cesaro": "dilation-pd",
    "boyd": "dilation-pd",
    "boyd-power": "dilation-pd",
    "calderon": "inversion-pd",
    "neg-box": "dilation",
    "dilation-diag-2d": "diag-2d",
}

PRESETS = tuple(_PRESET_FAMILY)


def preset(name: str, **params) -> tuple[KernelSpec, MatrixFamily]:
    """Kernel and family of a named example."""
    if name not in _PRESET_FAMILY:
        raise ModelError(f"unknown preset: {name}")
    return kernel_preset(name, **params), family_preset(_PRESET_FAMILY[name])
