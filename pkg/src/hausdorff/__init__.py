"""Symbol calculus for multidimensional Hausdorff operators on L²(ℝⁿ)."""

from .calculus import (
    CalculusError,
    HoloFunctionSpec,
    boyd_power_kernel,
    boyd_symbol,
    calderon_fractional_kernel,
    calderon_Q,
    fractional_kernel,
    holomorphic_kernel,
    product_kernel,
)
from .grid import (
    EvalContext,
    Grid,
    SampledFunction,
    convolve,
    distance_linf,
    fourier_forward,
    fourier_inverse,
    interpolate,
    norm_l2,
    rel_l2,
    rel_linf,
)
from .model import (
    KernelSpec,
    MatrixFamily,
    ModelError,
    admissibility_check,
    from_log_coordinates,
    octant_signature,
    omega_membership,
    to_log_coordinates,
)
from .expr import parse as parse_kernel_expression
from .operator import OperatorError, OperatorSpec, apply, apply_iterated
from .presets import family_preset, kernel_preset, preset
from .quadrature import QuadratureConfig
from .specfun import SpecFunConfig, bessel_k_real, gamma_real
from .symbol import SymbolError, SymbolMatrix, matrix_symbol, scalar_symbol, spectrum_estimate, symbol_norm
from .verify import VerificationReport, run_suite

__all__ = [
    "admissibility_check",
    "apply",
    "apply_iterated",
    "bessel_k_real",
    "boyd_power_kernel",
    "boyd_symbol",
    "CalculusError",
    "calderon_fractional_kernel",
    "calderon_Q",
    "convolve",
    "distance_linf",
    "EvalContext",
    "family_preset",
    "fourier_forward",
    "fourier_inverse",
    "fractional_kernel",
    "from_log_coordinates",
    "gamma_real",
    "Grid",
    "HoloFunctionSpec",
    "holomorphic_kernel",
    "interpolate",
    "kernel_preset",
    "KernelSpec",
    "matrix_symbol",
    "MatrixFamily",
    "ModelError",
    "norm_l2",
    "octant_signature",
    "omega_membership",
    "OperatorError",
    "OperatorSpec",
    "parse_kernel_expression",
    "preset",
    "product_kernel",
    "QuadratureConfig",
    "rel_l2",
    "rel_linf",
    "run_suite",
    "SampledFunction",
    "scalar_symbol",
    "SpecFunConfig",
    "spectrum_estimate",
    "symbol_norm",
    "SymbolError",
    "SymbolMatrix",
    "to_log_coordinates",
    "VerificationReport",
]

__version__ = "0.1.0"
