import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hausdorff.calculus import (
    CalculusError,
    HoloFunctionSpec,
    boyd_power_kernel,
    boyd_Q,
    boyd_symbol,
    calderon_fractional_kernel,
    calderon_Q,
    calderon_kernel_table,
    default_calculus_t_grid,
    fractional_kernel,
    holomorphic_kernel,
    product_kernel,
)
from hausdorff.grid import Grid
from hausdorff.model import ModelError, zero_kernel
from hausdorff.operator import OperatorSpec
from hausdorff.presets import kernel_preset, preset
from hausdorff.symbol import scalar_symbol

# frozen from scipy.special.k0
K0_HALF = 0.9244190712276656

# e^{±t} with t a point of the default t-grid, so the log tables are read without interpolation
U_GRID = np.exp(np.array([-3.0, -1.0, -0.5, 0.25, 1.0, 2.5]))


def op(name, **params):
    return OperatorSpec(*preset(name, **params))


def calderon_closed(u):
    return 1 / (u * np.maximum(1, u))


@pytest.fixture(scope="module")
def calderon():
    return op("calderon")


@pytest.fixture(scope="module")
def cesaro():
    return op("cesaro")


# -- F -------------------------------------------------------------------------------


def test_holo_function_values():
    assert HoloFunctionSpec.polynomial([0, 1, 1])(2.0) == 6
    assert HoloFunctionSpec.power(3)(2.0) == 8
    assert HoloFunctionSpec.expm1()(0.0) == 0
    assert HoloFunctionSpec.fractional(0.5)(4.0) == pytest.approx(2.0)
    with pytest.raises(CalculusError):
        HoloFunctionSpec.fractional(-1)
    with pytest.raises(CalculusError):
        HoloFunctionSpec.power(0)
    with pytest.raises(CalculusError):
        HoloFunctionSpec.fractional(0.5)(np.array([-1.0]))


# -- products ------------------------------------------------------------------------


def test_cesaro_squared_kernel(cesaro):
    k2 = product_kernel(cesaro, cesaro)
    assert k2(math.exp(-1)).real == pytest.approx(1.0, abs=1e-3)


def test_product_with_zero(cesaro):
    k = product_kernel(cesaro, zero_kernel())
    assert not np.any(k(U_GRID))


def test_boyd_squared_symbol_at_zero():
    o = op("boyd", alpha=0.25)
    k2 = product_kernel(o, o)
    phi = scalar_symbol(OperatorSpec(k2, o.family), Grid.uniform(-1, 1, 3))
    assert phi.values[1] == pytest.approx(16.0, abs=1e-4)


def test_product_family_mismatch():
    with pytest.raises(ModelError):
        product_kernel(op("cesaro"), op("calderon"))


def test_product_needs_family():
    with pytest.raises(ModelError):
        product_kernel(kernel_preset("cesaro"), kernel_preset("cesaro"))


def test_signed_product_is_sign_multiplicative():
    # neg-box squared: two reflections give a kernel on (0, 1) equal to log(1/u)
    o = op("neg-box")
    k2 = product_kernel(o, o, t_grid=Grid.uniform(-30, 30, 12001))
    assert k2(math.exp(-1)).real == pytest.approx(1.0, abs=1e-3)
    assert abs(k2(-math.exp(-1))) <= 1e-12


# -- holomorphic functions -------------------------------------------------------------


def test_identity_function_recovers_kernel(calderon):
    k = holomorphic_kernel(calderon, HoloFunctionSpec.power(1))
    assert np.max(np.abs(k(U_GRID) - calderon_closed(U_GRID))) <= 1e-6 * np.max(calderon_closed(U_GRID))


def test_cesaro_square_by_pipeline(cesaro):
    k = holomorphic_kernel(cesaro, HoloFunctionSpec.power(2))
    assert k(math.exp(-1)).real == pytest.approx(1.0, abs=1e-3)


def test_pipeline_is_linear_in_F(cesaro):
    u = np.exp(-np.array([0.5, 1.0, 2.0]))
    k = holomorphic_kernel(cesaro, HoloFunctionSpec.polynomial([0, 1, 1]))
    assert np.allclose(k(u).real, np.log(1 / u) + 1, atol=1e-3)


def test_boyd_power_by_pipeline():
    u = np.linspace(1e-3, 1 - 1e-3, 200)
    for l in (2, 3):
        k = holomorphic_kernel(op("boyd", alpha=0.25), HoloFunctionSpec.power(l))
        ref = boyd_power_kernel(0.25, l)(u)
        assert np.max(np.abs(k(u).real - ref)) <= 1e-3 * np.max(np.abs(ref))


def test_constant_term_rejected(cesaro):
    with pytest.raises(CalculusError):
        holomorphic_kernel(cesaro, HoloFunctionSpec.polynomial([1, 1]))


def test_slow_decay_rejected(cesaro):
    # φ ~ 1/|s| only; a coarse t-grid leaves |φ| ≈ 0.3 φ(0) at the band edge
    with pytest.raises(CalculusError):
        holomorphic_kernel(cesaro, HoloFunctionSpec.power(1), Grid.uniform(-10, 10, 21))


def test_signed_family_rejected():
    with pytest.raises(CalculusError):
        holomorphic_kernel(op("neg-box"), HoloFunctionSpec.power(2))


# -- fractional powers ----------------------------------------------------------------


def test_alpha_one_recovers_calderon(calderon):
    k = fractional_kernel(calderon, 1.0)
    assert k(2.0).real == pytest.approx(0.25, abs=1e-6)


def test_alpha_two_equals_square(calderon):
    a = fractional_kernel(calderon, 2.0)(U_GRID).real
    b = product_kernel(calderon, calderon)(U_GRID).real
    assert np.max(np.abs(a - b)) <= 1e-4 * np.max(np.abs(b))


def test_alpha_half_value_at_e(calderon):
    k = fractional_kernel(calderon, 0.5)
    assert k(math.e).real == pytest.approx(math.exp(-1.5) * K0_HALF / math.pi, abs=1e-3)


def test_fractional_rejects_complex_symbol(cesaro):
    with pytest.raises(CalculusError):
        fractional_kernel(cesaro, 0.5)


def test_fractional_rejects_negative_symbol():
    k, fam = preset("calderon")
    with pytest.raises(CalculusError):
        fractional_kernel(OperatorSpec(k.scaled(-1.0), fam), 0.5)


def test_fractional_rejects_bad_alpha(calderon):
    with pytest.raises(CalculusError):
        fractional_kernel(calderon, 0.0)


# -- closed forms ----------------------------------------------------------------------


def test_boyd_closed_forms():
    assert boyd_power_kernel(0.0, 2)(math.exp(-1)) == pytest.approx(1.0, rel=1e-15)
    assert boyd_power_kernel(0.25, 1)(0.5) == pytest.approx(0.5**-0.25, rel=1e-15)
    assert boyd_symbol(0.0, 1.0) == pytest.approx(0.4 + 0.8j, rel=1e-15)
    assert boyd_Q(0.0, 2, -1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert boyd_Q(0.0, 2, 1.0) == 0
    with pytest.raises(ModelError):
        boyd_symbol(0.5, 0.0)


def test_calderon_closed_forms():
    assert calderon_fractional_kernel(1, 2.0) == pytest.approx(0.25, rel=1e-12)
    assert calderon_fractional_kernel(1, 0.5) == pytest.approx(2.0, rel=1e-12)
    assert calderon_Q(0.5, 1.0) == pytest.approx(K0_HALF / math.pi, abs=1e-6)
    assert calderon_Q(1.0, 0.0) == pytest.approx(1.0, rel=1e-12)
    assert calderon_Q(0.5, 0.0) == math.inf
    with pytest.raises(ValueError):
        calderon_Q(0.0, 1.0)


def test_alpha_one_closed_form_on_wide_range():
    u = np.logspace(-2, 2, 200)
    got = calderon_fractional_kernel(1, u)
    assert np.max(np.abs(got / calderon_closed(u) - 1)) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.6, 3.0))
def test_calderon_Q_is_positive_and_decays(t, alpha):
    q1, q2 = calderon_Q(alpha, t), calderon_Q(alpha, t + 5)
    assert q1 > 0 and q2 >= 0
    assert calderon_Q(alpha, -t) == q1


def test_kernel_table_excludes_singular_point():
    k = calderon_kernel_table(0.5, Grid.uniform(-20, 20, 4001))
    assert np.isfinite(k(np.array([0.5, 1.0, 2.0]))).all()
    assert k(1.0) == 0


def test_default_t_grid_resolution():
    axis = default_calculus_t_grid(1).axes[0]
    assert axis.spacing == pytest.approx(0.0025)
