import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hausdorff.grid import Grid, SampledFunction, rel_linf
from hausdorff.model import KernelSpec, MatrixFamily, zero_kernel
from hausdorff.operator import OperatorSpec
from hausdorff.presets import family_preset, preset
from hausdorff.symbol import (
    SymbolError,
    SymbolMatrix,
    largest_singular_values,
    matrix_symbol,
    scalar_symbol,
    spectrum_estimate,
    symbol_norm,
)

S = Grid.uniform(-20, 20, 4001)
S_SMALL = Grid.uniform(-5, 5, 101)


def op(name, **params):
    return OperatorSpec(*preset(name, **params))


def at_zero(phi):
    return phi.values[len(phi.values) // 2]


def test_cesaro_symbol_at_zero():
    assert at_zero(scalar_symbol(op("cesaro"), S)) == pytest.approx(2.0, abs=1e-10)


def test_calderon_symbol():
    phi = scalar_symbol(op("calderon"), S)
    s = S.axes[0].points
    assert at_zero(phi) == pytest.approx(4.0, abs=1e-10)
    assert rel_linf(phi, SampledFunction(S, 1 / (s**2 + 0.25))) <= 1e-6


def test_boyd_symbol_closed_form():
    phi = scalar_symbol(op("boyd", alpha=0.25), S)
    s = S.axes[0].points
    assert rel_linf(phi, SampledFunction(S, 1 / (0.25 - 1j * s))) <= 1e-8


def test_zero_kernel_symbol():
    o = OperatorSpec(zero_kernel(), family_preset("dilation-pd"))
    assert not np.any(scalar_symbol(o, S_SMALL).values)


@pytest.mark.parametrize("name", ["cesaro", "boyd", "calderon"])
def test_two_routes_agree(name):
    o = op(name)
    a = scalar_symbol(o, S, method="direct")
    b = scalar_symbol(o, S, method="log-fourier")
    assert rel_linf(b, a) <= 1e-6


def test_scalar_symbol_rejects_signed_family():
    with pytest.raises(SymbolError):
        scalar_symbol(op("neg-box"), S_SMALL)


def test_unknown_method():
    with pytest.raises(SymbolError):
        scalar_symbol(op("cesaro"), S_SMALL, method="magic")


# -- matrix symbols ----------------------------------------------------------------------


def test_cesaro_matrix_symbol_is_diagonal():
    k, _ = preset("cesaro")
    phi = matrix_symbol(OperatorSpec(k, family_preset("dilation")), S_SMALL)
    arr = phi.as_array()
    assert np.all(arr[:, 0, 1] == 0) and np.all(arr[:, 1, 0] == 0)
    assert np.array_equal(arr[:, 0, 0], arr[:, 1, 1])
    assert arr[50, 0, 0] == pytest.approx(2.0, abs=1e-10)


def test_negative_box_matrix_symbol():
    phi = matrix_symbol(op("neg-box"), S_SMALL)
    arr = phi.as_array()
    assert np.max(np.abs(arr[:, 0, 0])) <= 1e-10 and np.max(np.abs(arr[:, 1, 1])) <= 1e-10
    assert arr[50, 0, 1] == pytest.approx(2.0, abs=1e-6)
    assert phi.is_symmetric()


def test_zero_matrix_symbol():
    phi = matrix_symbol(OperatorSpec(zero_kernel(), family_preset("dilation")), S_SMALL)
    assert not np.any(phi.as_array())
    assert symbol_norm(phi) == 0


def test_positive_definite_reduction():
    o = op("boyd")
    phi = scalar_symbol(o, S_SMALL)
    arr = matrix_symbol(o, S_SMALL).as_array()
    assert np.max(np.abs(arr[:, 0, 0] - phi.values)) <= 1e-10
    assert np.max(np.abs(arr[:, 1, 1] - phi.values)) <= 1e-10
    assert not np.any(arr[:, 0, 1])


def test_2d_matrix_symbol_all_entries():
    ax = Grid.uniform(-3, 3, 13).axes[0]
    phi = matrix_symbol(op("dilation-diag-2d"), Grid((ax, ax)))
    assert len(phi.entries) == 16
    assert phi.is_symmetric()
    assert np.all(np.isfinite(phi.as_array()))


def test_matrix_symbol_two_routes_negative_box():
    o = op("neg-box")
    a = matrix_symbol(o, S_SMALL).as_array()
    b = matrix_symbol(o, S_SMALL, method="log-fourier").as_array()
    assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(a))


def test_missing_pair_is_an_error():
    fam = MatrixFamily.from_text(["u"], b={"1,1": ["exp(t)"]}, jac={"1,1": "exp(t)"})
    k = KernelSpec.from_text("chi(-1,0)(u)")
    with pytest.raises(SymbolError):
        matrix_symbol(OperatorSpec(k, fam), S_SMALL, method="log-fourier")


# -- norms and spectrum -----------------------------------------------------------------


def test_symbol_norms():
    assert symbol_norm(scalar_symbol(op("cesaro"), S)) == pytest.approx(2.0, abs=1e-6)
    assert symbol_norm(scalar_symbol(op("calderon"), S)) == pytest.approx(4.0, abs=1e-6)
    k, _ = preset("cesaro")
    assert symbol_norm(matrix_symbol(OperatorSpec(k, family_preset("dilation")), S)) == pytest.approx(2.0, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from([2, 4]))
def test_jacobi_matches_svd(seed, m):
    rng = np.random.default_rng(seed)
    mats = rng.normal(size=(7, m, m)) + 1j * rng.normal(size=(7, m, m))
    want = np.linalg.svd(mats, compute_uv=False)[:, 0]
    assert np.allclose(largest_singular_values(mats), want, rtol=1e-10, atol=0)


def test_symbol_matrix_product():
    g = Grid.uniform(-1, 1, 3)
    a = SymbolMatrix.from_array(1, g, np.array([[[1, 2], [2, 1]]] * 3, dtype=complex))
    b = a @ a
    assert np.allclose(b.as_array()[0], [[5, 4], [4, 5]])


def test_calderon_spectrum():
    est = spectrum_estimate(scalar_symbol(op("calderon"), S))
    lo, hi = est.interval
    assert lo == 0 and abs(hi - 4) <= 1e-6
    assert not est.warnings


def test_zero_spectrum():
    est = spectrum_estimate(scalar_symbol(OperatorSpec(zero_kernel(), family_preset("dilation-pd")), S_SMALL))
    assert est.interval == (0.0, 0.0)
    assert np.all(est.points == 0)


def test_cesaro_range_on_circle():
    est = spectrum_estimate(scalar_symbol(op("cesaro"), S))
    assert np.max(np.abs(np.abs(est.points - 1) - 1)) <= 1e-6
    assert est.interval is None
    assert est.warnings  # 1/|s| decay leaves |φ| ≈ 0.05 at s = ±20


def test_spectrum_warns_without_decay():
    phi = SampledFunction(S_SMALL, np.ones(101))
    assert spectrum_estimate(phi).warnings
