import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hausdorff.grid import Grid, SampledFunction, interpolate
from hausdorff.model import (
    KernelSpec,
    MatrixFamily,
    ModelError,
    admissibility_check,
    check_family,
    from_log_coordinates,
    octant_index,
    octant_signature,
    octant_signs,
    omega_membership,
    to_log_coordinates,
    zero_kernel,
)
from hausdorff.presets import FAMILIES, family_preset, kernel_preset, preset


# -- octants --------------------------------------------------------------------------


def test_signature_examples():
    assert octant_signature(1, 1, 1) == (1,)
    assert octant_signature(1, 2, 1) == (-1,)
    assert octant_signature(2, 3, 2) == (-1, -1)


def test_encoding_2d():
    assert [octant_signs(i, 2) for i in range(1, 5)] == [(1, 1), (-1, 1), (1, -1), (-1, -1)]


def test_signature_range_errors():
    with pytest.raises(ModelError):
        octant_signature(0, 1, 1)
    with pytest.raises(ModelError):
        octant_signature(1, 5, 2)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, 2**n), st.integers(1, 2**n))))
def test_signature_is_an_involution(nij):
    n, i, j = nij
    eps = octant_signature(i, j, n)
    assert eps == octant_signature(j, i, n)
    assert octant_signature(i, i, n) == (1,) * n
    flipped = tuple(e * s for e, s in zip(eps, octant_signs(j, n)))
    assert octant_index(flipped) == i
    assert octant_index(octant_signs(i, n)) == i


def test_omega_membership_examples():
    fam = family_preset("dilation")
    assert omega_membership(0.5, 1, 1, fam)
    assert not omega_membership(-0.5, 1, 1, fam)
    assert omega_membership(-0.5, 1, 2, fam)
    with pytest.raises(ModelError):
        omega_membership(0.0, 1, 1, fam)


@settings(max_examples=100)
@given(st.lists(st.floats(-5, 5).filter(lambda v: abs(v) > 1e-6), min_size=2, max_size=2), st.integers(1, 4))
def test_omega_sets_partition(u, i):
    fam = family_preset("diag-2d")
    hits = [j for j in range(1, 5) if omega_membership(np.array(u), i, j, fam)]
    assert len(hits) == 1


# -- families -------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_preset_families_are_consistent(name):
    fam = family_preset(name)
    kernel = kernel_preset("cesaro") if fam.positive_definite else None
    assert check_family(fam, kernel) == []


def test_inconsistent_inverse_map_is_reported():
    fam = MatrixFamily.from_text(["u"], b={"1,1": ["exp(2*t)"]}, jac={"1,1": "2*exp(2*t)"})
    assert any("differs" in p for p in check_family(fam))


def test_family_validation():
    with pytest.raises(ModelError):
        MatrixFamily.from_text(["u1"], b={"1,1": ["exp(t)"]})  # no Jacobian
    with pytest.raises(ModelError):
        MatrixFamily.from_text(["u1", "u2"], conjugator=[[1, 1], [0, 1]])


def test_positive_definite_flag_checked_on_support():
    fam = family_preset("dilation-pd")
    assert check_family(fam, kernel_preset("neg-box"))
    assert check_family(fam, kernel_preset("cesaro")) == []


def test_conjugated_family_apply_matrix():
    c = np.array([[0.0, 1.0], [1.0, 0.0]])
    fam = MatrixFamily.from_text(["u1", "2*u2"], conjugator=c)
    x = np.array([[1.0, 1.0]])
    got = fam.apply_matrix(np.array([[3.0, 5.0]]), x)
    want = c @ np.diag([3.0, 10.0]) @ c.T @ x[0]
    assert np.allclose(got.reshape(-1), want)


# -- log coordinates ---------------------------------------------------------------------


T = Grid.uniform(-10, 10, 2001)


def at(f, t):
    return interpolate(f, t).real


def test_cesaro_log_kernel():
    k, fam = preset("cesaro")
    q = to_log_coordinates(k, fam, (1, 1), T)
    assert at(q, -2.0) == pytest.approx(math.exp(-1), abs=1e-14)
    assert at(q, 2.0) == 0


def test_calderon_log_kernel_both_branches():
    k, fam = preset("calderon")
    q = to_log_coordinates(k, fam, (1, 1), T)
    assert at(q, 0.0) == pytest.approx(1.0, abs=1e-14)
    t = T.axes[0].points
    assert np.allclose(q.values.real, np.exp(-np.abs(t) / 2), rtol=1e-13, atol=0)


def test_zero_kernel_log_table():
    q = to_log_coordinates(zero_kernel(), family_preset("dilation-pd"), (1, 1), T)
    assert not np.any(q.values)


def test_missing_pair_is_an_error():
    fam = MatrixFamily.from_text(["u"], b={"1,1": ["exp(t)"]}, jac={"1,1": "exp(t)"})
    with pytest.raises(ModelError):
        to_log_coordinates(kernel_preset("neg-box"), fam, (1, 2), T)


def test_calderon_kernel_from_log_table():
    # log 2 is a grid point, so no interpolation error enters
    fam = family_preset("inversion-pd")
    tg = Grid.uniform(-10 * math.log(2), 10 * math.log(2), 201)
    q = SampledFunction.from_callable(tg, lambda t: np.exp(-np.abs(t) / 2))
    k = from_log_coordinates(q, fam)
    assert k(2.0).real == pytest.approx(0.25, rel=1e-12)
    assert k(0.5).real == pytest.approx(2.0, rel=1e-12)


def test_boyd_square_kernel_from_log_table():
    fam = family_preset("dilation-pd")
    q = SampledFunction.from_callable(T, lambda t: np.where(t < 0, np.abs(t) * np.exp(t / 2), 0.0))
    k = from_log_coordinates(q, fam)
    assert k(math.exp(-1)).real == pytest.approx(1.0, rel=1e-12)


def test_from_log_coordinates_coverage_error():
    q = SampledFunction.zeros(Grid.uniform(-2, 2, 11))
    with pytest.raises(ModelError):
        from_log_coordinates(q, family_preset("dilation-pd"), u_range=[(1e-3, 1.0)])


@pytest.mark.parametrize("name", ["cesaro", "calderon", "boyd"])
def test_log_roundtrip(name):
    k, fam = preset(name)
    q = to_log_coordinates(k, fam, (1, 1), T)
    back = to_log_coordinates(from_log_coordinates(q, fam), fam, (1, 1), T)
    assert np.max(np.abs(back.values - q.values)) <= 1e-12 * max(1.0, np.max(np.abs(q.values)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_log_roundtrip_random_tables(seed):
    rng = np.random.default_rng(seed)
    fam = family_preset("diag-2d")
    g = Grid.uniform(-3, 3, 13)
    tg = Grid((g.axes[0], g.axes[0]))
    tables = {eps: SampledFunction(tg, rng.normal(size=tg.shape)) for eps in itertools.product((1, -1), repeat=2)}
    k = from_log_coordinates(tables, fam)
    for j in range(1, 5):
        eps = octant_signature(1, j, 2)
        u = fam.inverse((1, j), tg.flat_points())
        vals = k(u) * np.exp(-0.5 * tg.flat_points().sum(axis=-1)) * np.abs(fam.jacobian((1, j), tg.flat_points()))
        assert np.allclose(vals, tables[eps].values.ravel(), rtol=1e-12, atol=1e-12)


# -- admissibility ---------------------------------------------------------------------


def test_cesaro_bound():
    rep = admissibility_check(*preset("cesaro"))
    assert rep.admissible
    assert rep.bound == pytest.approx(2.0, abs=1e-6)


def test_divergent_kernel_detected():
    rep = admissibility_check(KernelSpec.from_text("chi(0,1)(u) / u"), family_preset("dilation-pd"))
    assert not rep.admissible


def test_zero_kernel_bound():
    rep = admissibility_check(zero_kernel(), family_preset("dilation-pd"))
    assert rep.admissible and rep.bound == 0


def test_calderon_bound():
    # ∫ u^{1/2} / (u max(1,u)) du = 2 + 2
    rep = admissibility_check(*preset("calderon"))
    assert rep.admissible
    assert rep.bound == pytest.approx(4.0, abs=1e-6)


def test_boyd_alpha_limit():
    with pytest.raises(ModelError):
        kernel_preset("boyd", alpha=0.5)
