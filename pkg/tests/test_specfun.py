import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hausdorff.specfun import SpecFunConfig, bessel_k_real, gamma_real

# reference values frozen from scipy.special.gamma / scipy.special.kv
GAMMA_REF = [(0.1, 9.513507698668732), (2.5, 1.329340388179137), (7.3, 1271.423633663909),
             (33.3, 7.487577596522633e35)]
BESSEL_REF = [(0.0, 0.05, 3.11423402947199), (0.3, 2.0, 0.11603697434812504), (1.5, 0.1, 39.44783522676986),
              (2.7, 5.0, 0.007126248755633334), (5.0, 0.5, 12097.979476096392)]


def test_gamma_examples():
    assert gamma_real(1) == pytest.approx(1.0, rel=1e-14)
    assert gamma_real(5) == pytest.approx(24.0, rel=1e-14)
    assert gamma_real(0.5) == pytest.approx(math.sqrt(math.pi), abs=1e-10)


@pytest.mark.parametrize("x, ref", GAMMA_REF)
def test_gamma_reference(x, ref):
    assert gamma_real(x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("x", np.round(np.arange(0.1, 5.0, 0.1), 10))
def test_gamma_recurrence(x):
    assert gamma_real(x + 1) == pytest.approx(x * gamma_real(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_gamma_domain(x):
    with pytest.raises(ValueError):
        gamma_real(x)


def test_bessel_examples():
    assert bessel_k_real(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) / math.e, rel=1e-9)
    assert bessel_k_real(-0.3, 2.0) == bessel_k_real(0.3, 2.0)
    assert bessel_k_real(0.0, 1.0) == pytest.approx(0.42102443824070834, abs=1e-8)


@pytest.mark.parametrize("nu, z, ref", BESSEL_REF)
def test_bessel_reference(nu, z, ref):
    assert bessel_k_real(nu, z) == pytest.approx(ref, rel=1e-9)


def test_half_order_closed_form():
    z = np.linspace(0.1, 20, 400)
    want = np.sqrt(math.pi / (2 * z)) * np.exp(-z)
    assert np.max(np.abs(bessel_k_real(0.5, z) / want - 1)) <= 1e-9


def test_bessel_recurrence_lattice():
    nu, z = np.meshgrid(np.linspace(-3, 3, 13), np.linspace(0.1, 15, 16))
    lhs = bessel_k_real(nu + 1, z)
    rhs = bessel_k_real(nu - 1, z) + 2 * nu / z * bessel_k_real(nu, z)
    assert np.max(np.abs(lhs / rhs - 1)) <= 1e-8


@settings(max_examples=50)
@given(st.floats(-5, 5), st.floats(0.05, 30), st.floats(0.01, 5))
def test_bessel_positive_and_decreasing(nu, z, dz):
    a, b = bessel_k_real(nu, z), bessel_k_real(nu, z + dz)
    assert a > 0 and b > 0
    assert b < a


def test_bessel_domain_and_config():
    with pytest.raises(ValueError):
        bessel_k_real(0.5, 0.0)
    with pytest.raises(ValueError):
        SpecFunConfig(nodes=1)
    assert bessel_k_real(np.array([0.5, 1.5]), 1.0).shape == (2,)
