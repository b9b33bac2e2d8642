import json
import math

import numpy as np
import pytest

from hausdorff.grid import Grid
from hausdorff.verify import SUITES, Check, VerificationReport, VerifyError, balakrishnan_integral, gaussians, run_suite


def test_registered_suites():
    assert set(SUITES) == {"two-route-symbol", "multiplicativity", "commutativity", "boyd-power",
                           "calderon-alpha1", "frac-semigroup", "norm-bound", "balakrishnan-pointwise",
                           "specfun-reference"}


def test_unknown_suite():
    with pytest.raises(VerifyError, match="unknown suite"):
        run_suite("nosuch")


@pytest.mark.parametrize("name", ["specfun-reference", "balakrishnan-pointwise", "calderon-alpha1", "two-route-symbol"])
def test_cheap_suites_pass(name):
    rep = run_suite(name)
    assert rep.passed, rep.to_json()


def test_calderon_alpha1_error_size():
    assert run_suite("calderon-alpha1").max_error <= 1e-6


def test_boyd_power_l2():
    rep = run_suite("boyd-power", l=2)
    assert rep.passed and rep.max_error <= 1e-3
    assert len(rep.checks) == 4  # alpha 0 and 0.25, iteration and pipeline each


def test_report_json_shape():
    d = json.loads(run_suite("specfun-reference", seed=7).to_json())
    assert set(d) == {"suite", "seed", "checks", "pass"}
    assert d["seed"] == 7
    assert all(set(c) >= {"name", "error", "tol", "pass"} for c in d["checks"])


def test_report_pass_needs_every_check():
    rep = VerificationReport("x", 0)
    assert not rep.passed
    rep.add("a", 0.5, 1.0)
    assert rep.passed
    rep.fail("b", RuntimeError("boom"))
    assert not rep.passed
    assert rep.to_dict()["checks"][1]["error"] == "inf"
    assert Check("c", 2.0, 1.0, False).to_dict()["pass"] is False


def test_inner_errors_become_failed_checks():
    rep = run_suite("boyd-power", alpha=0.75, l=2)
    assert not rep.passed
    assert all(c.error == math.inf for c in rep.checks if not c.passed)


def test_seeded_functions_are_deterministic():
    g = Grid.uniform(-5, 5, 101)
    a = gaussians(g, 3, np.random.default_rng(4))
    b = gaussians(g, 3, np.random.default_rng(4))
    assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))


def test_suite_determinism():
    assert run_suite("boyd-power", seed=3, l=2).to_json() == run_suite("boyd-power", seed=3, l=2).to_json()


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_balakrishnan_scalar(alpha):
    for x in (1e-3, 0.25, 4.0):
        assert balakrishnan_integral(x, alpha) == pytest.approx(x**alpha, rel=1e-6)
