import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hausdorff.expr import ExprSyntaxError, UnknownIdentifier, breakpoints, parse, support_box, to_text


def ev(text, **env):
    return float(np.asarray(parse(text).evaluate({k: np.float64(v) for k, v in env.items()})))


# -- worked examples --------------------------------------------------------------------


def test_boyd_kernel_text():
    assert ev("chi(0,1)(u) * u^(-0.25)", u1=0.5) == pytest.approx(2**0.25, rel=1e-15)


def test_calderon_kernel_text():
    assert ev("1/(u*max(1,u))", u1=2.0) == 0.25


def test_dangling_operator_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("u +")
    assert exc.value.position == 3


# -- grammar ----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, value",
    [
        ("2+3*4^2", 50.0),
        ("2^3^2", 512.0),
        ("-2^2", -4.0),
        ("(-2)^2", 4.0),
        ("8/4/2", 1.0),
        ("1-2-3", -4.0),
        ("--3", 3.0),
        ("2*-3", -6.0),
        ("1.5e1 + .5", 15.5),
        ("sqrt(16) + abs(-1) + log(exp(2))", 7.0),
        ("min(3, max(1, 2))", 2.0),
        ("pi", math.pi),
    ],
)
def test_precedence_and_functions(text, value):
    assert ev(text) == pytest.approx(value, rel=1e-15)


def test_chi_takes_half_at_end_points():
    assert [ev("chi(0,1)(u)", u1=x) for x in (-1, 0, 0.5, 1, 2)] == [0, 0.5, 1, 0.5, 0]


def test_variables_and_aliases():
    tree = parse("u1*u2 + t", n=2)
    assert tree.variables() == {"u1", "u2", "t1"}
    assert float(tree.evaluate({"u1": 2.0, "u2": 3.0, "t1": 1.0})) == 7.0


def test_vectorised_evaluation():
    x = np.linspace(0.1, 2, 7)
    assert np.allclose(parse("u*max(1,u)").evaluate({"u1": x}), x * np.maximum(1, x))


@pytest.mark.parametrize("text", ["", "   ", "(1", "1)", "max(1)", "chi(0,1)", "1 2", "u $ 2", "exp()"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse(text)


def test_error_positions():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("1 + $")
    assert exc.value.position == 4
    with pytest.raises(ExprSyntaxError) as exc:
        parse("(1 + 2")
    assert exc.value.position == 6


def test_unknown_identifiers():
    with pytest.raises(UnknownIdentifier):
        parse("x + 1")
    with pytest.raises(UnknownIdentifier):
        parse("u3", n=2)
    with pytest.raises(UnknownIdentifier):
        parse("u2").evaluate({"u1": 1.0})


def test_breakpoints_and_support():
    tree = parse("chi(0,1)(u) * max(2, u) * abs(u)")
    assert breakpoints(tree, "u1") == {0.0, 1.0, 2.0}
    assert support_box(parse("chi(-1,0)(u1) * u2", n=2), 2) == [(-1.0, 0.0), (-math.inf, math.inf)]


# -- random trees against a reference evaluator -------------------------------------------

_UNARY = {
    "exp": np.exp,
    "abs": np.abs,
    "sqrt": lambda a: np.sqrt(np.abs(a)),
    "log": lambda a: np.log(1 + np.abs(a)),
}
_UNARY_TEXT = {"exp": "exp({})", "abs": "abs({})", "sqrt": "sqrt(abs({}))", "log": "log(1 + abs({}))"}


def _leaf():
    nums = st.floats(-4, 4, allow_nan=False).map(lambda c: (("num", c), f"({c!r})" if c < 0 else repr(c)))
    var = st.sampled_from(["u1", "u2"]).map(lambda v: (("var", v), v))
    return nums | var


def _extend(children):
    binop = st.tuples(st.sampled_from("+-*/"), children, children).map(
        lambda x: (("bin", x[0], x[1][0], x[2][0]), f"({x[1][1]} {x[0]} {x[2][1]})"))
    power = st.tuples(children, st.sampled_from([2, 3])).map(
        lambda x: (("pow", x[0][0], x[1]), f"({x[0][1]})^{x[1]}"))
    neg = children.map(lambda x: (("neg", x[0]), f"-({x[1]})"))
    unary = st.tuples(st.sampled_from(sorted(_UNARY)), children).map(
        lambda x: (("fn", x[0], x[1][0]), _UNARY_TEXT[x[0]].format(x[1][1])))
    minmax = st.tuples(st.sampled_from(["max", "min"]), children, children).map(
        lambda x: (("mm", x[0], x[1][0], x[2][0]), f"{x[0]}({x[1][1]}, {x[2][1]})"))
    chi = st.tuples(children, children).map(
        lambda x: (("chi", x[0][0], x[1][0]), f"(chi(-1, 1)({x[0][1]}) * ({x[1][1]}))"))
    return binop | power | neg | unary | minmax | chi


_TREES = st.recursive(_leaf(), _extend, max_leaves=12)


def reference(node, env):
    kind = node[0]
    if kind == "num":
        return np.float64(node[1])
    if kind == "var":
        return np.float64(env[node[1]])
    if kind == "neg":
        return -reference(node[1], env)
    if kind == "pow":
        return np.power(reference(node[1], env), node[2])
    if kind == "fn":
        return _UNARY[node[1]](reference(node[2], env))
    if kind == "mm":
        f = np.maximum if node[1] == "max" else np.minimum
        return f(reference(node[2], env), reference(node[3], env))
    if kind == "chi":
        x = reference(node[1], env)
        ind = 1.0 if -1 < x < 1 else (0.5 if x in (-1.0, 1.0) else 0.0)
        return ind * reference(node[2], env)
    a, b = reference(node[2], env), reference(node[3], env)
    return {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide}[node[1]](a, b)


@settings(max_examples=1000, deadline=None)
@given(_TREES, st.floats(-3, 3), st.floats(-3, 3))
def test_random_trees_match_reference(tree_text, u1, u2):
    tree, text = tree_text
    env = {"u1": u1, "u2": u2}
    with np.errstate(all="ignore"):
        want = reference(tree, env)
        got = np.float64(parse(text, n=2).evaluate({k: np.float64(v) for k, v in env.items()}))
    if np.isnan(want):
        assert np.isnan(got)
    else:
        assert got == pytest.approx(want, rel=1e-12, abs=1e-300)


@settings(max_examples=300, deadline=None)
@given(_TREES)
def test_print_parse_is_idempotent(tree_text):
    once = to_text(parse(tree_text[1], n=2))
    assert to_text(parse(once, n=2)) == once
