"""Kernel expression language.

Grammar (precedence low to high)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := call ('^' unary)?            # right associative
    call    := 'chi' '(' expr ',' expr ')' '(' expr ')'
             | NAME '(' expr (',' expr)* ')'
             | NAME | NUMBER | '(' expr ')'

Variables are ``u1..un`` and ``t1..tn`` with ``u`` and ``t`` as aliases of
the first coordinate. ``pi`` and ``inf`` are constants. ``chi(a, b)(x)`` is
the indicator of the open interval ``(a, b)``; it takes the value 1/2 at
the end points, the convention under which trapezoidal sums of jumps stay
second order.

Trees evaluate vectorised over numpy arrays::

    >>> tree = parse("chi(0,1)(u) * u^(-0.25)")
    >>> float(tree.evaluate({"u1": 0.5}))
    1.189207115002721
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ExprSyntaxError",
    "UnknownIdentifier",
    "Node",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Chi",
    "parse",
    "to_text",
]

FUNCTIONS = {
    "exp": (1, np.exp),
    "log": (1, np.log),
    "abs": (1, np.abs),
    "sqrt": (1, np.sqrt),
    "max": (2, np.maximum),
    "min": (2, np.minimum),
}
CONSTANTS = {"pi": math.pi, "inf": math.inf}
_VAR_RE = re.compile(r"^([ut])([1-9]\d*)?$")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnknownIdentifier(ValueError):
    pass


class Node:
    def evaluate(self, env: dict):
        raise NotImplementedError

    def variables(self) -> set[str]:
        return set()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Num(Node):
    value: float

    def evaluate(self, env):
        return self.value


@dataclass(frozen=True)
class Var(Node):
    name: str  # canonical: u1, u2, t1, ...

    def evaluate(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise UnknownIdentifier(f"variable {self.name} is not bound") from None

    def variables(self):
        return {self.name}


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def evaluate(self, env):
        return -self.arg.evaluate(env)

    def variables(self):
        return self.arg.variables()


_BINOPS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == "^":
            a = np.asarray(a, dtype=float)
        return _BINOPS[self.op](a, b)

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple[Node, ...]

    def evaluate(self, env):
        fn = FUNCTIONS[self.name][1]
        return fn(*[np.asarray(a.evaluate(env), dtype=float) for a in self.args])

    def variables(self):
        return set().union(*(a.variables() for a in self.args))


@dataclass(frozen=True)
class Chi(Node):
    lo: Node
    hi: Node
    arg: Node

    def evaluate(self, env):
        x = np.asarray(self.arg.evaluate(env), dtype=float)
        a = self.lo.evaluate(env)
        b = self.hi.evaluate(env)
        inside = (x > a) & (x < b)
        edge = (x == a) | (x == b)
        return np.where(inside, 1.0, np.where(edge, 0.5, 0.0))

    def variables(self):
        return self.lo.variables() | self.hi.variables() | self.arg.variables()


# -- tokenizer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            what = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {what}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if val == "chi":
                self.expect("(")
                lo = self.expr()
                self.expect(",")
                hi = self.expr()
                self.expect(")")
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Chi(lo, hi, arg)
            if val in FUNCTIONS:
                arity = FUNCTIONS[val][0]
                self.expect("(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.take()
                    args.append(self.expr())
                if len(args) != arity:
                    raise ExprSyntaxError(f"{val} takes {arity} argument(s), got {len(args)}", pos)
                self.expect(")")
                return Call(val, tuple(args))
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            return Var(self.variable(val, pos))
        what = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {what}", pos)

    def variable(self, name: str, pos: int) -> str:
        m = _VAR_RE.match(name)
        if m is None:
            raise UnknownIdentifier(f"unknown identifier {name!r} at offset {pos}")
        k = int(m.group(2) or 1)
        if self.n is not None and k > self.n:
            raise UnknownIdentifier(f"variable {name!r} exceeds dimension {self.n} at offset {pos}")
        return f"{m.group(1)}{k}"


def parse(text: str, n: int | None = None) -> Node:
    """Parse ``text`` into an evaluable tree.

    ``n`` bounds the variable indices when given.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text, n).parse()


def _num_text(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "(-inf)"
    r = repr(float(x))
    return f"({r})" if x < 0 else r


def to_text(node: Node) -> str:
    """Fully parenthesised text; parsing it and printing again gives the same text."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, Chi):
        return f"chi({to_text(node.lo)}, {to_text(node.hi)})({to_text(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def constant_value(node: Node) -> float | None:
    """Value of a variable-free subtree, else None."""
    if node.variables():
        return None
    with np.errstate(all="ignore"):
        v = float(np.asarray(node.evaluate({})))
    return v


def breakpoints(node: Node, var: str) -> set[float]:
    """Points where ``node`` may fail to be smooth as a function of ``var``.

    Collects indicator end points and the constant argument of ``max``,
    ``min`` and ``abs`` applied to the bare variable. Used to place
    quadrature panel boundaries.
    """
    out: set[float] = set()

    def walk(nd):
        if isinstance(nd, Chi):
            if nd.arg == Var(var):
                for e in (nd.lo, nd.hi):
                    c = constant_value(e)
                    if c is not None and math.isfinite(c):
                        out.add(c)
            walk(nd.lo), walk(nd.hi), walk(nd.arg)
        elif isinstance(nd, Call):
            if nd.name in ("max", "min"):
                a, b = nd.args
                for x, y in ((a, b), (b, a)):
                    if x == Var(var):
                        c = constant_value(y)
                        if c is not None and math.isfinite(c):
                            out.add(c)
            if nd.name == "abs" and nd.args[0] == Var(var):
                out.add(0.0)
            for a in nd.args:
                walk(a)
        elif isinstance(nd, (BinOp,)):
            walk(nd.left), walk(nd.right)
        elif isinstance(nd, Neg):
            walk(nd.arg)

    walk(node)
    return out


def support_box(node: Node, n: int) -> list[tuple[float, float]]:
    """Per-axis interval containing the support, read off top-level indicators.

    A product whose factors include ``chi(a,b)(u_k)`` with constant ends is
    zero outside ``(a, b)`` on axis ``k``. Anything else leaves the axis
    unbounded.
    """
    box = [(-math.inf, math.inf)] * n

    def factors(nd):
        if isinstance(nd, BinOp) and nd.op in ("*", "/"):
            yield from factors(nd.left)
            if nd.op == "*":
                yield from factors(nd.right)
        else:
            yield nd

    for f in factors(node):
        if isinstance(f, Chi) and isinstance(f.arg, Var) and f.arg.name.startswith("u"):
            k = int(f.arg.name[1:]) - 1
            lo, hi = constant_value(f.lo), constant_value(f.hi)
            if lo is None or hi is None or k >= n:
                continue
            a, b = box[k]
            box[k] = (max(a, lo), min(b, hi))
    return box
