"""Scalar expressions of one variable, with jet (truncated Taylor) evaluation.

Grammar, loosest binding first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?            # right-associative
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Known functions: sin cos tan asin acos atan sqrt exp log abs sinh cosh tanh.
Known constants: pi, e.  Any other name is the expression's single variable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifier

__all__ = [
    "Const", "Var", "Neg", "BinOp", "Call", "Expression", "Jet",
    "parse", "serialize", "evaluate", "evaluate_jet", "compile_scalar",
    "compile_jet", "substitute", "FUNCTIONS", "CONSTANTS",
]


@dataclass(frozen=True)
class Const:
    value: float
    name: str | None = None


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class Expression:
    """A parsed expression: the tree plus the symbol it is a function of."""

    root: Node
    variable: str | None = None

    def __call__(self, x: float) -> float:
        return evaluate(self, x)

    def __str__(self) -> str:
        return serialize(self)


CONSTANTS = {"pi": math.pi, "e": math.e}


# -- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)


class _Parser:
    def __init__(self, source: str, variable: str | None):
        self.source = source
        self.variable = variable
        self.tokens = self._tokenize()
        self.i = 0

    def _byte(self, pos: int) -> int:
        return len(self.source[:pos].encode("utf-8"))

    def _tokenize(self):
        src = self.source
        out = []
        pos = 0
        while True:
            while pos < len(src) and src[pos].isspace():
                pos += 1
            if pos >= len(src):
                break
            m = _TOKEN.match(src, pos)
            if m is None or m.end() == pos:
                raise ExpressionSyntaxError(
                    f"unexpected character {src[pos]!r}", self._byte(pos), "a token")
            kind = m.lastgroup
            start = m.start(kind)
            out.append((kind, m.group(kind), start))
            pos = m.end()
        out.append(("eof", "", len(src)))
        return out

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        kind, text, pos = self.peek()
        what = "end of input" if kind == "eof" else repr(text)
        raise ExpressionSyntaxError(f"unexpected {what}", self._byte(pos), expected)

    def expect_op(self, op: str):
        kind, text, _ = self.peek()
        if kind != "op" or text != op:
            self.fail(repr(op))
        self.take()

    def parse(self) -> Expression:
        root = self.expr()
        if self.peek()[0] != "eof":
            self.fail("an operator or end of input")
        return Expression(root, self.variable)

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(float(text))
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "name":
            self.take()
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in CONSTANTS:
                return Const(CONSTANTS[text], text)
            if self.variable is None:
                self.variable = text
            if text != self.variable:
                raise UnknownIdentifier(text, self._byte(pos))
            return Var(text)
        self.fail("a number, name or '('")


def parse(source: str, variable: str | None = None) -> Expression:
    """Parse *source* into an :class:`Expression`.

    If *variable* is None, the first name that is neither a function nor a
    constant becomes the variable; a second distinct name is rejected.
    """
    return _Parser(source, variable).parse()


def serialize(expr: Expression | Node) -> str:
    """Fully parenthesized source text that parses back to the same tree."""
    node = expr.root if isinstance(expr, Expression) else expr
    if isinstance(node, Const):
        return node.name if node.name else repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{serialize(node.operand)})"
    if isinstance(node, BinOp):
        return f"({serialize(node.left)} {node.op} {serialize(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({serialize(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def substitute(expr: Expression | Node, replacement: Node) -> Node:
    """Replace every occurrence of the variable with *replacement*."""
    node = expr.root if isinstance(expr, Expression) else expr
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, replacement))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, replacement),
                     substitute(node.right, replacement))
    return Call(node.func, substitute(node.arg, replacement))


# -- scalar evaluation -------------------------------------------------------

def _checked(fn: Callable[[float], float], name: str) -> Callable[[float], float]:
    def wrapped(x: float) -> float:
        try:
            v = fn(x)
        except (ValueError, OverflowError, ZeroDivisionError):
            raise DomainError(f"{name}({x!r}) is undefined") from None
        if not math.isfinite(v):
            raise DomainError(f"{name}({x!r}) is not finite")
        return v
    return wrapped


def _nan_safe(fn):
    def wrapped(*args):
        try:
            return fn(*args)
        except (ValueError, OverflowError, ZeroDivisionError):
            return (math.nan, math.nan, math.nan)
    return wrapped


def _tan(x):
    v = math.tan(x)
    if abs(math.cos(x)) < 1e-300:
        raise ValueError
    return v


# Each entry: (value, derivatives(x, value) -> (f', f'', f''')).
FUNCTIONS: dict[str, tuple[Callable, Callable]] = {
    "sin": (math.sin, lambda x, v: (math.cos(x), -v, -math.cos(x))),
    "cos": (math.cos, lambda x, v: (-math.sin(x), -v, math.sin(x))),
    "tan": (_tan, lambda x, v: (1 + v * v, 2 * v * (1 + v * v),
                                2 * (1 + v * v) * (1 + 3 * v * v))),
    "asin": (math.asin, lambda x, v: (
        (1 - x * x) ** -0.5, x * (1 - x * x) ** -1.5, (1 + 2 * x * x) * (1 - x * x) ** -2.5)),
    "acos": (math.acos, lambda x, v: (
        -(1 - x * x) ** -0.5, -x * (1 - x * x) ** -1.5, -(1 + 2 * x * x) * (1 - x * x) ** -2.5)),
    "atan": (math.atan, lambda x, v: (
        1 / (1 + x * x), -2 * x / (1 + x * x) ** 2, (6 * x * x - 2) / (1 + x * x) ** 3)),
    "sqrt": (math.sqrt, lambda x, v: (0.5 / v, -0.25 / v ** 3, 0.375 / v ** 5)),
    "exp": (math.exp, lambda x, v: (v, v, v)),
    "log": (math.log, lambda x, v: (1 / x, -1 / (x * x), 2 / x ** 3)),
    "abs": (abs, lambda x, v: (math.copysign(1.0, x), 0.0, 0.0)),
    "sinh": (math.sinh, lambda x, v: (math.cosh(x), v, math.cosh(x))),
    "cosh": (math.cosh, lambda x, v: (math.sinh(x), v, math.sinh(x))),
    "tanh": (math.tanh, lambda x, v: (1 - v * v, -2 * v * (1 - v * v),
                                      (1 - v * v) * (6 * v * v - 2))),
}

_VALUE = {name: _checked(fn, name) for name, (fn, _) in FUNCTIONS.items()}
_DERIV = {name: _nan_safe(d) for name, (_, d) in FUNCTIONS.items()}


def _pow(a: float, b: float) -> float:
    if a < 0 and b != int(b):
        raise DomainError(f"negative base {a!r} with non-integer exponent {b!r}")
    try:
        v = math.pow(a, b)
    except (ValueError, OverflowError, ZeroDivisionError):
        raise DomainError(f"{a!r}^{b!r} is undefined") from None
    if not math.isfinite(v):
        raise DomainError(f"{a!r}^{b!r} is not finite")
    return v


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise DomainError("division by zero")
    v = a / b
    if not math.isfinite(v):
        raise DomainError("division overflow")
    return v


def _finite(v: float, what: str) -> float:
    if not math.isfinite(v):
        raise DomainError(f"{what} is not finite")
    return v


def _root(expr: Expression | Node) -> Node:
    return expr.root if isinstance(expr, Expression) else expr


@lru_cache(maxsize=512)
def _compile_scalar(node: Node) -> Callable[[float], float]:
    if isinstance(node, Const):
        c = node.value
        return lambda x: c
    if isinstance(node, Var):
        return lambda x: x
    if isinstance(node, Neg):
        f = _compile_scalar(node.operand)
        return lambda x: -f(x)
    if isinstance(node, Call):
        f = _compile_scalar(node.arg)
        g = _VALUE[node.func]
        return lambda x: g(f(x))
    f = _compile_scalar(node.left)
    g = _compile_scalar(node.right)
    op = node.op
    if op == "+":
        return lambda x: _finite(f(x) + g(x), "sum")
    if op == "-":
        return lambda x: _finite(f(x) - g(x), "difference")
    if op == "*":
        return lambda x: _finite(f(x) * g(x), "product")
    if op == "/":
        return lambda x: _div(f(x), g(x))
    return lambda x: _pow(f(x), g(x))


def compile_scalar(expr: Expression | Node) -> Callable[[float], float]:
    """Return a fast callable ``x -> value`` for repeated evaluation."""
    return _compile_scalar(_root(expr))


def evaluate(expr: Expression | Node, x: float) -> float:
    """Evaluate in double precision; raises DomainError on NaN/inf results."""
    return _compile_scalar(_root(expr))(float(x))


# -- jets ----------------------------------------------------------------------

class Jet:
    """Value and first three derivatives at a point (derivatives, not Taylor coefficients)."""

    __slots__ = ("c0", "c1", "c2", "c3")

    def __init__(self, c0, c1=0.0, c2=0.0, c3=0.0):
        self.c0, self.c1, self.c2, self.c3 = c0, c1, c2, c3

    @classmethod
    def constant(cls, c: float) -> "Jet":
        return cls(c, 0.0, 0.0, 0.0)

    @classmethod
    def variable(cls, x: float) -> "Jet":
        return cls(x, 1.0, 0.0, 0.0)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c0, self.c1, self.c2, self.c3)

    def __getitem__(self, i: int) -> float:
        return self.as_tuple()[i]

    def __iter__(self):
        return iter(self.as_tuple())

    def __add__(self, other):
        o = _as_jet(other)
        return Jet(*_j_add(self.as_tuple(), o.as_tuple()))

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_jet(other)
        return Jet(*_j_sub(self.as_tuple(), o.as_tuple()))

    def __rsub__(self, other):
        return _as_jet(other) - self

    def __mul__(self, other):
        o = _as_jet(other)
        return Jet(*_j_mul(self.as_tuple(), o.as_tuple()))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_jet(other)
        return Jet(*_j_div(self.as_tuple(), o.as_tuple()))

    def __rtruediv__(self, other):
        return _as_jet(other) / self

    def __neg__(self):
        return Jet(-self.c0, -self.c1, -self.c2, -self.c3)

    def __repr__(self):
        return f"Jet({self.c0!r}, {self.c1!r}, {self.c2!r}, {self.c3!r})"

    def __eq__(self, other):
        return isinstance(other, Jet) and self.as_tuple() == other.as_tuple()


def _as_jet(v) -> Jet:
    return v if isinstance(v, Jet) else Jet.constant(float(v))


def _j_add(a, b):
    return (_finite(a[0] + b[0], "sum"), a[1] + b[1], a[2] + b[2], a[3] + b[3])


def _j_sub(a, b):
    return (_finite(a[0] - b[0], "difference"), a[1] - b[1], a[2] - b[2], a[3] - b[3])


def _j_mul(a, b):
    return (
        _finite(a[0] * b[0], "product"),
        a[1] * b[0] + a[0] * b[1],
        a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2],
        a[3] * b[0] + 3 * a[2] * b[1] + 3 * a[1] * b[2] + a[0] * b[3],
    )


def _j_div(a, b):
    q0 = _div(a[0], b[0])
    g = b[0]
    q1 = (a[1] - q0 * b[1]) / g
    q2 = (a[2] - 2 * q1 * b[1] - q0 * b[2]) / g
    q3 = (a[3] - 3 * q2 * b[1] - 3 * q1 * b[2] - q0 * b[3]) / g
    return (q0, q1, q2, q3)


def _compose(v, d1, d2, d3, a):
    """Faà di Bruno: jet of phi(f) given phi's derivatives at f(x) and f's jet."""
    return (
        v,
        d1 * a[1],
        d2 * a[1] * a[1] + d1 * a[2],
        d3 * a[1] ** 3 + 3 * d2 * a[1] * a[2] + d1 * a[3],
    )


def _power_derivs(b0: float, p: float):
    out = []
    coef = 1.0
    for k in range(1, 4):
        coef *= p - (k - 1)
        if coef == 0.0:
            out.append(0.0)
            continue
        try:
            out.append(coef * math.pow(b0, p - k))
        except (ValueError, OverflowError, ZeroDivisionError):
            out.append(math.nan)
    return out


def _j_pow(a, b):
    v = _pow(a[0], b[0])
    if b[1] == 0.0 and b[2] == 0.0 and b[3] == 0.0:
        d1, d2, d3 = _power_derivs(a[0], b[0])
        return _compose(v, d1, d2, d3, a)
    if a[0] <= 0.0:
        raise DomainError("variable exponent requires a positive base")
    x = a[0]
    log_a = _compose(math.log(x), 1 / x, -1 / (x * x), 2 / x ** 3, a)
    e = _j_mul(b, log_a)
    return _compose(v, v, v, v, e)


@lru_cache(maxsize=512)
def _compile_jet(node: Node):
    if isinstance(node, Const):
        c = node.value
        return lambda x: (c, 0.0, 0.0, 0.0)
    if isinstance(node, Var):
        return lambda x: (x, 1.0, 0.0, 0.0)
    if isinstance(node, Neg):
        f = _compile_jet(node.operand)

        def neg(x):
            a = f(x)
            return (-a[0], -a[1], -a[2], -a[3])
        return neg
    if isinstance(node, Call):
        f = _compile_jet(node.arg)
        value = _VALUE[node.func]
        derivs = _DERIV[node.func]
        is_abs = node.func == "abs"

        def call(x):
            a = f(x)
            v = value(a[0])
            if is_abs and a[0] == 0.0:
                return (v, math.nan, math.nan, math.nan)
            d1, d2, d3 = derivs(a[0], v)
            return _compose(v, d1, d2, d3, a)
        return call
    f = _compile_jet(node.left)
    g = _compile_jet(node.right)
    combine = {"+": _j_add, "-": _j_sub, "*": _j_mul, "/": _j_div, "^": _j_pow}[node.op]
    return lambda x: combine(f(x), g(x))


def compile_jet(expr: Expression | Node, order: int = 3):
    """Return a callable ``x -> (c0, c1, c2, c3)`` with domain checks up to *order*."""
    if not 1 <= order <= 3:
        raise ValueError("jet order must be 1, 2 or 3")
    f = _compile_jet(_root(expr))

    def jet(x: float):
        c = f(float(x))
        for k in range(1, order + 1):
            if not math.isfinite(c[k]):
                raise DomainError(f"derivative {k} is undefined at {x!r}")
        return c
    return jet


def evaluate_jet(expr: Expression | Node, x: float, order: int = 3) -> Jet:
    """Value and derivatives up to *order* at *x*; entries above *order* are unspecified."""
    return Jet(*compile_jet(expr, order)(x))
