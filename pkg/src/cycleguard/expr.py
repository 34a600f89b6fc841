"""Scalar expressions in ``x`` and ``y``: parsing, printing, evaluation and
exact symbolic differentiation.

Grammar (precedence low to high)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?          # right-associative, integer exponent
    atom   := NUMBER | "x" | "y" | "pi" | NAME "(" expr ")" | "(" expr ")"

Numeric literals are kept as exact :class:`fractions.Fraction` values so that
polynomial coefficients survive unchanged into :mod:`cycleguard.poly`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .exceptions import EvaluationDomainError, ParseError, UnknownIdentifierError

Number = Union[Fraction, float]

FUNCTIONS = ("exp", "sin", "cos", "sqrt", "abs")
VARIABLES = ("x", "y")


class Expression:
    """Base node. Nodes are immutable and hashable."""

    __slots__ = ()

    # operator sugar used when building derived expressions in code
    def __add__(self, other):
        return add(self, as_expression(other))

    def __radd__(self, other):
        return add(as_expression(other), self)

    def __sub__(self, other):
        return sub(self, as_expression(other))

    def __rsub__(self, other):
        return sub(as_expression(other), self)

    def __mul__(self, other):
        return mul(self, as_expression(other))

    def __rmul__(self, other):
        return mul(as_expression(other), self)

    def __truediv__(self, other):
        return div(self, as_expression(other))

    def __rtruediv__(self, other):
        return div(as_expression(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return power(self, int(n))

    def __str__(self):
        return to_string(self)

    def __call__(self, x=0.0, y=0.0):
        return evaluate(self, x, y)

    @property
    def variables(self):
        return _free_variables(self)


@dataclass(frozen=True, repr=False)
class Const(Expression):
    value: Number

    def __repr__(self):
        return f"Const({self.value!s})"


@dataclass(frozen=True, repr=False)
class Var(Expression):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, repr=False)
class Neg(Expression):
    arg: Expression

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, repr=False)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression

    def __repr__(self):
        names = {"+": "Add", "-": "Sub", "*": "Mul", "/": "Div"}
        return f"{names[self.op]}({self.left!r},{self.right!r})"


@dataclass(frozen=True, repr=False)
class Pow(Expression):
    base: Expression
    exponent: int

    def __repr__(self):
        return f"Pow({self.base!r},{self.exponent})"


@dataclass(frozen=True, repr=False)
class Func(Expression):
    name: str
    arg: Expression

    def __repr__(self):
        return f"{self.name.capitalize()}({self.arg!r})"


X = Var("x")
Y = Var("y")
ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def as_expression(value) -> Expression:
    if isinstance(value, Expression):
        return value
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, (int, Fraction)):
        return Const(Fraction(value))
    if isinstance(value, float):
        return Const(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expression")


# ---------------------------------------------------------------------------
# constructors with constant folding

def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def add(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return BinOp("+", a, b)


def sub(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return BinOp("*", a, b)


def div(a, b):
    if _is_const(b) and b.value != 0:
        if _is_const(a):
            return Const(a.value / b.value)
        if b.value == 1:
            return a
    if _is_const(a, 0):
        return ZERO
    return BinOp("/", a, b)


def neg(a):
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a, n: int):
    if n == 0:
        return ONE
    if n == 1:
        return a
    if _is_const(a):
        if a.value == 0 and n < 0:
            return Pow(a, n)
        return Const(a.value ** n)
    return Pow(a, n)


def func(name, a):
    return Func(name, a)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass
class _Token:
    kind: str  # num, name, op, end
    text: str
    offset: int


def _tokenize(source: str):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            offset = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ParseError(f"unexpected character {source[offset]!r}", _byte_offset(source, offset))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


def _byte_offset(source, char_offset):
    return len(source[:char_offset].encode("utf-8"))


class _Parser:
    # binding powers; unary minus sits between * and ^
    PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
    UNARY = 30

    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message, token=None, cls=ParseError):
        token = token or self.tok
        return cls(message, _byte_offset(self.source, token.offset))

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text):
        if self.tok.kind != "op" or self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse(self):
        if self.tok.kind == "end":
            raise self.error("empty expression")
        e = self.expression(0)
        if self.tok.kind != "end":
            raise self.error(f"unexpected token {self.tok.text!r}")
        return e

    def expression(self, min_prec):
        left = self.prefix()
        while self.tok.kind == "op" and self.tok.text in self.PREC:
            op = self.tok.text
            prec = self.PREC[op]
            if prec <= min_prec:
                break
            op_token = self.advance()
            if op == "^":
                # right-associative; the exponent may carry a unary sign
                rhs = self.expression(prec - 1)
                exponent = _constant_value(rhs)
                if exponent is None or Fraction(exponent).denominator != 1:
                    raise self.error("exponent must be an integer constant", op_token)
                left = Pow(left, int(exponent))
            else:
                rhs = self.expression(prec)
                left = BinOp(op, left, rhs)
        return left

    def prefix(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(Fraction(t.text))
        if t.kind == "name":
            self.advance()
            if t.text in VARIABLES:
                return Var(t.text)
            if t.text == "pi":
                return Const(math.pi)
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expression(0)
                self.expect(")")
                return Func(t.text, arg)
            raise self.error(f"unknown identifier {t.text!r}", t, UnknownIdentifierError)
        if t.kind == "op" and t.text in "+-":
            self.advance()
            operand = self.expression(self.UNARY)
            return Neg(operand) if t.text == "-" else operand
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expression(0)
            self.expect(")")
            return e
        found = t.text or "end of input"
        raise self.error(f"unexpected token {found!r}")


def _constant_value(e):
    """Value of a variable-free subtree built only from +-*/ and integer powers."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg):
        v = _constant_value(e.arg)
        return None if v is None else -v
    if isinstance(e, BinOp):
        a, b = _constant_value(e.left), _constant_value(e.right)
        if a is None or b is None:
            return None
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return None if b == 0 else a / b
    if isinstance(e, Pow):
        v = _constant_value(e.base)
        if v is None or (v == 0 and e.exponent < 0):
            return None
        return v ** e.exponent
    return None


def parse(source: str) -> Expression:
    """Parse infix text into an :class:`Expression`.

    Raises :class:`ParseError` (with ``offset``) on malformed input and
    :class:`UnknownIdentifierError` for names other than ``x``, ``y``, ``pi``
    and the supported functions.
    """
    if not isinstance(source, str) or not source.strip():
        raise ParseError("empty expression", 0)
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# printing

def _format_number(v):
    if isinstance(v, Fraction):
        if v.denominator == 1:
            s = str(v.numerator)
        else:
            d = v.denominator
            while d % 2 == 0:
                d //= 2
            while d % 5 == 0:
                d //= 5
            if d == 1:
                # terminating decimal, print exactly
                digits = 0
                q = v
                while q.denominator != 1:
                    q *= 10
                    digits += 1
                sign = "-" if q < 0 else ""
                n = str(abs(q.numerator)).rjust(digits + 1, "0")
                s = f"{sign}{n[:-digits]}.{n[-digits:]}"
            else:
                return f"({v.numerator}/{v.denominator})"
        return f"({s})" if s.startswith("-") else s
    s = repr(float(v))
    if s in ("inf", "-inf", "nan"):
        raise ValueError(f"cannot print non-finite constant {s}")
    return f"({s})" if s.startswith("-") else s


def to_string(e: Expression) -> str:
    """Fully parenthesised canonical form; ``parse(to_string(e))`` rebuilds ``e``."""
    if isinstance(e, Const):
        return _format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    if isinstance(e, Pow):
        exp = str(e.exponent) if e.exponent >= 0 else f"(-{-e.exponent})"
        return f"({to_string(e.base)}^{exp})"
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    raise TypeError(e)


# ---------------------------------------------------------------------------
# differentiation

def differentiate(e: Expression, var: str) -> Expression:
    """Exact partial derivative of ``e`` with respect to ``var`` ("x" or "y")."""
    if var not in VARIABLES:
        raise ValueError(f"can only differentiate with respect to x or y, not {var!r}")
    return _diff(e, var)


def _diff(e, v):
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if isinstance(e, Neg):
        return neg(_diff(e.arg, v))
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        da, db = _diff(a, v), _diff(b, v)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, b), mul(a, db))
        # quotient rule
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if isinstance(e, Pow):
        n = e.exponent
        return mul(mul(Const(Fraction(n)), power(e.base, n - 1)), _diff(e.base, v))
    if isinstance(e, Func):
        u = e.arg
        du = _diff(u, v)
        if _is_const(du, 0):
            return ZERO
        if e.name == "exp":
            outer = e
        elif e.name == "sin":
            outer = Func("cos", u)
        elif e.name == "cos":
            outer = neg(Func("sin", u))
        elif e.name == "sqrt":
            outer = div(ONE, mul(Const(Fraction(2)), e))
        elif e.name == "abs":
            # u/|u| is undefined at u = 0, so the derivative fails there on evaluation
            outer = div(u, e)
        else:  # pragma: no cover
            raise TypeError(e.name)
        return mul(outer, du)
    raise TypeError(e)


# ---------------------------------------------------------------------------
# evaluation

def _free_variables(e):
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, (Neg, Func)):
        return _free_variables(e.arg)
    if isinstance(e, Pow):
        return _free_variables(e.base)
    return _free_variables(e.left) | _free_variables(e.right)


def _source(e, lib):
    if isinstance(e, Const):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{_source(e.arg, lib)})"
    if isinstance(e, BinOp):
        return f"({_source(e.left, lib)} {e.op} {_source(e.right, lib)})"
    if isinstance(e, Pow):
        if e.exponent < 0:
            return f"(1.0 / ({_source(e.base, lib)}) ** {-e.exponent})"
        return f"(({_source(e.base, lib)}) ** {e.exponent})"
    if isinstance(e, Func):
        name = "fabs" if (e.name == "abs" and lib == "math") else e.name
        return f"{lib}.{name}({_source(e.arg, lib)})"
    raise TypeError(e)


_COMPILED: dict = {}


def compile_expression(e: Expression, vectorized: bool = False) -> Callable:
    """Compile ``e`` to a Python callable ``f(x, y)``.

    The scalar version raises the native ``ZeroDivisionError``/``ValueError``/
    ``OverflowError``; use :func:`evaluate` for the checked interface. The
    vectorised version works on numpy arrays and returns NaN/inf on domain
    problems (callers check).
    """
    key = (e, vectorized)
    fn = _COMPILED.get(key)
    if fn is None:
        lib = "np" if vectorized else "math"
        code = f"lambda x, y: {_source(e, lib)}"
        fn = eval(code, {"math": math, "np": np})  # noqa: S307 - generated from our own AST
        if vectorized and not (e.variables):
            const = fn
            fn = lambda x, y: np.broadcast_to(np.asarray(const(0.0, 0.0), dtype=float),  # noqa: E731
                                              np.broadcast(np.asarray(x), np.asarray(y)).shape).copy()
        _COMPILED[key] = fn
    return fn


def evaluate(e: Expression, x: float = 0.0, y: float = 0.0) -> float:
    """IEEE double value of ``e`` at ``(x, y)``; raises on domain errors."""
    fn = compile_expression(e)
    try:
        value = fn(float(x), float(y))
    except ZeroDivisionError as exc:
        raise EvaluationDomainError(f"division by zero evaluating {to_string(e)} at ({x}, {y})") from exc
    except ValueError as exc:
        raise EvaluationDomainError(f"{exc} evaluating {to_string(e)} at ({x}, {y})") from exc
    except OverflowError as exc:
        raise EvaluationDomainError(f"overflow evaluating {to_string(e)} at ({x}, {y})") from exc
    value = float(value)
    if math.isnan(value):
        raise EvaluationDomainError(f"NaN evaluating {to_string(e)} at ({x}, {y})")
    return value


def evaluate_array(e: Expression, x, y=0.0) -> np.ndarray:
    """Vectorised evaluation; raises if any entry is NaN or infinite."""
    fn = compile_expression(e, vectorized=True)
    with np.errstate(all="ignore"):
        out = np.asarray(fn(np.asarray(x, dtype=float), np.asarray(y, dtype=float)), dtype=float)
    if not np.all(np.isfinite(out)):
        raise EvaluationDomainError(f"non-finite values evaluating {to_string(e)}")
    return out


def substitute_x(e: Expression, replacement: Expression) -> Expression:
    """Replace every occurrence of ``x`` by ``replacement`` (used for shifts)."""
    if isinstance(e, Var):
        return replacement if e.name == "x" else e
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return Neg(substitute_x(e.arg, replacement))
    if isinstance(e, Func):
        return Func(e.name, substitute_x(e.arg, replacement))
    if isinstance(e, Pow):
        return Pow(substitute_x(e.base, replacement), e.exponent)
    return BinOp(e.op, substitute_x(e.left, replacement), substitute_x(e.right, replacement))
