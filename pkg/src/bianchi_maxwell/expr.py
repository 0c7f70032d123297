"""A tiny expression language for scalar functions of one variable ``t``.

Grammar (whitespace is insignificant, ASCII only)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | 't' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | tan | exp | ln | sqrt | abs

``^`` is right-associative and binds tighter than unary minus, so
``-t^2`` is ``-(t^2)`` and ``2^3^2`` is 512.

Parsed trees compile to nested closures on first evaluation, which keeps
the nested quadratures in :mod:`bianchi_maxwell.catalog` affordable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

from .errors import EvalError, ParseError

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt", "abs")


class Expr:
    """Base AST node. Subclasses are frozen dataclasses."""

    def __call__(self, t: float) -> float:
        return self._fn(t)

    @cached_property
    def _fn(self) -> Callable[[float], float]:
        return self._compile()

    def _compile(self) -> Callable[[float], float]:  # pragma: no cover - abstract
        raise NotImplementedError

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float

    def _compile(self):
        v = float(self.value)
        return lambda t: v


@dataclass(frozen=True, eq=True)
class Var(Expr):
    def _compile(self):
        return lambda t: t


@dataclass(frozen=True, eq=True)
class Pi(Expr):
    def _compile(self):
        return lambda t: math.pi


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    operand: Expr

    def _compile(self):
        f = self.operand._fn
        return lambda t: -f(t)


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def _compile(self):
        a, b = self.left._fn, self.right._fn
        node = self
        if self.op == "+":
            return lambda t: a(t) + b(t)
        if self.op == "-":
            return lambda t: a(t) - b(t)
        if self.op == "*":
            return lambda t: a(t) * b(t)
        if self.op == "/":
            def div(t):
                den = b(t)
                if den == 0.0:
                    raise EvalError(f"division by zero in {to_source(node)}", node, t)
                return a(t) / den
            return div
        if self.op == "^":
            def power(t):
                base, ex = a(t), b(t)
                try:
                    out = base ** ex
                except (ZeroDivisionError, OverflowError) as exc:
                    raise EvalError(f"{exc} in {to_source(node)}", node, t) from None
                if isinstance(out, complex):
                    raise EvalError(f"negative base {base} to non-integer power in {to_source(node)}", node, t)
                return out
            return power
        raise ValueError(f"unknown operator {self.op!r}")


def _guard(name, fn, ok):
    def checked(node, x, t):
        if not ok(x):
            raise EvalError(f"{name}({x!r}) outside domain in {to_source(node)}", node, t)
        try:
            return fn(x)
        except OverflowError:
            raise EvalError(f"overflow in {to_source(node)}", node, t) from None
    return checked


_FUNC_IMPL = {
    "sin": _guard("sin", math.sin, math.isfinite),
    "cos": _guard("cos", math.cos, math.isfinite),
    "tan": _guard("tan", math.tan, math.isfinite),
    "exp": _guard("exp", math.exp, lambda x: True),
    "ln": _guard("ln", math.log, lambda x: x > 0.0),
    "sqrt": _guard("sqrt", math.sqrt, lambda x: x >= 0.0),
    "abs": _guard("abs", abs, lambda x: True),
}


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr

    def _compile(self):
        f = self.arg._fn
        impl = _FUNC_IMPL[self.func]
        node = self
        return lambda t: impl(node, f(t), t)


# --- tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | name | op | end
    text: str
    offset: int


def _tokenize(source: str) -> list[_Tok]:
    try:
        source.encode("ascii")
    except UnicodeEncodeError as exc:
        raise ParseError("non-ASCII character", exc.start, "ASCII input") from None
    toks = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {source[pos]!r}", pos, "number, name, operator or parenthesis")
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", n))
    return toks


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, text: str) -> None:
        if self.cur.kind != "op" or self.cur.text != text:
            raise ParseError(f"unexpected {self.cur.text or 'end of input'!r}", self.cur.offset, repr(text))
        self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.cur.kind != "end":
            raise ParseError(f"trailing input {self.cur.text!r}", self.cur.offset, "end of input or operator")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.cur.kind == "op" and self.cur.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.cur.kind == "op" and self.cur.text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.cur.kind == "op" and self.cur.text == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text == "t":
                return Var()
            if tok.text == "pi":
                return Pi()
            if tok.text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            raise ParseError(f"unknown name {tok.text!r}", tok.offset, "t, pi or one of " + ", ".join(FUNCTIONS))
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.offset, "number, t, pi, function or '('")


def parse(source: str) -> Expr:
    if not isinstance(source, str) or not source.strip():
        raise ParseError("empty expression", 0, "an expression")
    return _Parser(source).parse()


def evaluate(e: Expr, t: float) -> float:
    return e(t)


def deriv_fd(e: Expr, t: float, h: float = 1e-5) -> float:
    """Second-order central difference ``(e(t+h) - e(t-h)) / 2h``."""
    return (e(t + h) - e(t - h)) / (2.0 * h)


def to_source(e: Expr) -> str:
    """Render ``e`` with enough parentheses that :func:`parse` rebuilds it."""
    if isinstance(e, Num):
        text = repr(float(e.value))
        return f"({text})" if e.value < 0 or text.startswith("-") else text
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def constant(value: float) -> Expr:
    return Num(float(value)) if value >= 0 else Neg(Num(-float(value)))


def as_expr(value) -> Expr:
    """Accept an ``Expr``, a source string, or a number."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not expressions")
    if isinstance(value, (int, float)):
        return constant(float(value))
    if isinstance(value, str):
        return parse(value)
    raise TypeError(f"cannot interpret {value!r} as an expression")
