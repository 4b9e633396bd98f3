"""Closed-form expressions of one real variable with jet evaluation.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := number | const | var | func '(' expr ')' | '(' expr ')'

``**`` is accepted as a synonym of ``^``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .jet import DomainError, Jet, divide

__all__ = [
    "Expression",
    "Num",
    "Var",
    "Const",
    "Neg",
    "Bin",
    "Call",
    "ParseError",
    "DomainError",
    "FUNCTIONS",
    "CONSTANTS",
    "parse",
    "to_text",
    "eval_jet",
    "evaluate",
    "evaluate_jet",
    "as_expression",
]

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "ln", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
MAX_ORDER = 4


class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at position {position}"
        if expected:
            detail += " (expected " + " or ".join(expected) + ")"
        super().__init__(detail)
        self.position = position
        self.expected = expected


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Const, Neg, Bin, Call]


@dataclass(frozen=True)
class Expression:
    """A parsed expression; immutable and safe to share between threads."""

    ast: Node
    source: str
    variable: str = "r"

    def __str__(self) -> str:
        return to_text(self.ast)

    def __call__(self, x):
        return evaluate(self, x)

    def jet(self, x, order: int):
        return evaluate_jet(self, x, order)


# tokenizer -------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(src: str):
    toks = []
    pos = 0
    n = len(src)
    while True:
        while pos < n and src[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, ("number", "identifier", "operator"))
        kind = m.lastgroup
        start = m.start(kind)
        text = m.group(kind)
        if kind == "op" and text == "**":
            text = "^"
        toks.append((kind, text, start))
        pos = m.end()
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, src: str, variables: tuple[str, ...]):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"unexpected {_describe(kind, text)}", pos, (repr(op),))
        self.take()

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {_describe(kind, text)}", pos, ("operator", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = Bin(op, node, self.unary())
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
            return Bin("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "id":
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in self.variables:
                return Var(text)
            if text in CONSTANTS:
                return Const(text)
            known = self.variables + tuple(CONSTANTS) + FUNCTIONS
            raise ParseError(f"unknown identifier {text!r}", pos, known)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected {_describe(kind, text)}", pos, ("number", "identifier", "'('"))


def _describe(kind: str, text: str) -> str:
    return "end of input" if kind == "eof" else repr(text)


def parse(source: str, variable: str = "r") -> Expression:
    if not isinstance(source, str) or not source.strip():
        raise ParseError("empty expression", 0, ("expression",))
    return Expression(_Parser(source, (variable,)).parse(), source, variable)


def as_expression(obj, variable: str = "r") -> Expression:
    if isinstance(obj, Expression):
        return obj
    if isinstance(obj, (int, float)):
        return parse(repr(float(obj)), variable)
    return parse(obj, variable)


# printer --------------------------------------------------------------

_ADD, _MUL, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


def _prec(node: Node) -> int:
    if isinstance(node, Bin):
        return {"+": _ADD, "-": _ADD, "*": _MUL, "/": _MUL, "^": _POW}[node.op]
    if isinstance(node, Neg):
        return _UNARY
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return _UNARY
    return _ATOM


def _wrap(node: Node, paren: bool) -> str:
    s = to_text(node)
    return f"({s})" if paren else s


def to_text(node: Node) -> str:
    """Render ``node`` so that parsing the text yields the same tree."""
    if isinstance(node, Expression):
        node = node.ast
    if isinstance(node, Num):
        if math.isinf(node.value) or math.isnan(node.value):
            raise ValueError("non-finite literal")
        if node.value.is_integer() and abs(node.value) < 1e15:
            return str(int(node.value))
        return repr(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _prec(node.operand) < _UNARY)
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    p = _prec(node)
    if node.op == "^":
        left = _wrap(node.left, _prec(node.left) <= _POW)
        right = _wrap(node.right, _prec(node.right) < _UNARY)
        return f"{left}^{right}"
    left = _wrap(node.left, _prec(node.left) < p)
    right = _wrap(node.right, _prec(node.right) <= p and not isinstance(node.right, Neg))
    return f"{left} {node.op} {right}"


# evaluation -----------------------------------------------------------


def _domain(msg: str, node: Node):
    return DomainError(msg, to_text(node))


def _eval(node: Node, x: Jet) -> Jet:
    if isinstance(node, Num):
        return Jet.constant(x.c[0] * 0.0 + node.value, x.order)
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return Jet.constant(x.c[0] * 0.0 + CONSTANTS[node.name], x.order)
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, Call):
        arg = _eval(node.arg, x)
        fname = "log" if node.func == "ln" else node.func
        try:
            return getattr(arg, fname)()
        except DomainError as exc:
            raise _domain(exc.message, node) from None
    a = _eval(node.left, x)
    if node.op == "^" and isinstance(node.right, Num):
        try:
            return a ** node.right.value
        except DomainError as exc:
            raise _domain(exc.message, node) from None
    b = _eval(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    try:
        if node.op == "/":
            return divide(a, b, strict=True)
        return a**b
    except DomainError as exc:
        raise _domain(exc.message, node) from None


def evaluate_jet(e: Expression, x, order: int) -> Jet:
    """Jet of ``e`` at ``x`` (float or array) through ``order``; no order cap."""
    with np.errstate(all="ignore"):
        out = _eval(e.ast, Jet.variable(x, order))
    for k, ck in enumerate(out.c):
        if not np.all(np.isfinite(ck)):
            raise DomainError(f"non-finite derivative of order {k}", to_text(e.ast))
    return out


def eval_jet(e, r: float, order: int = MAX_ORDER) -> Jet:
    """Value and derivatives d^0..d^order of ``e`` at ``r`` (order <= 4)."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be between 0 and {MAX_ORDER}")
    return evaluate_jet(as_expression(e), r, order)


def evaluate(e, x):
    return evaluate_jet(as_expression(e), x, 0).c[0]
