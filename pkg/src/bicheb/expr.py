"""A small recursive-descent parser for functions of ``x`` and ``y``.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom { "^" [ "-" ] integer } ;
    atom    = number | "x" | "y" | "pi" | func "(" expr ")" | "(" expr ")" ;
    func    = "abs" | "sin" | "cos" | "exp" ;

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.  Exponents
must be integer literals.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import EvaluationError

FUNCTIONS = ("abs", "sin", "cos", "exp")
_NUMPY_FUNCS = {"abs": np.abs, "sin": np.sin, "cos": np.cos, "exp": np.exp}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or one of FUNCTIONS
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


Node = Union[Num, Var, Unary, Binary, Pow]

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise _error(text, pos, f"unexpected character {text[pos]!r}")
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _error(text: str, pos: int, message: str) -> ParseError:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return ParseError(message, line, col)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, message: str, tok: _Tok | None = None) -> ParseError:
        return _error(self.text, (tok or self.tok).pos, message)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.fail(f"expected {text!r}, found {found!r}")

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.fail(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.toks[self.i].text
            self.i += 1
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        while self.accept("^"):
            neg = self.accept("-")
            tok = self.tok
            if tok.kind != "num":
                raise self.fail("exponent must be an integer literal", tok)
            if not re.fullmatch(r"\d+", tok.text):
                raise self.fail(f"non-integer exponent {tok.text!r}", tok)
            self.i += 1
            node = Pow(node, -int(tok.text) if neg else int(tok.text))
        return node

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text in ("x", "y"):
                return Var(tok.text)
            if tok.text == "pi":
                return Num(math.pi)
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            raise self.fail(f"unknown identifier {tok.text!r}", tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise self.fail(f"unexpected {found!r}", tok)


def parse_expression(text: str) -> Node:
    """Parse ``text`` into an AST; raises :class:`ParseError` with line and column."""
    if not text or not text.strip():
        raise ParseError("empty expression", 1, 1)
    return _Parser(text).parse()


def to_text(node: Node) -> str:
    """Fully parenthesized rendering that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        inner = to_text(node.operand)
        return f"(-{inner})" if node.op == "neg" else f"{node.op}({inner})"
    if isinstance(node, Binary):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Pow):
        return f"({to_text(node.base)}^{node.exponent})"
    raise TypeError(f"not an expression node: {node!r}")


def _first_point(mask, x, y):
    X, Y = np.broadcast_arrays(x, y)
    idx = tuple(np.argwhere(np.broadcast_to(mask, X.shape))[0]) if np.ndim(X) else ()
    return float(X[idx]), float(Y[idx])


def evaluate(node: Node, x, y):
    """Evaluate ``node`` at (broadcastable) ``x, y``."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x if node.name == "x" else y
    if isinstance(node, Unary):
        v = evaluate(node.operand, x, y)
        return -v if node.op == "neg" else _NUMPY_FUNCS[node.op](v)
    if isinstance(node, Binary):
        a = evaluate(node.left, x, y)
        b = evaluate(node.right, x, y)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        zero = np.asarray(b) == 0
        if np.any(zero):
            pt = _first_point(zero, x, y)
            raise EvaluationError(f"division by zero at (x, y) = {pt}", pt)
        return a / b
    if isinstance(node, Pow):
        b = evaluate(node.base, x, y)
        if node.exponent < 0:
            zero = np.asarray(b) == 0
            if np.any(zero):
                pt = _first_point(zero, x, y)
                raise EvaluationError(f"division by zero at (x, y) = {pt}", pt)
            return 1.0 / np.asarray(b, dtype=float) ** (-node.exponent)
        return np.asarray(b, dtype=float) ** node.exponent
    raise TypeError(f"not an expression node: {node!r}")


def ast_to_function(node: Node):
    """Vectorized callable ``f(x, y)`` for an expression tree."""

    def f(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.asarray(evaluate(node, x, y), dtype=float)
        shape = np.broadcast_shapes(x.shape, y.shape)
        out = np.broadcast_to(out, shape)
        return float(out) if out.ndim == 0 else out

    f.expression = to_text(node)
    return f
