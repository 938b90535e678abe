"""Tiny expression language for one- and two-dimensional vector fields.

Grammar (coordinates separated by ``;``)::

    field  := expr (";" expr)?
    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?           # right-associative
    atom   := NUMBER | VAR | FUNC "(" expr ")" | "(" expr ")"

Variables are ``x1`` and ``x2``; functions are ``sin``, ``cos`` and ``exp``.
Columns in error messages are 1-based.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..errors import EvaluationError, ParseError

VARIABLES = ("x1", "x2")
FUNCTIONS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^();])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    line: int
    column: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


# -- tree -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3


def _fmt_num(v: float) -> str:
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)


def to_source(node, parent: int = 0, right_side: bool = False) -> str:
    """Minimal-parenthesis text that parses back to the same tree."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        text = "-" + to_source(node.operand, _NEG_PREC)
        return f"({text})" if parent > _NEG_PREC else text
    prec = _PREC[node.op]
    if node.op == "^":
        text = f"{to_source(node.left, prec + 1)}^{to_source(node.right, _NEG_PREC)}"
    else:
        text = f"{to_source(node.left, prec)} {node.op} {to_source(node.right, prec, True)}"
    if prec < parent or (prec == parent and right_side):
        return f"({text})"
    return text


class _Parser:
    def __init__(self, src):
        self.tokens = tokenize(src)
        self.i = 0
        self.var_tokens = []

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.column)

    def take(self, text=None):
        tok = self.tok
        if text is not None and tok.text != text:
            self.fail(f"expected {text!r}" + (f", got {tok.text!r}" if tok.text else " at end of input"))
        self.i += 1
        return tok

    def field(self):
        coords = [self.expr()]
        while self.tok.text == ";":
            self.take()
            coords.append(self.expr())
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        if len(coords) > len(VARIABLES):
            self.fail(f"at most {len(VARIABLES)} coordinates are supported", self.tokens[0])
        return coords

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok.text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.text == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.take()
            if tok.text in FUNCTIONS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Call(tok.text, arg)
            if tok.text in VARIABLES:
                self.var_tokens.append(tok)
                return Var(tok.text)
            self.fail(f"unknown identifier {tok.text!r}", tok)
        if tok.text == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if tok.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {tok.text!r}")


@dataclass(frozen=True)
class VectorField:
    """Parsed field; ``coords[i]`` is the derivative of ``x{i+1}``."""

    coords: tuple

    @property
    def dimension(self):
        return len(self.coords)

    def __str__(self):
        return " ; ".join(to_source(c) for c in self.coords)

    def __call__(self, point):
        point = tuple(point)
        if len(point) != self.dimension:
            raise EvaluationError(f"expected a point of dimension {self.dimension}")
        env = dict(zip(VARIABLES, point))
        return tuple(evaluate(c, env) for c in self.coords)


def parse_expression(src: str):
    p = _Parser(src)
    node = p.expr()
    if p.tok.kind != "end":
        p.fail(f"unexpected {p.tok.text!r}")
    return node


def parse_field(src: str) -> VectorField:
    """Parse ``"expr"`` or ``"expr ; expr"``.  Variables must fit the dimension."""
    parser = _Parser(src)
    coords = parser.field()
    allowed = VARIABLES[: len(coords)]
    for tok in parser.var_tokens:
        if tok.text not in allowed:
            raise ParseError(f"variable {tok.text!r} is not defined for a {len(coords)}-dimensional field",
                             tok.line, tok.column)
    return VectorField(tuple(coords))


def evaluate(node, env) -> float:
    try:
        value = _eval(node, env)
    except ZeroDivisionError:
        raise EvaluationError("division by zero") from None
    except OverflowError:
        raise EvaluationError("numeric overflow") from None
    except ValueError as exc:  # math domain errors
        raise EvaluationError(str(exc)) from None
    if isinstance(value, complex) or not math.isfinite(value):
        raise EvaluationError(f"non-real result {value!r}")
    return value


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](_eval(node.arg, env))
    a, b = _eval(node.left, env), _eval(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    out = a**b
    if isinstance(out, complex):
        raise EvaluationError(f"{a!r}^{b!r} is not real")
    return out
