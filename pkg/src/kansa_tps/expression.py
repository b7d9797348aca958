"""Tiny arithmetic expression language for source terms, boundary data and
densities.

Grammar, loosest binding first::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right-associative
    atom    := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names are the variables x, y, t, the constants pi and e, and the functions
sin cos exp log sqrt abs. Evaluation is vectorized over numpy arrays.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

VARIABLES = ("x", "y", "t")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}


class ExpressionError(ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class EvaluationError(ExpressionError):
    pass


class Node:
    def evaluate(self, x=0.0, y=0.0, t=0.0):
        env = {"x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float),
               "t": np.asarray(t, dtype=float)}
        with np.errstate(all="ignore"):
            out = self._eval(env)
        out = np.asarray(out, dtype=float)
        return out[()] if out.ndim == 0 else out

    def __call__(self, x=0.0, y=0.0, t=0.0):
        return self.evaluate(x, y, t)


@dataclass(frozen=True)
class Num(Node):
    value: float

    def _eval(self, env):
        return self.value

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Name(Node):
    name: str

    def _eval(self, env):
        if self.name in CONSTANTS:
            return CONSTANTS[self.name]
        return env[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg(Node):
    operand: Node

    def _eval(self, env):
        return -self.operand._eval(env)

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def _eval(self, env):
        a = self.left._eval(env)
        b = self.right._eval(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return np.divide(a, b)
        return np.power(np.asarray(a, dtype=float), b)

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node

    def _eval(self, env):
        a = np.asarray(self.arg._eval(env), dtype=float)
        if self.func == "log" and np.any(a <= 0):
            raise EvaluationError("log of a non-positive value")
        if self.func == "sqrt" and np.any(a < 0):
            raise EvaluationError("sqrt of a negative value")
        return FUNCTIONS[self.func](a)

    def __str__(self):
        return f"{self.func}({self.arg})"


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    raw = text.encode("utf-8")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            bad = pos + stripped
            raise ExpressionSyntaxError(f"unexpected character {text[bad]!r}",
                                        len(text[:bad].encode("utf-8")))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(text[:start].encode("utf-8"))))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, off = self.take()
        if val != value or kind != "op":
            raise ExpressionSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", off)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {val!r}", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in CONSTANTS or val in VARIABLES:
                return Name(val)
            raise UnknownIdentifierError(f"unknown identifier {val!r}", off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {val or 'end of input'!r}", off)


def parse_expression(text: str) -> Node:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).parse()
