"""A small expression language for functions of one variable ``x``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := NUMBER | 'x' | NAME '(' expr ')' | '(' expr ')'

``**`` is accepted as a synonym for ``^``.  Numbers are decimal literals and
are read exactly.  Known functions: sin, cos, exp, log, abs.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownFunction(ValueError):
    pass


class EvaluationDomainError(ArithmeticError):
    pass


FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "log": math.log,
    "abs": abs,
}
# functions that map rationals to rationals
EXACT_FUNCTIONS = {"abs"}


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str
    arg: object


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExpressionSyntaxError(f"unexpected character {text[bad]!r}", bad)
        number, name, op = m.groups()
        start = m.start(m.lastindex)
        if number is not None:
            tokens.append(("num", number, start))
        elif name is not None:
            tokens.append(("name", name, start))
        else:
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
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

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value or kind == "end":
            what = "end of input" if kind == "end" else repr(text)
            raise ExpressionSyntaxError(f"expected {value!r}, found {what}", pos)

    def fail(self, tok, what="expression"):
        kind, text, pos = tok
        found = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"expected {what}, found {found}", pos)

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(self.peek(), "operator or end of input")
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
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            arg = self.unary()
            return Neg(arg) if tok[1] == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                self.fail(tok, "integer exponent")
            return Pow(base, sign * int(tok[1]))
        return base

    def atom(self):
        tok = self.take()
        kind, text, pos = tok
        if kind == "num":
            return Num(Fraction(text))
        if kind == "name":
            if text == "x":
                return Var()
            if self.peek()[:2] == ("op", "("):
                if text not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {text!r} at offset {pos}")
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise ExpressionSyntaxError(f"unknown symbol {text!r}", pos)
        if (kind, text) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        self.fail(tok)


def parse_expr(text: str):
    return _Parser(text).parse()


def is_exact_expr(node) -> bool:
    """True iff the expression maps rationals to rationals."""
    if isinstance(node, (Num, Var)):
        return True
    if isinstance(node, Neg):
        return is_exact_expr(node.arg)
    if isinstance(node, BinOp):
        return is_exact_expr(node.left) and is_exact_expr(node.right)
    if isinstance(node, Pow):
        return is_exact_expr(node.base)
    if isinstance(node, Call):
        return node.name in EXACT_FUNCTIONS and is_exact_expr(node.arg)
    raise TypeError(node)


def evaluate(node, x):
    """Evaluate at ``x``; exact if ``x`` is a Fraction and the tree is exact."""
    if isinstance(node, Num):
        return node.value if isinstance(x, Fraction) else float(node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -evaluate(node.arg, x)
    if isinstance(node, BinOp):
        left = evaluate(node.left, x)
        right = evaluate(node.right, x)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if right == 0:
            raise EvaluationDomainError(f"division by zero at x={x}")
        return left / right
    if isinstance(node, Pow):
        base = evaluate(node.base, x)
        if node.exponent < 0 and base == 0:
            raise EvaluationDomainError(f"zero to a negative power at x={x}")
        return base ** node.exponent
    if isinstance(node, Call):
        arg = evaluate(node.arg, x)
        if node.name == "abs":
            return abs(arg)
        if node.name == "log" and arg <= 0:
            raise EvaluationDomainError(f"log of non-positive value {arg} at x={x}")
        try:
            return FUNCTIONS[node.name](float(arg))
        except OverflowError as exc:
            raise EvaluationDomainError(f"{node.name} overflow at x={x}") from exc
    raise TypeError(node)


def to_source(node) -> str:
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"-({to_source(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Pow):
        return f"({to_source(node.base)})^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.name}({to_source(node.arg)})"
    raise TypeError(node)


_NP_NAMES = {"sin": "np.sin", "cos": "np.cos", "exp": "np.exp", "log": "np.log",
             "abs": "np.abs"}


def _np_source(node) -> str:
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{_np_source(node.arg)})"
    if isinstance(node, BinOp):
        return f"({_np_source(node.left)} {node.op} {_np_source(node.right)})"
    if isinstance(node, Pow):
        return f"({_np_source(node.base)} ** {float(node.exponent)!r})"
    if isinstance(node, Call):
        return f"{_NP_NAMES[node.name]}({_np_source(node.arg)})"
    raise TypeError(node)


def compile_numpy(node):
    """Vectorized float evaluator; invalid points come back as nan or inf."""
    import numpy as np

    code = f"lambda x: {_np_source(node)} + 0.0 * x"
    return eval(code, {"np": np})  # source is generated from the parsed tree only
