"""Scalar expression DSL: recursive-descent parser, evaluation, and
forward-mode (dual number) differentiation.

Expressions hold at most one free variable.  Trees are immutable after
parsing, so evaluation and differentiation are pure and reentrant.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field


class ExpressionError(Exception):
    """Base class for every error raised by this module."""


class ParseError(ExpressionError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class MultipleVariablesError(ParseError):
    pass


class EvalDomainError(ExpressionError):
    """Numeric domain violation (log of non-positive, division by zero, ...)."""

    def __init__(self, message, offset=0):
        super().__init__(f"{message} (node at offset {offset})")
        self.offset = offset


class NonDifferentiableError(EvalDomainError):
    """The expression has no derivative at the requested point (abs at 0)."""


# ---------------------------------------------------------------------------
# AST nodes.  Offsets are byte positions into the source, excluded from
# structural equality so that parse(serialize(parse(s))) == parse(s).

@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Neg:
    operand: object
    offset: int = field(compare=False, default=0)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: object
    right: object
    offset: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Call:
    func: str
    arg: object
    offset: int = field(compare=False, default=0)


FUNCTION_NAMES = ("sin", "cos", "tan", "exp", "log", "tanh", "sqrt", "abs")


@dataclass(frozen=True)
class Expression:
    """A parsed scalar function of one variable (or a constant)."""

    root: object
    variable_name: str | None
    source: str = field(compare=False, default="")

    def __call__(self, v):
        return evaluate(self, v)

    def deriv(self, v):
        return derivative(self, v)


# ---------------------------------------------------------------------------
# Dual numbers

@dataclass(frozen=True)
class DualValue:
    """value + derivative*eps with eps^2 = 0."""

    value: float
    derivative: float = 0.0

    def __add__(self, other):
        other = _as_dual(other)
        return DualValue(self.value + other.value, self.derivative + other.derivative)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_dual(other)
        return DualValue(self.value - other.value, self.derivative - other.derivative)

    def __rsub__(self, other):
        return _as_dual(other) - self

    def __mul__(self, other):
        other = _as_dual(other)
        return DualValue(
            self.value * other.value,
            self.value * other.derivative + self.derivative * other.value,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return DualValue(-self.value, -self.derivative)

    def __truediv__(self, other):
        other = _as_dual(other)
        if other.value == 0.0:
            raise ZeroDivisionError("division by zero")
        return DualValue(
            self.value / other.value,
            (self.derivative * other.value - self.value * other.derivative)
            / (other.value * other.value),
        )

    def __rtruediv__(self, other):
        return _as_dual(other) / self

    def __pow__(self, other):
        other = _as_dual(other)
        v, dv = self.value, self.derivative
        e, de = other.value, other.derivative
        if de == 0.0 and float(e).is_integer():
            n = int(e)
            if v == 0.0 and n < 0:
                raise ZeroDivisionError("zero raised to a negative power")
            val = v ** n
            if n == 0:
                der = 0.0
            elif v == 0.0:
                der = dv if n == 1 else 0.0
            else:
                der = n * v ** (n - 1) * dv
            return DualValue(val, der)
        if v <= 0.0:
            raise ValueError("non-integer power of a non-positive base")
        val = v ** e
        return DualValue(val, val * (de * math.log(v) + e * dv / v))

    def __rpow__(self, other):
        return _as_dual(other) ** self


def _as_dual(x):
    return x if isinstance(x, DualValue) else DualValue(float(x), 0.0)


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
)


def _tokenize(source):
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        if source[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}", i)
        kind = m.lastgroup
        tokens.append((kind, m.group(), i))
        i = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, text, offset = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", offset)
        return self.advance()

    # expr := term (("+"|"-") term)*
    def expr(self):
        node = self.term()
        while True:
            kind, text, offset = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term(), offset)
            else:
                return node

    # term := factor (("*"|"/") factor)*
    def term(self):
        node = self.factor()
        while True:
            kind, text, offset = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.factor(), offset)
            else:
                return node

    # factor := "-" factor | power    (unary minus binds looser than ^)
    def factor(self):
        kind, text, offset = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.factor(), offset)
        return self.power()

    # power := primary ("^" factor)?  (right-associative exponent)
    def power(self):
        node = self.primary()
        kind, text, offset = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", node, self.factor(), offset)
        return node

    def primary(self):
        kind, text, offset = self.advance()
        if kind == "num":
            return Num(float(text), offset)
        if kind == "ident":
            pk, pt, _ = self.peek()
            if pk == "op" and pt == "(":
                if text not in FUNCTION_NAMES:
                    raise UnknownIdentifierError(f"unknown function {text!r}", offset)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg, offset)
            if text in FUNCTION_NAMES:
                raise ParseError(f"function name {text!r} used without arguments", offset)
            return Var(text, offset)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected token {text!r}" if text else "unexpected end of input", offset)


def _free_variables(node, acc):
    if isinstance(node, Var):
        acc.setdefault(node.name, node.offset)
    elif isinstance(node, Neg):
        _free_variables(node.operand, acc)
    elif isinstance(node, BinOp):
        _free_variables(node.left, acc)
        _free_variables(node.right, acc)
    elif isinstance(node, Call):
        _free_variables(node.arg, acc)


def parse(source):
    """Parse a DSL expression with exactly one (or zero) free variable."""
    if not source or not source.strip():
        raise ParseError("empty expression", 0)
    p = _Parser(source)
    root = p.expr()
    kind, text, offset = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing token {text!r}", offset)
    names = {}
    _free_variables(root, names)
    if len(names) > 1:
        listed = ", ".join(sorted(names))
        offset = max(names.values())
        raise MultipleVariablesError(f"multiple free variables: {listed}", offset)
    var = next(iter(names)) if names else None
    return Expression(root, var, source)


# ---------------------------------------------------------------------------
# Serialization (fully parenthesized; reparses to the same tree)

def serialize(e):
    return _serialize(e.root if isinstance(e, Expression) else e)


def _serialize(node):
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_serialize(node.operand)})"
    if isinstance(node, BinOp):
        return f"({_serialize(node.left)} {node.op} {_serialize(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({_serialize(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Evaluation / differentiation (single dual-number walk)

def _apply_function(name, arg, offset):
    v, d = arg.value, arg.derivative
    if name == "sin":
        return DualValue(math.sin(v), math.cos(v) * d)
    if name == "cos":
        return DualValue(math.cos(v), -math.sin(v) * d)
    if name == "tan":
        c = math.cos(v)
        if c == 0.0:
            raise EvalDomainError("tan undefined here", offset)
        return DualValue(math.tan(v), d / (c * c))
    if name == "exp":
        ev = math.exp(v)
        return DualValue(ev, ev * d)
    if name == "log":
        if v <= 0.0:
            raise EvalDomainError(f"log of non-positive value {v!r}", offset)
        return DualValue(math.log(v), d / v)
    if name == "tanh":
        t = math.tanh(v)
        return DualValue(t, (1.0 - t * t) * d)
    if name == "sqrt":
        if v < 0.0:
            raise EvalDomainError(f"sqrt of negative value {v!r}", offset)
        if v == 0.0 and d != 0.0:
            raise NonDifferentiableError("sqrt not differentiable at 0", offset)
        r = math.sqrt(v)
        return DualValue(r, d / (2.0 * r) if d != 0.0 else 0.0)
    if name == "abs":
        if v == 0.0 and d != 0.0:
            raise NonDifferentiableError("abs not differentiable at 0", offset)
        return DualValue(abs(v), math.copysign(1.0, v) * d if v != 0.0 else 0.0)
    raise EvalDomainError(f"unknown function {name!r}", offset)


def _eval(node, x):
    if isinstance(node, Num):
        return DualValue(node.value, 0.0)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, BinOp):
        left = _eval(node.left, x)
        right = _eval(node.right, x)
        try:
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if node.op == "/":
                return left / right
            if node.op == "^":
                return left ** right
        except ZeroDivisionError as exc:
            raise EvalDomainError(str(exc), node.offset) from None
        except (ValueError, OverflowError) as exc:
            raise EvalDomainError(str(exc), node.offset) from None
        raise EvalDomainError(f"unknown operator {node.op!r}", node.offset)
    if isinstance(node, Call):
        arg = _eval(node.arg, x)
        try:
            return _apply_function(node.func, arg, node.offset)
        except OverflowError as exc:
            raise EvalDomainError(str(exc), node.offset) from None
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(e, v):
    """Evaluate e at the real point v (IEEE-754 double arithmetic)."""
    return _eval(e.root, DualValue(float(v), 0.0)).value


def derivative(e, v):
    """Exact forward-mode derivative of e at v."""
    return _eval(e.root, DualValue(float(v), 1.0)).derivative


def evaluate_dual(e, v):
    """Evaluate e at v returning both value and derivative."""
    return _eval(e.root, DualValue(float(v), 1.0))
