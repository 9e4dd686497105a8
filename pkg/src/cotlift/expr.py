"""Scalar coordinate expressions: parsing, printing, generic evaluation.

Metric components, vector fields and 1-forms are entered as plain text like
``"1/y^2"`` or ``"sin(theta)^2"``.  The grammar, low to high precedence::

    sum      := product (('+' | '-') product)*
    product  := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ['^' exponent]
    atom     := number | name | function '(' sum ')' | '(' sum ')'

``^`` binds tighter than unary minus and is right-associative; its exponent
must fold to a constant at parse time (integer exponents are evaluated by
repeated multiplication of the base, real exponents require a positive
base).  Function application always carries parentheses.

Evaluation is generic over the scalar ring: an environment may bind names to
floats or to :class:`~cotlift.jets.Jet` values, and the same tree yields a
value or a full derivative table accordingly.  There is no simplification
pass anywhere, trees evaluate exactly as written.
"""

from __future__ import annotations

import math
import numbers
import re
from dataclasses import dataclass
from typing import Union

from .jets import JetDomainError

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "exp", "log", "sqrt")

_MATH_FN = {name: getattr(math, name) for name in FUNCTIONS}


class ExprError(ValueError):
    """Base class for expression failures."""


class ParseError(ExprError):
    """Syntax or name error, with the byte offset of the offending token."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvalError(ExprError):
    """Evaluation failure (unbound name or domain violation)."""


# ---------------------------------------------------------------------------
# Syntax trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    fn: str  # one of FUNCTIONS, or "neg"
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # '+', '-', '*', '/'
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Union[int, float]


Expr = Union[Const, Var, Unary, Binary, Pow]


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            offset = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", offset)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, offset = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", offset)
        return self.advance()

    def parse(self) -> Expr:
        node = self.sum()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", offset)
        return node

    def sum(self) -> Expr:
        node = self.product()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = Binary(text, node, self.product())
            else:
                return node

    def product(self) -> Expr:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = Binary(text, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, offset = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            exponent_node = self.unary()  # right-associative through recursion
            return Pow(base, self._fold_exponent(exponent_node, offset))
        return base

    def _fold_exponent(self, node: Expr, offset: int):
        try:
            value = evaluate(node, {})
        except EvalError:
            raise ParseError("exponent must be a constant", offset) from None
        if float(value).is_integer():
            return int(value)
        return float(value)

    def atom(self) -> Expr:
        kind, text, offset = self.advance()
        if kind == "number":
            return Const(float(text))
        if kind == "name":
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.sum()
                self.expect_op(")")
                return Unary(text, arg)
            if text in self.variables:
                return Var(text)
            raise ParseError(f"unknown variable {text!r}", offset)
        if kind == "op" and text == "(":
            node = self.sum()
            self.expect_op(")")
            return node
        shown = text if text else "end of input"
        raise ParseError(f"unexpected {shown!r}", offset)


def parse(text: str, variables) -> Expr:
    """Parse ``text`` over the declared variable names."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    variables = tuple(variables)
    clash = set(variables) & set(FUNCTIONS)
    if clash:
        raise ExprError(f"variable names shadow functions: {sorted(clash)}")
    return _Parser(text, variables).parse()


# ---------------------------------------------------------------------------
# Evaluation and inspection
# ---------------------------------------------------------------------------


def evaluate(node: Expr, env: dict):
    """Evaluate over whatever scalar ring ``env`` supplies (floats or jets)."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise EvalError(f"unbound variable {node.name!r}") from None
    if isinstance(node, Unary):
        v = evaluate(node.arg, env)
        try:
            if node.fn == "neg":
                return -v
            if isinstance(v, numbers.Real):
                return _MATH_FN[node.fn](v)
            return getattr(v, node.fn)()
        except (ValueError, OverflowError, JetDomainError) as exc:
            raise EvalError(f"{exc} in '{to_text(node)}'") from None
    if isinstance(node, Binary):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        try:
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a / b
        except (ZeroDivisionError, JetDomainError) as exc:
            raise EvalError(f"{exc} in '{to_text(node)}'") from None
    if isinstance(node, Pow):
        base = evaluate(node.base, env)
        try:
            if isinstance(base, numbers.Real) and not isinstance(node.exponent, int):
                if base <= 0.0:
                    raise EvalError(
                        f"real power requires a positive base in '{to_text(node)}'"
                    )
            return base**node.exponent
        except (ZeroDivisionError, OverflowError, JetDomainError) as exc:
            raise EvalError(f"{exc} in '{to_text(node)}'") from None
    raise TypeError(f"not an expression node: {node!r}")


def free_vars(node: Expr) -> frozenset[str]:
    """Names occurring in the tree (purely syntactic, no simplification)."""
    if isinstance(node, Const):
        return frozenset()
    if isinstance(node, Var):
        return frozenset((node.name,))
    if isinstance(node, Unary):
        return free_vars(node.arg)
    if isinstance(node, Binary):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Pow):
        return free_vars(node.base)
    raise TypeError(f"not an expression node: {node!r}")


# precedence levels for printing; parenthesize any child that binds looser
_PREC_SUM, _PREC_PRODUCT, _PREC_UNARY, _PREC_POWER, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PREC_SUM if node.op in "+-" else _PREC_PRODUCT
    if isinstance(node, Unary):
        return _PREC_ATOM if node.fn != "neg" else _PREC_UNARY
    if isinstance(node, Pow):
        return _PREC_POWER
    return _PREC_ATOM


def _number_text(value) -> str:
    f = float(value)
    if f.is_integer() and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


def to_text(node: Expr) -> str:
    """Canonical rendering; ``parse . to_text`` is the identity on trees."""
    if isinstance(node, Const):
        return _number_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.fn == "neg":
            inner = to_text(node.arg)
            if _prec(node.arg) < _PREC_UNARY:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.fn}({to_text(node.arg)})"
    if isinstance(node, Binary):
        left = to_text(node.left)
        right = to_text(node.right)
        mine = _prec(node)
        if _prec(node.left) < mine:
            left = f"({left})"
        # parsing is left-associative, so a right child at the same level
        # must keep its parentheses to reparse to the same tree
        if _prec(node.right) <= mine:
            right = f"({right})"
        joiner = f" {node.op} " if node.op in "+-" else node.op
        return f"{left}{joiner}{right}"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < _PREC_ATOM:
            base = f"({base})"
        return f"{base}^{_number_text(node.exponent)}"
    raise TypeError(f"not an expression node: {node!r}")
