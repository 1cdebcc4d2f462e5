"""Recursive-descent parser for the metric expression language.

Grammar (precedence from loosest to tightest)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := ['-'] number | '(' expr ')'      # must fold to a constant
    atom     := number | ident | ident '(' expr ')' | '(' expr ')'

Identifiers are the functions sin, cos, tan, exp, log, sqrt, the constant
``pi``, or coordinate names. Error offsets are byte offsets into the text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NoReturn, Sequence

from curvlab.core import expression as ex
from curvlab.core.expression import ScalarExpr
from curvlab.exceptions import (
    ArityError,
    DomainError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)

NAMED_CONSTANTS = {"pi": math.pi}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    """Split expression text into tokens carrying byte offsets.

    Raises:
        ExpressionSyntaxError: On a character outside the language
    """
    tokens: list[Token] = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise ExpressionSyntaxError(
                f"unexpected character {text[position]!r}",
                _byte_offset(text, position),
                text,
            )
        kind = match.lastgroup
        assert kind is not None
        if kind != "ws":
            tokens.append(Token(kind, match.group(), _byte_offset(text, position)))
        position = match.end()
    tokens.append(Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def fold_constant(expr: ScalarExpr) -> float:
    """Evaluate a coordinate-free expression to a float.

    Raises:
        DomainError: If the expression leaves the real domain
    """
    if isinstance(expr, ex.Const):
        return expr.value
    if isinstance(expr, ex.Var):
        raise ValueError("expression depends on a coordinate")
    if isinstance(expr, ex.Unary):
        x = fold_constant(expr.arg)
        try:
            return _UNARY_FLOAT[expr.op](x)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(str(exc), expr.op.value) from exc
    left = fold_constant(expr.left)
    right = fold_constant(expr.right)
    try:
        return _BINARY_FLOAT[expr.op](left, right)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(str(exc), expr.op.value) from exc


_UNARY_FLOAT = {
    ex.UnaryOp.NEG: lambda x: -x,
    ex.UnaryOp.SIN: math.sin,
    ex.UnaryOp.COS: math.cos,
    ex.UnaryOp.TAN: math.tan,
    ex.UnaryOp.EXP: math.exp,
    ex.UnaryOp.LOG: math.log,
    ex.UnaryOp.SQRT: math.sqrt,
}

_BINARY_FLOAT = {
    ex.BinaryOp.ADD: lambda a, b: a + b,
    ex.BinaryOp.SUB: lambda a, b: a - b,
    ex.BinaryOp.MUL: lambda a, b: a * b,
    ex.BinaryOp.DIV: lambda a, b: a / b,
    ex.BinaryOp.POW: math.pow,
}


class ExpressionParser:
    """Parser over one expression text for a fixed chart."""

    def __init__(self, text: str, coord_names: Sequence[str]):
        """Initialize the parser.

        Args:
            text: Expression text
            coord_names: Names of the chart coordinates, in index order
        """
        self.text = text
        self.coord_index = {name: i for i, name in enumerate(coord_names)}
        self.tokens = tokenize(text)
        self.position = 0

    def parse(self) -> ScalarExpr:
        """Parse the whole text as one expression."""
        tree = self._expr()
        token = self._peek()
        if token.kind != "end":
            self._fail(f"unexpected {token.text!r}", token)
        return tree

    def _peek(self) -> Token:
        return self.tokens[self.position]

    def _advance(self) -> Token:
        token = self.tokens[self.position]
        self.position += 1
        return token

    def _accept(self, symbol: str) -> Token | None:
        token = self._peek()
        if token.kind == "op" and token.text == symbol:
            self.position += 1
            return token
        return None

    def _expect(self, symbol: str) -> Token:
        token = self._accept(symbol)
        if token is None:
            found = self._peek()
            self._fail(
                f"expected {symbol!r}, found {found.text or 'end of input'!r}", found
            )
        return token

    def _fail(self, message: str, token: Token) -> NoReturn:
        raise ExpressionSyntaxError(message, token.offset, self.text)

    def _expr(self) -> ScalarExpr:
        node = self._term()
        while True:
            if self._accept("+"):
                node = ex.add(node, self._term())
            elif self._accept("-"):
                node = ex.sub(node, self._term())
            else:
                return node

    def _term(self) -> ScalarExpr:
        node = self._unary()
        while True:
            if self._accept("*"):
                node = ex.mul(node, self._unary())
            elif self._accept("/"):
                node = ex.div(node, self._unary())
            else:
                return node

    def _unary(self) -> ScalarExpr:
        if self._accept("-"):
            return ex.neg(self._unary())
        return self._power()

    def _power(self) -> ScalarExpr:
        base = self._atom()
        caret = self._accept("^")
        if caret is None:
            return base
        return ex.power(base, self._exponent())

    def _exponent(self) -> float:
        start = self._peek()
        if self._accept("("):
            inner = self._expr()
            self._expect(")")
            if not ex.is_constant(inner):
                self._fail("exponent must be a constant expression", start)
            return fold_constant(inner)
        sign = -1.0 if self._accept("-") else 1.0
        token = self._advance()
        if token.kind == "number":
            return sign * float(token.text)
        if token.kind == "ident" and token.text in NAMED_CONSTANTS:
            return sign * NAMED_CONSTANTS[token.text]
        self._fail("exponent must be a number or a parenthesized constant", token)

    def _atom(self) -> ScalarExpr:
        token = self._advance()
        if token.kind == "number":
            return ex.const(float(token.text))
        if token.kind == "op" and token.text == "(":
            inner = self._expr()
            self._expect(")")
            return inner
        if token.kind == "ident":
            return self._identifier(token)
        self._fail(f"unexpected {token.text or 'end of input'!r}", token)

    def _identifier(self, token: Token) -> ScalarExpr:
        name = token.text
        if name in ex.FUNCTION_NAMES:
            if self._accept("(") is None:
                raise ArityError(
                    f"function '{name}' takes one argument", token.offset, self.text
                )
            argument = self._expr()
            if self._peek().text == ",":
                raise ArityError(
                    f"function '{name}' takes exactly one argument",
                    self._peek().offset,
                    self.text,
                )
            self._expect(")")
            return ex.apply(name, argument)
        if name in self.coord_index:
            node: ScalarExpr = ex.var(self.coord_index[name])
        elif name in NAMED_CONSTANTS:
            node = ex.const(NAMED_CONSTANTS[name])
        else:
            raise UnknownIdentifierError(
                f"unknown identifier '{name}'", token.offset, self.text
            )
        if self._peek().text == "(":
            raise ArityError(
                f"'{name}' is not a function", self._peek().offset, self.text
            )
        return node


def parse_expr(text: str, coord_names: Sequence[str]) -> ScalarExpr:
    """Parse expression text against a chart's coordinate names.

    Args:
        text: Expression in the metric language
        coord_names: Coordinate names in index order

    Returns:
        ScalarExpr: Expression tree

    Raises:
        ExpressionSyntaxError: On malformed text (with byte offset)
        UnknownIdentifierError: On an identifier that is not a coordinate or function
        ArityError: On a function applied to the wrong number of arguments
    """
    return ExpressionParser(text, coord_names).parse()
