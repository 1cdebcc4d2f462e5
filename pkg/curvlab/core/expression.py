"""Expression trees for metric components and structure fields.

A ``ScalarExpr`` is an immutable tree over constants, chart coordinates,
the unary functions of the metric language and the four arithmetic
operations plus constant powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence, Union

from curvlab.exceptions import StructuralValidationError


class UnaryOp(str, Enum):
    """Unary node kinds."""

    NEG = "neg"
    SIN = "sin"
    COS = "cos"
    TAN = "tan"
    EXP = "exp"
    LOG = "log"
    SQRT = "sqrt"


class BinaryOp(str, Enum):
    """Binary node kinds."""

    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    POW = "pow"


FUNCTION_NAMES = frozenset(op.value for op in UnaryOp if op is not UnaryOp.NEG)

_BINARY_SYMBOL = {
    BinaryOp.ADD: "+",
    BinaryOp.SUB: "-",
    BinaryOp.MUL: "*",
    BinaryOp.DIV: "/",
    BinaryOp.POW: "^",
}

# Printing precedence: sums < products < negation < powers < atoms.
_PREC_SUM, _PREC_PRODUCT, _PREC_UNARY, _PREC_POWER, _PREC_ATOM = 1, 2, 3, 4, 5


@dataclass(frozen=True)
class Const:
    """Real constant."""

    value: float


@dataclass(frozen=True)
class Var:
    """Chart coordinate, addressed by its index."""

    index: int


@dataclass(frozen=True)
class Unary:
    """Negation or one of the elementary functions."""

    op: UnaryOp
    arg: ScalarExpr


@dataclass(frozen=True)
class Binary:
    """Arithmetic node. For ``POW`` the right operand is a ``Const``."""

    op: BinaryOp
    left: ScalarExpr
    right: ScalarExpr

    def __post_init__(self) -> None:
        if self.op is BinaryOp.POW and not isinstance(self.right, Const):
            raise StructuralValidationError("pow exponent must be a constant node")


ScalarExpr = Union[Const, Var, Unary, Binary]


def const(value: float) -> Const:
    """Build a constant node."""
    return Const(float(value))


def var(index: int) -> Var:
    """Build a coordinate node."""
    if index < 0:
        raise StructuralValidationError(f"negative coordinate index {index}")
    return Var(index)


def add(left: ScalarExpr, right: ScalarExpr) -> Binary:
    return Binary(BinaryOp.ADD, left, right)


def sub(left: ScalarExpr, right: ScalarExpr) -> Binary:
    return Binary(BinaryOp.SUB, left, right)


def mul(left: ScalarExpr, right: ScalarExpr) -> Binary:
    return Binary(BinaryOp.MUL, left, right)


def div(left: ScalarExpr, right: ScalarExpr) -> Binary:
    return Binary(BinaryOp.DIV, left, right)


def power(base: ScalarExpr, exponent: float) -> Binary:
    return Binary(BinaryOp.POW, base, Const(float(exponent)))


def neg(arg: ScalarExpr) -> ScalarExpr:
    """Negate, folding negated constants."""
    if isinstance(arg, Const):
        return Const(-arg.value)
    return Unary(UnaryOp.NEG, arg)


def apply(name: str, arg: ScalarExpr) -> Unary:
    """Apply the named elementary function."""
    return Unary(UnaryOp(name), arg)


def children(expr: ScalarExpr) -> tuple[ScalarExpr, ...]:
    """Direct subtrees of a node."""
    if isinstance(expr, Unary):
        return (expr.arg,)
    if isinstance(expr, Binary):
        return (expr.left, expr.right)
    return ()


def walk(expr: ScalarExpr) -> Iterator[ScalarExpr]:
    """Pre-order traversal."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def max_variable_index(expr: ScalarExpr) -> int:
    """Largest coordinate index used, or -1 for a constant expression."""
    return max((node.index for node in walk(expr) if isinstance(node, Var)), default=-1)


def is_constant(expr: ScalarExpr) -> bool:
    return max_variable_index(expr) < 0


def validate_chart(expr: ScalarExpr, dim: int) -> None:
    """Check that every coordinate index is below the chart dimension.

    Raises:
        StructuralValidationError: If a variable index is out of range
    """
    top = max_variable_index(expr)
    if top >= dim:
        raise StructuralValidationError(
            f"coordinate index {top} out of range for a {dim}-dimensional chart"
        )


def shift_variables(expr: ScalarExpr, offset: int) -> ScalarExpr:
    """Renumber coordinates ``i -> i + offset`` (used to embed fiber charts)."""
    if isinstance(expr, Var):
        return Var(expr.index + offset)
    if isinstance(expr, Unary):
        return Unary(expr.op, shift_variables(expr.arg, offset))
    if isinstance(expr, Binary):
        return Binary(
            expr.op,
            shift_variables(expr.left, offset),
            shift_variables(expr.right, offset),
        )
    return expr


def format_number(value: float) -> str:
    """Shortest text that parses back to exactly ``value``."""
    if math.isfinite(value) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _precedence(expr: ScalarExpr) -> int:
    if isinstance(expr, Const):
        return _PREC_UNARY if expr.value < 0 else _PREC_ATOM
    if isinstance(expr, Var):
        return _PREC_ATOM
    if isinstance(expr, Unary):
        return _PREC_UNARY if expr.op is UnaryOp.NEG else _PREC_ATOM
    if expr.op in (BinaryOp.ADD, BinaryOp.SUB):
        return _PREC_SUM
    if expr.op in (BinaryOp.MUL, BinaryOp.DIV):
        return _PREC_PRODUCT
    return _PREC_POWER


def to_text(expr: ScalarExpr, coord_names: Sequence[str]) -> str:
    """Print an expression in the metric language.

    The output re-parses to a structurally equal tree.

    Args:
        expr: Expression to print
        coord_names: Coordinate names indexed by variable index

    Returns:
        str: Expression text
    """

    def wrap(node: ScalarExpr, minimum: int) -> str:
        text = render(node)
        return f"({text})" if _precedence(node) < minimum else text

    def render(node: ScalarExpr) -> str:
        if isinstance(node, Const):
            return format_number(node.value)
        if isinstance(node, Var):
            return coord_names[node.index]
        if isinstance(node, Unary):
            if node.op is UnaryOp.NEG:
                return f"-{wrap(node.arg, _PREC_UNARY)}"
            return f"{node.op.value}({render(node.arg)})"
        symbol = _BINARY_SYMBOL[node.op]
        if node.op is BinaryOp.POW:
            assert isinstance(node.right, Const)
            return f"{wrap(node.left, _PREC_ATOM)}^{format_number(node.right.value)}"
        if node.op in (BinaryOp.ADD, BinaryOp.SUB):
            left, right = wrap(node.left, _PREC_SUM), wrap(node.right, _PREC_PRODUCT)
        else:
            left, right = wrap(node.left, _PREC_PRODUCT), wrap(node.right, _PREC_UNARY)
        return f"{left} {symbol} {right}"

    return render(expr)
