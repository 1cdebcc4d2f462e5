"""Truncated multivariate Taylor arithmetic (jets).

A jet of order ``N`` in ``dim`` variables stores the Taylor coefficients
``c_alpha = (d^alpha f)(p) / alpha!`` for every multi-index with
``|alpha| <= N``. Multi-indices are ordered by total degree first, so the
coefficients of a lower-order truncation are a prefix of the array.

``JetArray`` holds a whole array of jets: the trailing axis runs over the
multi-indices and every leading axis is a tensor index. Arithmetic on
``JetArray`` is exact up to the truncation order.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Callable, Sequence, Union

import numpy as np

from curvlab.config import settings
from curvlab.core import expression as ex
from curvlab.core.expression import ScalarExpr
from curvlab.exceptions import DomainError, InvalidArgumentError

MAX_ORDER = 4

MultiIndex = tuple[int, ...]


def graded_multi_indices(dim: int, order: int) -> tuple[MultiIndex, ...]:
    """All exponent tuples of total degree <= order, degree-major."""
    result: list[MultiIndex] = []
    for degree in range(order + 1):
        for combo in combinations_with_replacement(range(dim), degree):
            alpha = [0] * dim
            for axis in combo:
                alpha[axis] += 1
            result.append(tuple(alpha))
    return tuple(result)


class JetAlgebra:
    """Multiplication and differentiation tables for one (dim, order)."""

    def __init__(self, dim: int, order: int):
        if not 0 <= order <= MAX_ORDER:
            raise InvalidArgumentError(
                f"jet order must lie in 0..{MAX_ORDER}, got {order}"
            )
        if dim < 1:
            raise InvalidArgumentError(f"jet dimension must be positive, got {dim}")
        self.dim = dim
        self.order = order
        self.multi_indices = graded_multi_indices(dim, order)
        self.size = len(self.multi_indices)
        self.position = {alpha: k for k, alpha in enumerate(self.multi_indices)}
        self.degrees = np.array([sum(alpha) for alpha in self.multi_indices])
        self.factorials = np.array(
            [
                math.prod(math.factorial(a) for a in alpha)
                for alpha in self.multi_indices
            ],
            dtype=float,
        )

        left, right, target = [], [], []
        for a, alpha in enumerate(self.multi_indices):
            for b, beta in enumerate(self.multi_indices):
                if self.degrees[a] + self.degrees[b] > order:
                    # beta runs degree-major, nothing later fits either
                    break
                left.append(a)
                right.append(b)
                target.append(self.position[tuple(x + y for x, y in zip(alpha, beta))])
        self.left = np.array(left, dtype=np.intp)
        self.right = np.array(right, dtype=np.intp)
        self.scatter = np.zeros((len(target), self.size))
        self.scatter[np.arange(len(target)), target] = 1.0
        self._derivative_tables: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def derivative_table(self, axis: int) -> tuple[np.ndarray, np.ndarray]:
        """Source slots and factors of d/dx_axis into the order-1 lower algebra."""
        if axis not in self._derivative_tables:
            lower = jet_algebra(self.dim, self.order - 1)
            source, factor = [], []
            for alpha in lower.multi_indices:
                raised = list(alpha)
                raised[axis] += 1
                source.append(self.position[tuple(raised)])
                factor.append(float(raised[axis]))
            self._derivative_tables[axis] = (
                np.array(source, dtype=np.intp),
                np.array(factor),
            )
        return self._derivative_tables[axis]


@lru_cache(maxsize=None)
def jet_algebra(dim: int, order: int) -> JetAlgebra:
    """Shared, read-only algebra tables."""
    return JetAlgebra(dim, order)


Operand = Union["JetArray", np.ndarray, float]


class JetArray:
    """Array of jets over a common algebra; the last data axis holds coefficients."""

    __slots__ = ("data", "algebra")

    def __init__(self, data: np.ndarray, algebra: JetAlgebra):
        if data.shape[-1] != algebra.size:
            raise InvalidArgumentError(
                f"coefficient axis has {data.shape[-1]} slots, "
                f"algebra needs {algebra.size}"
            )
        self.data = data
        self.algebra = algebra

    @classmethod
    def constant(cls, values: np.ndarray | float, algebra: JetAlgebra) -> JetArray:
        values = np.asarray(values, dtype=float)
        data = np.zeros(values.shape + (algebra.size,))
        data[..., 0] = values
        return cls(data, algebra)

    @classmethod
    def coordinate(cls, axis: int, value: float, algebra: JetAlgebra) -> JetArray:
        data = np.zeros(algebra.size)
        data[0] = value
        if algebra.order >= 1:
            unit = [0] * algebra.dim
            unit[axis] = 1
            data[algebra.position[tuple(unit)]] = 1.0
        return cls(data, algebra)

    @classmethod
    def stack(cls, items: Sequence[JetArray], axis: int = 0) -> JetArray:
        algebra = _common_algebra(*items)
        data = [item.truncate(algebra.order).data for item in items]
        if axis < 0:
            axis -= 1
        return cls(np.stack(data, axis=axis), algebra)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape[:-1]

    @property
    def order(self) -> int:
        return self.algebra.order

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def value(self) -> np.ndarray:
        """Order-0 slot (the plain values)."""
        return self.data[..., 0]

    def partials(self) -> np.ndarray:
        """Partial derivatives ``d^alpha f`` in the algebra's multi-index order."""
        return self.data * self.algebra.factorials

    def partial(self, alpha: Sequence[int]) -> np.ndarray:
        """Partial derivative for one multi-index."""
        slot = self.algebra.position[tuple(alpha)]
        return self.data[..., slot] * self.algebra.factorials[slot]

    def truncate(self, order: int) -> JetArray:
        if order == self.order:
            return self
        if order > self.order:
            raise InvalidArgumentError(
                f"cannot raise jet order {self.order} to {order}"
            )
        lower = jet_algebra(self.dim, order)
        return JetArray(self.data[..., : lower.size], lower)

    def derivative(self, axis: int) -> JetArray:
        """d/dx_axis; the result has one order less."""
        if self.order == 0:
            raise InvalidArgumentError("cannot differentiate an order-0 jet")
        source, factor = self.algebra.derivative_table(axis)
        return JetArray(
            self.data[..., source] * factor, jet_algebra(self.dim, self.order - 1)
        )

    def gradient(self) -> JetArray:
        """All first derivatives, stacked on a new leading axis."""
        return JetArray.stack([self.derivative(i) for i in range(self.dim)], axis=0)

    def without_constant(self) -> JetArray:
        data = self.data.copy()
        data[..., 0] = 0.0
        return JetArray(data, self.algebra)

    def transpose(self, *axes: int) -> JetArray:
        return JetArray(
            np.transpose(self.data, (*axes, self.data.ndim - 1)), self.algebra
        )

    def sum(self, axis: int | tuple[int, ...]) -> JetArray:
        axes = (axis,) if isinstance(axis, int) else axis
        axes = tuple(a if a >= 0 else a - 1 for a in axes)
        return JetArray(self.data.sum(axis=axes), self.algebra)

    def __getitem__(self, key: object) -> JetArray:
        return JetArray(self.data[key], self.algebra)  # type: ignore[index]

    def __add__(self, other: Operand) -> JetArray:
        if isinstance(other, JetArray):
            a, b = _coerce(self, other)
            return JetArray(a.data + b.data, a.algebra)
        return self + JetArray.constant(
            np.broadcast_to(other, self.shape), self.algebra
        )

    __radd__ = __add__

    def __neg__(self) -> JetArray:
        return JetArray(-self.data, self.algebra)

    def __sub__(self, other: Operand) -> JetArray:
        return self + (-other)

    def __rsub__(self, other: Operand) -> JetArray:
        return (-self) + other

    def __mul__(self, other: Operand) -> JetArray:
        if isinstance(other, JetArray):
            a, b = _coerce(self, other)
            algebra = a.algebra
            pairs = a.data[..., algebra.left] * b.data[..., algebra.right]
            return JetArray(pairs @ algebra.scatter, algebra)
        scale = np.asarray(other, dtype=float)
        return JetArray(self.data * scale[..., None], self.algebra)

    __rmul__ = __mul__

    def __truediv__(self, other: Operand) -> JetArray:
        if isinstance(other, JetArray):
            return self * reciprocal(other)
        return self * (1.0 / np.asarray(other, dtype=float))

    def __repr__(self) -> str:
        return f"JetArray(shape={self.shape}, dim={self.dim}, order={self.order})"


# A scalar jet is a JetArray with empty leading shape.
Jet = JetArray


def _common_algebra(*items: JetArray) -> JetAlgebra:
    dims = {item.dim for item in items}
    if len(dims) != 1:
        raise InvalidArgumentError(f"jets over different dimensions: {sorted(dims)}")
    return jet_algebra(dims.pop(), min(item.order for item in items))


def _coerce(a: JetArray, b: JetArray) -> tuple[JetArray, JetArray]:
    algebra = _common_algebra(a, b)
    return a.truncate(algebra.order), b.truncate(algebra.order)


def jet_einsum(subscripts: str, a: Operand, b: Operand) -> JetArray:
    """Tensor contraction of two jet (or constant) arrays.

    Subscripts use lowercase letters for tensor indices only; the
    coefficient axis is handled implicitly.

    Args:
        subscripts: numpy einsum specification, e.g. ``"ik,kj->ij"``
        a: Left operand
        b: Right operand

    Returns:
        JetArray: Contracted jet array
    """
    inputs, output = subscripts.replace(" ", "").split("->")
    sa, sb = inputs.split(",")
    if isinstance(a, JetArray) and isinstance(b, JetArray):
        a, b = _coerce(a, b)
        algebra = a.algebra
        pairs = np.einsum(
            f"{sa}P,{sb}P->{output}P",
            a.data[..., algebra.left],
            b.data[..., algebra.right],
            optimize=True,
        )
        return JetArray(pairs @ algebra.scatter, algebra)
    if isinstance(a, JetArray):
        data = np.einsum(f"{sa}K,{sb}->{output}K", a.data, np.asarray(b), optimize=True)
        return JetArray(data, a.algebra)
    if isinstance(b, JetArray):
        data = np.einsum(f"{sa},{sb}K->{output}K", np.asarray(a), b.data, optimize=True)
        return JetArray(data, b.algebra)
    raise InvalidArgumentError("jet_einsum needs at least one jet operand")


def compose(u: JetArray, derivatives: Sequence[np.ndarray]) -> JetArray:
    """Apply a unary function given its derivatives at the base value.

    ``f(u0 + d) = sum_k f^(k)(u0) / k! * d^k``, exact to the jet order.
    """
    delta = u.without_constant()
    result = JetArray.constant(derivatives[0], u.algebra)
    term: JetArray | None = None
    for k in range(1, u.order + 1):
        term = delta if term is None else term * delta
        result = result + term * (np.asarray(derivatives[k]) / math.factorial(k))
    return result


def _cyclic(values: Sequence[np.ndarray], order: int) -> list[np.ndarray]:
    return [values[k % 4] for k in range(order + 1)]


def jet_exp(u: JetArray) -> JetArray:
    e = np.exp(u.value)
    return compose(u, [e] * (u.order + 1))


def jet_sin(u: JetArray) -> JetArray:
    s, c = np.sin(u.value), np.cos(u.value)
    return compose(u, _cyclic([s, c, -s, -c], u.order))


def jet_cos(u: JetArray) -> JetArray:
    s, c = np.sin(u.value), np.cos(u.value)
    return compose(u, _cyclic([c, -s, -c, s], u.order))


def jet_tan(u: JetArray) -> JetArray:
    return jet_sin(u) / jet_cos(u)


def jet_log(u: JetArray) -> JetArray:
    x = u.value
    derivatives = [np.log(x)]
    for k in range(1, u.order + 1):
        derivatives.append((-1.0) ** (k - 1) * math.factorial(k - 1) / x**k)
    return compose(u, derivatives)


def jet_pow(u: JetArray, exponent: float) -> JetArray:
    """Constant power. Nonnegative integer exponents are exact at u0 = 0."""
    x = u.value
    integral = float(exponent).is_integer() and exponent >= 0
    derivatives = []
    falling = 1.0
    for k in range(u.order + 1):
        if integral and k > exponent:
            derivatives.append(np.zeros_like(x))
        else:
            derivatives.append(falling * np.power(x, exponent - k))
        falling *= exponent - k
    return compose(u, derivatives)


def reciprocal(u: JetArray) -> JetArray:
    return jet_pow(u, -1.0)


def jet_sqrt(u: JetArray) -> JetArray:
    return jet_pow(u, 0.5)


_UNARY_JET: dict[ex.UnaryOp, Callable[[JetArray], JetArray]] = {
    ex.UnaryOp.NEG: lambda u: -u,
    ex.UnaryOp.SIN: jet_sin,
    ex.UnaryOp.COS: jet_cos,
    ex.UnaryOp.TAN: jet_tan,
    ex.UnaryOp.EXP: jet_exp,
    ex.UnaryOp.LOG: jet_log,
    ex.UnaryOp.SQRT: jet_sqrt,
}


class JetEvaluator:
    """Evaluates expression trees to jets at one point, sharing common subtrees."""

    def __init__(
        self,
        coords: Sequence[float],
        order: int,
        coord_names: Sequence[str] | None = None,
        division_epsilon: float | None = None,
    ):
        """Initialize the evaluator.

        Args:
            coords: Point coordinates
            order: Jet order (0..4)
            coord_names: Names used in domain error messages
            division_epsilon: Smallest admissible |denominator|
        """
        self.coords = tuple(float(c) for c in coords)
        self.algebra = jet_algebra(len(self.coords), order)
        self.coord_names = list(
            coord_names or [f"x{i}" for i in range(len(self.coords))]
        )
        self.division_epsilon = (
            settings.division_epsilon if division_epsilon is None else division_epsilon
        )
        self._cache: dict[ScalarExpr, JetArray] = {}

    def __call__(self, expr: ScalarExpr) -> JetArray:
        cached = self._cache.get(expr)
        if cached is None:
            cached = self._evaluate(expr)
            self._cache[expr] = cached
        return cached

    def _where(self, expr: ScalarExpr) -> str:
        return ex.to_text(expr, self.coord_names)

    def _evaluate(self, expr: ScalarExpr) -> JetArray:
        if isinstance(expr, ex.Const):
            return JetArray.constant(expr.value, self.algebra)
        if isinstance(expr, ex.Var):
            if expr.index >= len(self.coords):
                raise InvalidArgumentError(
                    f"coordinate index {expr.index} outside a {len(self.coords)}-point"
                )
            return JetArray.coordinate(
                expr.index, self.coords[expr.index], self.algebra
            )
        if isinstance(expr, ex.Unary):
            arg = self(expr.arg)
            self._check_unary(expr, float(arg.value))
            return _UNARY_JET[expr.op](arg)
        left = self(expr.left)
        if expr.op is ex.BinaryOp.POW:
            assert isinstance(expr.right, ex.Const)
            self._check_power(expr, float(left.value), expr.right.value)
            return jet_pow(left, expr.right.value)
        right = self(expr.right)
        if expr.op is ex.BinaryOp.ADD:
            return left + right
        if expr.op is ex.BinaryOp.SUB:
            return left - right
        if expr.op is ex.BinaryOp.MUL:
            return left * right
        if abs(float(right.value)) < self.division_epsilon:
            raise DomainError("division by a value near zero", self._where(expr))
        return left * reciprocal(right)

    def _check_unary(self, expr: ex.Unary, x: float) -> None:
        if expr.op is ex.UnaryOp.LOG and x <= 0:
            raise DomainError(f"log of nonpositive value {x:.6g}", self._where(expr))
        at_zero = x == 0 and self.algebra.order > 0
        if expr.op is ex.UnaryOp.SQRT and (x < 0 or at_zero):
            raise DomainError(f"sqrt not differentiable at {x:.6g}", self._where(expr))
        if expr.op is ex.UnaryOp.TAN and abs(math.cos(x)) < self.division_epsilon:
            raise DomainError("tan at a pole", self._where(expr))

    def _check_power(self, expr: ex.Binary, x: float, exponent: float) -> None:
        if float(exponent).is_integer():
            if exponent < 0 and abs(x) < self.division_epsilon:
                raise DomainError(
                    "negative power of a value near zero", self._where(expr)
                )
            return
        if x < 0 or (x == 0 and (self.algebra.order > 0 or exponent < 0)):
            raise DomainError(
                f"fractional power of {x:.6g} is not smooth", self._where(expr)
            )


def eval_jet(
    expr: ScalarExpr,
    coords: Sequence[float],
    order: int,
    coord_names: Sequence[str] | None = None,
) -> JetArray:
    """Jet of an expression at a point.

    Args:
        expr: Expression tree
        coords: Point coordinates (length = chart dimension)
        order: Highest derivative order (0..4)
        coord_names: Coordinate names for error messages

    Returns:
        JetArray: Scalar jet holding every partial derivative up to ``order``

    Raises:
        DomainError: If evaluation leaves the domain of a node
    """
    return JetEvaluator(coords, order, coord_names)(expr)
