"""Metric fields on a single chart and their jets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from curvlab.config import settings
from curvlab.core import expression as ex
from curvlab.core.expression import ScalarExpr
from curvlab.core.jets import JetArray, JetEvaluator, jet_einsum
from curvlab.exceptions import (
    DegenerateMetricError,
    InvalidArgumentError,
    StructuralValidationError,
)


@dataclass(frozen=True)
class Point:
    """Chart coordinates of a point."""

    coords: tuple[float, ...]

    @classmethod
    def of(cls, *coords: float) -> Point:
        return cls(tuple(float(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lower, upper)``."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise StructuralValidationError(
                f"empty interval ({self.lower}, {self.upper})"
            )

    def contains(self, x: float) -> bool:
        return self.lower < x < self.upper

    def shrink(self, margin: float) -> Interval:
        """Drop ``margin`` of the width from each end."""
        width = self.upper - self.lower
        return Interval(self.lower + margin * width, self.upper - margin * width)


@dataclass(frozen=True)
class DomainBox:
    """Product of open intervals, one per coordinate."""

    intervals: tuple[Interval, ...]

    @classmethod
    def of(cls, *bounds: tuple[float, float]) -> DomainBox:
        return cls(tuple(Interval(float(lo), float(hi)) for lo, hi in bounds))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def contains(self, point: Point) -> bool:
        return point.dim == self.dim and all(
            interval.contains(x) for interval, x in zip(self.intervals, point.coords)
        )

    def shrink(self, margin: float) -> DomainBox:
        return DomainBox(tuple(interval.shrink(margin) for interval in self.intervals))


@dataclass(frozen=True)
class MetricField:
    """Symmetric matrix of expressions over a box-shaped chart.

    ``components[i][j]`` and ``components[j][i]`` are the same expression
    object; build instances with :meth:`from_lower_triangle`.
    """

    label: str
    coord_names: tuple[str, ...]
    components: tuple[tuple[ScalarExpr, ...], ...]
    signature: tuple[int, ...]
    domain: DomainBox

    def __post_init__(self) -> None:
        n = len(self.coord_names)
        if n < 2:
            raise StructuralValidationError(
                f"metric '{self.label}' needs dimension >= 2"
            )
        if len(set(self.coord_names)) != n:
            raise StructuralValidationError(
                f"metric '{self.label}' repeats a coordinate name"
            )
        if len(self.components) != n or any(len(row) != n for row in self.components):
            raise StructuralValidationError(
                f"metric '{self.label}' component matrix is not {n}x{n}"
            )
        if len(self.signature) != n or any(s not in (1, -1) for s in self.signature):
            raise StructuralValidationError(
                f"metric '{self.label}' signature must list {n} signs of +-1"
            )
        if self.domain.dim != n:
            raise StructuralValidationError(
                f"metric '{self.label}' domain has {self.domain.dim} intervals, "
                f"expected {n}"
            )
        for i in range(n):
            for j in range(n):
                if self.components[i][j] != self.components[j][i]:
                    raise StructuralValidationError(
                        f"metric '{self.label}' is not symmetric in ({i}, {j})"
                    )
                ex.validate_chart(self.components[i][j], n)

    @classmethod
    def from_lower_triangle(
        cls,
        label: str,
        coord_names: Sequence[str],
        entries: dict[tuple[int, int], ScalarExpr],
        signature: Sequence[int],
        domain: DomainBox,
    ) -> MetricField:
        """Build a metric from ``(i, j)`` entries; missing entries are zero."""
        n = len(coord_names)
        zero = ex.const(0.0)
        rows = [[zero] * n for _ in range(n)]
        for (i, j), expr in entries.items():
            if not (0 <= i < n and 0 <= j < n):
                raise StructuralValidationError(
                    f"component g_{i}{j} outside a {n}-chart"
                )
            rows[i][j] = expr
            rows[j][i] = expr
        return cls(
            label=label,
            coord_names=tuple(coord_names),
            components=tuple(tuple(row) for row in rows),
            signature=tuple(int(s) for s in signature),
            domain=domain,
        )

    @classmethod
    def diagonal(
        cls,
        label: str,
        coord_names: Sequence[str],
        diagonal: Sequence[ScalarExpr],
        signature: Sequence[int],
        domain: DomainBox,
    ) -> MetricField:
        return cls.from_lower_triangle(
            label,
            coord_names,
            {(i, i): e for i, e in enumerate(diagonal)},
            signature,
            domain,
        )

    @property
    def dim(self) -> int:
        return len(self.coord_names)

    @property
    def is_riemannian(self) -> bool:
        return all(s == 1 for s in self.signature)

    def lower_triangle(self) -> list[tuple[int, int, ScalarExpr]]:
        """Nonzero ``(i, j, g_ij)`` with ``i >= j``."""
        result = []
        for i in range(self.dim):
            for j in range(i + 1):
                expr = self.components[i][j]
                if not (isinstance(expr, ex.Const) and expr.value == 0.0):
                    result.append((i, j, expr))
        return result

    def scaled(self, factor: float, label: str | None = None) -> MetricField:
        """Constant multiple ``c * g``."""
        c = ex.const(factor)
        rows = tuple(tuple(ex.mul(c, e) for e in row) for row in self.components)
        return MetricField(
            label or f"{factor:g}*{self.label}",
            self.coord_names,
            rows,
            self.signature,
            self.domain,
        )


def _check_point(m: MetricField, p: Point) -> None:
    if p.dim != m.dim:
        raise InvalidArgumentError(
            f"{p.dim}-point used with {m.dim}-dimensional metric"
        )
    if not m.domain.contains(p):
        raise InvalidArgumentError(
            f"point {p.coords} outside the domain of '{m.label}'"
        )


def metric_jets(
    m: MetricField,
    p: Point,
    order: int,
    degeneracy_epsilon: float | None = None,
) -> JetArray:
    """Jets of all metric components at a point.

    Args:
        m: Metric field
        p: Point inside the metric's domain
        order: Highest derivative order (0..4)
        degeneracy_epsilon: Floor for |det g|; defaults to the configured one

    Returns:
        JetArray: Shape (n, n); entries (i, j) and (j, i) are bitwise equal

    Raises:
        DegenerateMetricError: If |det g| <= the degeneracy floor
    """
    _check_point(m, p)
    evaluate = JetEvaluator(p.coords, order, m.coord_names)
    n = m.dim
    data = np.zeros((n, n, evaluate.algebra.size))
    for i in range(n):
        for j in range(i + 1):
            coefficients = evaluate(m.components[i][j]).data
            data[i, j] = coefficients
            data[j, i] = coefficients
    jets = JetArray(data, evaluate.algebra)
    eps = degeneracy_epsilon
    if eps is None:
        eps = settings.degeneracy_epsilon
    determinant = float(np.linalg.det(jets.value))
    if abs(determinant) <= eps:
        raise DegenerateMetricError(determinant, p.coords)
    return jets


def inverse_metric_jets(gjets: JetArray) -> JetArray:
    """Jets of the inverse metric.

    Uses ``(G0 + D)^-1 = sum_k (-G0^-1 D)^k G0^-1``, which terminates at the
    jet order because ``D`` has no constant term.

    Raises:
        DegenerateMetricError: If the order-0 matrix is singular
    """
    g0 = gjets.value
    try:
        inv0 = np.linalg.inv(g0)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetricError(0.0, ()) from exc
    step = jet_einsum("ik,kj->ij", -inv0, gjets.without_constant())
    term = JetArray.constant(inv0, gjets.algebra)
    total = term
    for _ in range(gjets.order):
        term = jet_einsum("ik,kj->ij", step, term)
        total = total + term
    return JetArray(0.5 * (total.data + np.swapaxes(total.data, 0, 1)), total.algebra)


def metric_value(m: MetricField, p: Point) -> np.ndarray:
    """Metric components at a point."""
    return metric_jets(m, p, 0).value


def signature_of(g: np.ndarray) -> tuple[int, int]:
    """(negative, positive) eigenvalue counts of a symmetric matrix."""
    eigenvalues = np.linalg.eigvalsh(g)
    return int(np.sum(eigenvalues < 0)), int(np.sum(eigenvalues > 0))
