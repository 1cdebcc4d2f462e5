"""Contact Riemannian structures ``(phi, xi, eta, g)`` given by expressions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from curvlab.core import expression as ex
from curvlab.core.expression import ScalarExpr
from curvlab.core.metric import MetricField
from curvlab.exceptions import StructuralValidationError


@dataclass(frozen=True)
class ContactStructure:
    """Metric, contact form, Reeb field and ``phi`` on a ``(2m+1)``-chart.

    ``phi[a][b]`` is the component ``phi^a_b``, so ``phi`` acts on column
    vectors. ``xi`` is stored rather than solved from ``eta``; the contact
    service checks the two agree.
    """

    label: str
    metric: MetricField
    eta: tuple[ScalarExpr, ...]
    xi: tuple[ScalarExpr, ...]
    phi: tuple[tuple[ScalarExpr, ...], ...]

    def __post_init__(self) -> None:
        n = self.metric.dim
        if n < 3 or n % 2 == 0:
            raise StructuralValidationError(
                f"contact structure '{self.label}' needs odd dimension >= 3, got {n}"
            )
        if not self.metric.is_riemannian:
            raise StructuralValidationError(
                f"contact metric '{self.label}' must be Riemannian"
            )
        if len(self.eta) != n or len(self.xi) != n:
            raise StructuralValidationError(
                f"contact structure '{self.label}': eta and xi need {n} components"
            )
        if len(self.phi) != n or any(len(row) != n for row in self.phi):
            raise StructuralValidationError(
                f"contact structure '{self.label}': phi must be {n}x{n}"
            )
        for expr in (*self.eta, *self.xi, *(e for row in self.phi for e in row)):
            ex.validate_chart(expr, n)

    @classmethod
    def build(
        cls,
        label: str,
        metric: MetricField,
        eta: Sequence[ScalarExpr | float],
        xi: Sequence[ScalarExpr | float],
        phi: dict[tuple[int, int], ScalarExpr | float],
    ) -> ContactStructure:
        """Assemble a structure from sparse ``phi`` entries ``(a, b) -> phi^a_b``."""
        n = metric.dim
        rows: list[list[ScalarExpr]] = [[ex.const(0.0)] * n for _ in range(n)]
        for (a, b), value in phi.items():
            if not (0 <= a < n and 0 <= b < n):
                raise StructuralValidationError(f"phi^{a}_{b} outside a {n}-chart")
            rows[a][b] = _expr(value)
        return cls(
            label=label,
            metric=metric,
            eta=tuple(_expr(v) for v in eta),
            xi=tuple(_expr(v) for v in xi),
            phi=tuple(tuple(row) for row in rows),
        )

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def m(self) -> int:
        return (self.metric.dim - 1) // 2

    def with_eta(self, eta: Sequence[ScalarExpr], label: str) -> ContactStructure:
        """Copy with a replaced contact form (used for negative controls).

        Raises:
            StructuralValidationError: If ``label`` is the label of this structure
        """
        if label == self.label:
            raise StructuralValidationError(
                f"a modified copy of '{self.label}' needs its own label"
            )
        return ContactStructure(label, self.metric, tuple(eta), self.xi, self.phi)


def _expr(value: ScalarExpr | float) -> ScalarExpr:
    if isinstance(value, (int, float)):
        return ex.const(float(value))
    return value
