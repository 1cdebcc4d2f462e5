"""Warped products ``I x_f F`` with metric ``eps dt^2 + f(t)^2 g_F``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from curvlab.core import expression as ex
from curvlab.core.expression import ScalarExpr
from curvlab.core.jets import eval_jet
from curvlab.core.metric import DomainBox, Interval, MetricField
from curvlab.exceptions import StructuralValidationError

WARPING_SAMPLES = 64


@dataclass(frozen=True)
class WarpedProductSpec:
    """Base interval, warping function and Riemannian fiber.

    ``f`` is an expression in the single base coordinate (variable 0).
    The total chart is ``(t, fiber coordinates)`` so that ``U = d_0``.
    """

    label: str
    epsilon: int
    f: ScalarExpr
    t_domain: Interval
    fiber: MetricField
    t_name: str = "t"

    def __post_init__(self) -> None:
        if self.epsilon not in (1, -1):
            raise StructuralValidationError(
                f"epsilon must be +1 or -1, got {self.epsilon}"
            )
        if not self.fiber.is_riemannian:
            raise StructuralValidationError(
                f"fiber '{self.fiber.label}' of '{self.label}' must be Riemannian"
            )
        if ex.max_variable_index(self.f) > 0:
            raise StructuralValidationError("the warping function may depend on t only")
        if self.t_name in self.fiber.coord_names:
            raise StructuralValidationError(
                f"base coordinate '{self.t_name}' clashes with a fiber coordinate"
            )

    @property
    def dim(self) -> int:
        return 1 + self.fiber.dim

    @property
    def fiber_dim(self) -> int:
        return self.fiber.dim

    def warping_derivatives(self, t: float) -> tuple[float, float, float]:
        """(f, f', f'') at t."""
        jet = eval_jet(self.f, (t,), 2, (self.t_name,))
        partials = jet.partials()
        return float(partials[0]), float(partials[1]), float(partials[2])

    def check_warping(self, samples: int = WARPING_SAMPLES) -> None:
        """Require ``f > 0`` at evenly spaced interior samples of the base interval.

        Raises:
            StructuralValidationError: If f <= 0 somewhere on the grid
        """
        lo, hi = self.t_domain.lower, self.t_domain.upper
        for t in np.linspace(lo, hi, samples + 2)[1:-1]:
            value = float(eval_jet(self.f, (float(t),), 0, (self.t_name,)).value)
            if not value > 0:
                raise StructuralValidationError(
                    f"warping function of '{self.label}' is not positive "
                    f"at t = {t:.6g} (f = {value:.6g})"
                )


def assemble_metric(spec: WarpedProductSpec) -> MetricField:
    """Block metric ``g_tt = eps``, ``g_ti = 0``, ``g_ij = f(t)^2 (g_F)_ij``.

    Raises:
        StructuralValidationError: If f <= 0 at a sampled t
    """
    spec.check_warping()
    f_squared = ex.power(spec.f, 2)
    entries: dict[tuple[int, int], ScalarExpr] = {(0, 0): ex.const(spec.epsilon)}
    for i, j, expr in spec.fiber.lower_triangle():
        entries[(i + 1, j + 1)] = ex.mul(f_squared, ex.shift_variables(expr, 1))
    return MetricField.from_lower_triangle(
        label=spec.label,
        coord_names=(spec.t_name, *spec.fiber.coord_names),
        entries=entries,
        signature=(spec.epsilon, *spec.fiber.signature),
        domain=DomainBox((spec.t_domain, *spec.fiber.domain.intervals)),
    )
