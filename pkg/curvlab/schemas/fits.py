"""Fitted decompositions returned by the classifier and contact services."""

from enum import Enum

from pydantic import BaseModel, Field


class QuasiEinsteinBranch(str, Enum):
    """How a quasi-Einstein fit was resolved."""

    EINSTEIN = "einstein"
    NON_NULL = "non_null"
    NULL = "null"
    NONE = "none"


class QuasiEinsteinFit(BaseModel):
    """``Ric = a g + b u (x) u`` at one point.

    ``epsilon_u`` is ``g(U, U)`` after normalization: +1 or -1 for a unit
    generator, 0 for a null one (then ``b`` is +-1 and carries no scale).
    """

    verdict: bool
    branch: QuasiEinsteinBranch
    a: float | None = None
    b: float | None = None
    u: list[float] | None = None
    u_vector: list[float] | None = None
    epsilon_u: int | None = None
    residual: float = Field(ge=0)
    second_singular_value: float = Field(ge=0)


class KernelVectorKind(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"


class KernelVector(BaseModel):
    components: list[float]
    norm_squared: float
    kind: KernelVectorKind


class WeylKernel(BaseModel):
    """Basis of ``{V : W(X, Y)V = 0 for all X, Y}`` at one point."""

    point: list[float]
    dimension: int
    basis: list[KernelVector]
    singular_values: list[float]
    restricted_metric_norm: float
    contains_non_null: bool


class EardleyPoint(BaseModel):
    point: list[float]
    kernel_dimension: int
    contains_non_null: bool
    weyl_norm: float
    violation: bool


class EardleyReport(BaseModel):
    """Rigidity statement checked point by point in dimension four."""

    metric_label: str
    points: list[EardleyPoint]
    violations: int
    null_kernel_points: int
    threshold: float

    @property
    def consistent(self) -> bool:
        return self.violations == 0


class ConstantCurvatureFit(BaseModel):
    verdict: bool
    c: float
    c_spread: float
    max_residual: float
    witness_point: list[float] | None = None


class KMuFit(BaseModel):
    """Least-squares nullity constants; ``mu`` is ``None`` when h vanishes."""

    verdict: bool
    k: float
    mu: float | None
    mu_determined: bool
    residual: float
    h_norm_max: float
    ricci_formula_residual: float | None = None
    scalar_bare_residual: float | None = None
    scalar_scaled_residual: float | None = None


class EtaEinsteinFit(BaseModel):
    """``Ric = a g + b eta (x) eta`` with per-point coefficients."""

    verdict: bool
    a: list[float]
    b: list[float]
    residual: float
    a_spread: float
    b_spread: float
    scalar_identity_residual: float | None = None
    sum_identity_residual: float | None = None
