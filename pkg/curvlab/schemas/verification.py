"""Reports of the warped-product and contact verification procedures."""

from pydantic import BaseModel, Field

from curvlab.schemas.fits import EtaEinsteinFit, KMuFit, QuasiEinsteinFit
from curvlab.schemas.report import PredicateResult


class BlockComparison(BaseModel):
    """Relative mismatch between closed-form and engine blocks."""

    point: list[float]
    residuals: dict[str, float]

    @property
    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)


class WarpedPointResult(BaseModel):
    point: list[float]
    fiber_einstein_residual: float
    electric_weyl_norm: float
    electric_closed_form_mismatch: float
    div_weyl_norm: float
    mixed_weyl_residual: float
    fiber_weyl_relation_residual: float
    weyl_norm: float
    weakly_cf_along_u: float
    quasi_einstein: QuasiEinsteinFit
    u_alignment_residual: float
    bach_norm: float
    conditions: list[bool]
    conditions_agree: bool


class WarpedProductVerification(BaseModel):
    """Conditions and conclusions of the Einstein-fiber theorem on one spec."""

    label: str
    epsilon: int
    dimension: int
    points: list[WarpedPointResult]
    predicates: list[PredicateResult]
    conditions_agree: bool
    all_conditions: bool
    conclusions_hold: bool

    def predicate(self, name: str) -> PredicateResult:
        for result in self.predicates:
            if result.name == name:
                return result
        raise KeyError(name)


class ContactStructureReport(BaseModel):
    """Maximum residual of each structural identity over the sample points."""

    label: str
    residuals: dict[str, float]
    min_contact_volume: float
    passed: bool
    failed_identity: str | None = None
    witness_point: list[float] | None = None


class WeylReebPoint(BaseModel):
    point: list[float]
    engine_vs_formula: float
    weyl_reeb_norm: float
    ricci_operator_residual: float | None = None


class PropositionPoint(BaseModel):
    point: list[float]
    weyl_reeb_vanishes: bool
    eta_einstein: bool
    agree: bool


class ReebWeylEquivalence(BaseModel):
    """Pointwise comparison of ``W(X, xi)xi = 0`` with the eta-Einstein condition."""

    label: str
    points: list[PropositionPoint]
    weyl_reeb: list[WeylReebPoint]
    eta_einstein: EtaEinsteinFit
    weyl_reeb_vanishes: bool
    is_eta_einstein: bool
    verdict: str = Field(description="'both true', 'both false' or 'mixed'")


class ReductionReport(BaseModel):
    """Steps of the eta-Einstein, Reeb-flat-Weyl reduction."""

    label: str
    dimension: int
    hypotheses_hold: bool
    hypothesis_detail: str
    nullity_residual: float
    k_values: list[float]
    k_mean: float
    k_variance: float
    branch: str
    sasakian_residual: float | None = None
    forced_a_residual: float | None = None
    h_norm_max: float
    ricci_rank: int
    model_space: str | None = None


class NormalizationCase(BaseModel):
    label: str
    k: float
    mu: float | None
    engine_scalar: float
    ricci_trace: float
    bare_formula: float
    scaled_formula: float
    bare_matches: bool
    scaled_matches: bool
    discriminating: bool


class NormalizationReport(BaseModel):
    """Which normalization of the (k, mu) scalar curvature the fixtures satisfy."""

    cases: list[NormalizationCase]
    conclusion: str


class HOperatorCheck(BaseModel):
    """``h = 1/2 Lie_xi phi`` at one point with its algebraic residuals."""

    point: list[float]
    h: list[list[float]]
    norm_squared: float
    self_adjoint: float
    trace: float
    anticommutes_with_phi: float


class NablaXiCheck(BaseModel):
    point: list[float]
    nabla_residual: float
    reeb_ricci: float
    reeb_ricci_residual: float


class ContactInvariants(BaseModel):
    """Invariants of one contact structure, as reported by the CLI."""

    structure: ContactStructureReport
    h: list[list[float]]
    h_norm_max: float
    h_identity_residuals: dict[str, float]
    nabla_xi_residual: float
    reeb_ricci_residual: float
    k_contact: PredicateResult
    sasakian: PredicateResult
    k_mu: KMuFit
    eta_einstein: EtaEinsteinFit
