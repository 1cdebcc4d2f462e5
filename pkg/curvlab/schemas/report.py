"""Report schemas shared by the services and the CLI."""

from __future__ import annotations

from typing import Any, Sequence

from pydantic import BaseModel, ConfigDict, Field

from curvlab.config import Settings, settings


class ToleranceLadder(BaseModel):
    """Verdict thresholds, applied to residuals scaled by (1 + norm)."""

    model_config = ConfigDict(frozen=True)

    structural: float = Field(default=1e-9, gt=0)
    derived: float = Field(default=1e-8, gt=0)
    theorem: float = Field(default=1e-6, gt=0)

    @classmethod
    def from_settings(
        cls, source: Settings | None = None, **overrides: float | None
    ) -> ToleranceLadder:
        """Ladder from configuration with optional per-rung overrides."""
        source = source or settings
        values = {
            "structural": source.tol_structural,
            "derived": source.tol_derived,
            "theorem": source.tol_theorem,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class PredicateResult(BaseModel):
    """Aggregated verdict of one predicate over a point set."""

    name: str
    verdict: bool
    max_residual: float = Field(ge=0)
    threshold: float = Field(gt=0)
    points: int = Field(ge=0)
    witness_point: list[float] | None = None
    detail: str | None = None

    @classmethod
    def aggregate(
        cls,
        name: str,
        residuals: Sequence[float],
        points: Sequence[Sequence[float]],
        threshold: float,
        detail: str | None = None,
    ) -> PredicateResult:
        """Max-residual / and-verdict merge in point order.

        The witness is the first failing point, or the point of largest
        residual when every point passes.
        """
        if not residuals:
            return cls(
                name=name,
                verdict=True,
                max_residual=0.0,
                threshold=threshold,
                points=0,
                detail=detail,
            )
        worst = max(range(len(residuals)), key=lambda k: (residuals[k], -k))
        failing = [k for k, r in enumerate(residuals) if not r < threshold]
        witness = failing[0] if failing else worst
        return cls(
            name=name,
            verdict=not failing,
            max_residual=float(residuals[worst]),
            threshold=threshold,
            points=len(residuals),
            witness_point=[float(x) for x in points[witness]],
            detail=detail,
        )


class ClassificationReport(BaseModel):
    """Per-predicate verdicts and derived constants for one metric."""

    metric_label: str
    points_used: int
    predicates: list[PredicateResult] = Field(default_factory=list)
    constants: dict[str, float | None] = Field(default_factory=dict)

    def predicate(self, name: str) -> PredicateResult:
        for result in self.predicates:
            if result.name == name:
                return result
        raise KeyError(name)

    def verdicts(self) -> dict[str, bool]:
        return {p.name: p.verdict for p in self.predicates}


class PointResult(BaseModel):
    """Scalar summaries at one sample point."""

    point: list[float]
    values: dict[str, float | None]


class AssertionResult(BaseModel):
    """Outcome of one verification assertion."""

    name: str
    passed: bool
    entry: str | None = None
    residual: float | None = None
    detail: str | None = None


class Report(BaseModel):
    """Self-describing result document of a CLI run."""

    tool: str = "curvature-lab"
    tool_version: str
    command: str
    target: str
    input_digest: str
    seed: int
    points: int
    tolerances: ToleranceLadder
    tolerance_source: dict[str, str]
    point_results: list[PointResult] = Field(default_factory=list)
    classification: ClassificationReport | None = None
    assertions: list[AssertionResult] = Field(default_factory=list)
    sections: dict[str, Any] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def failed_assertions(self) -> list[AssertionResult]:
        return [a for a in self.assertions if not a.passed]
