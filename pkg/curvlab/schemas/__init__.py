"""Pydantic schemas for fits, verification results and reports."""

from curvlab.schemas.fits import (
    ConstantCurvatureFit,
    EardleyReport,
    EtaEinsteinFit,
    KMuFit,
    QuasiEinsteinFit,
    WeylKernel,
)
from curvlab.schemas.report import (
    AssertionResult,
    ClassificationReport,
    PointResult,
    PredicateResult,
    Report,
    ToleranceLadder,
)

__all__ = [
    "ConstantCurvatureFit",
    "EardleyReport",
    "EtaEinsteinFit",
    "KMuFit",
    "QuasiEinsteinFit",
    "WeylKernel",
    "AssertionResult",
    "ClassificationReport",
    "PointResult",
    "PredicateResult",
    "Report",
    "ToleranceLadder",
]
