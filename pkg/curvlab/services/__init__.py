"""Services package."""

from curvlab.services.analysis_service import AnalysisService
from curvlab.services.classifier import ClassifierService
from curvlab.services.contact_geometry import ContactGeometryService
from curvlab.services.curvature_engine import (
    BachNormalization,
    CurvatureEngine,
    PacketDepth,
)
from curvlab.services.warped_product import WarpedProductService

__all__ = [
    "AnalysisService",
    "ClassifierService",
    "ContactGeometryService",
    "CurvatureEngine",
    "BachNormalization",
    "PacketDepth",
    "WarpedProductService",
]
