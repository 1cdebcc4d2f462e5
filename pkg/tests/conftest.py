"""Pytest configuration and fixtures."""

from typing import Callable

import pytest

from curvlab.core.metric import Point
from curvlab.models.catalog import CatalogEntry
from curvlab.schemas.report import ToleranceLadder
from curvlab.services.analysis_service import AnalysisService
from curvlab.services.catalog import entry_points, get_entry
from curvlab.services.classifier import ClassifierService
from curvlab.services.contact_geometry import ContactGeometryService
from curvlab.services.curvature_engine import CurvatureEngine
from curvlab.services.warped_product import WarpedProductService

# small point sets keep the suites fast; acceptance tests ask for more explicitly
FEW_POINTS = 5


@pytest.fixture(scope="session")
def ladder() -> ToleranceLadder:
    """Default tolerance ladder (1e-9 / 1e-8 / 1e-6)."""
    return ToleranceLadder()


@pytest.fixture(scope="session")
def engine() -> CurvatureEngine:
    """Curvature engine with the standard Bach normalization."""
    return CurvatureEngine()


@pytest.fixture(scope="session")
def classifier(engine: CurvatureEngine, ladder: ToleranceLadder) -> ClassifierService:
    return ClassifierService(engine, ladder)


@pytest.fixture(scope="session")
def warped_service(
    engine: CurvatureEngine, ladder: ToleranceLadder
) -> WarpedProductService:
    return WarpedProductService(engine, ladder)


@pytest.fixture(scope="session")
def contact_service(
    engine: CurvatureEngine, ladder: ToleranceLadder
) -> ContactGeometryService:
    return ContactGeometryService(engine, ladder)


@pytest.fixture(scope="session")
def analysis(engine: CurvatureEngine, ladder: ToleranceLadder) -> AnalysisService:
    return AnalysisService(ladder, engine)


@pytest.fixture
def entry() -> Callable[[str], CatalogEntry]:
    """Catalog lookup by name."""
    return get_entry


@pytest.fixture
def points() -> Callable[..., list[Point]]:
    """Seeded sample points of a catalog entry: ``points(name, count=5, seed=0)``."""

    def sample(name: str, count: int = FEW_POINTS, seed: int = 0) -> list[Point]:
        return entry_points(get_entry(name), seed, count)

    return sample
