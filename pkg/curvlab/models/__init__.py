"""Definition types: warped products, contact structures and catalog entries."""

from curvlab.models.catalog import (
    CatalogEntry,
    EntryKind,
    Expectation,
    Procedure,
    Provenance,
)
from curvlab.models.contact import ContactStructure
from curvlab.models.warped import WarpedProductSpec, assemble_metric

__all__ = [
    "CatalogEntry",
    "EntryKind",
    "Expectation",
    "Procedure",
    "Provenance",
    "ContactStructure",
    "WarpedProductSpec",
    "assemble_metric",
]
