"""Catalog entry types: a definition plus its documented ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from curvlab.core.metric import DomainBox, MetricField
from curvlab.models.contact import ContactStructure
from curvlab.models.warped import WarpedProductSpec, assemble_metric


class EntryKind(str, Enum):
    PLAIN = "plain"
    WARPED = "warped"
    CONTACT = "contact"


class Provenance(str, Enum):
    """Where an expected value comes from."""

    PAPER = "PAPER"  # stated in the source literature
    DERIVED = "DERIVED"  # computed by hand for the fixture
    TRIVIAL = "TRIVIAL"  # follows from a degenerate case


class Procedure(str, Enum):
    """Decision procedure that produces a predicate."""

    CLASSIFY = "classify"
    WARPED = "warped"
    CONTACT = "contact"


@dataclass(frozen=True)
class Expectation:
    """One documented verdict, optionally with constants, for a catalog entry."""

    procedure: Procedure
    predicate: str
    verdict: bool
    provenance: Provenance
    constants: dict[str, float] = field(default_factory=dict)
    note: str = ""

    def describe(self) -> str:
        text = f"{self.procedure.value}.{self.predicate} = {str(self.verdict).lower()}"
        if self.constants:
            pairs = ", ".join(f"{k}={v:g}" for k, v in self.constants.items())
            text += f" ({pairs})"
        text += f"  [{self.provenance.value}]"
        return f"{text} {self.note}" if self.note else text


Definition = MetricField | WarpedProductSpec | ContactStructure


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: EntryKind
    definition: Definition
    expected: tuple[Expectation, ...]
    notes: str = ""

    @cached_property
    def metric(self) -> MetricField:
        """The metric field analyzed for this entry."""
        if isinstance(self.definition, WarpedProductSpec):
            return assemble_metric(self.definition)
        if isinstance(self.definition, ContactStructure):
            return self.definition.metric
        return self.definition

    @property
    def domain(self) -> DomainBox:
        return self.metric.domain

    @property
    def dim(self) -> int:
        return self.metric.dim

    def expectations(self, procedure: Procedure) -> list[Expectation]:
        return [e for e in self.expected if e.procedure is procedure]
