"""Analysis runs and verification suites over catalog entries and user definitions."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence, TypeVar

import numpy as np

from curvlab.config import settings
from curvlab.core.metric import MetricField, Point
from curvlab.exceptions import HypothesisError, InvalidArgumentError
from curvlab.models.catalog import CatalogEntry, Definition, Expectation, Procedure
from curvlab.models.contact import ContactStructure
from curvlab.models.warped import WarpedProductSpec, assemble_metric
from curvlab.schemas.report import (
    AssertionResult,
    ClassificationReport,
    PointResult,
    ToleranceLadder,
)
from curvlab.services.catalog import (
    catalog_entries,
    entry_points,
    get_entry,
    sample_points,
)
from curvlab.services.classifier import (
    ClassifierService,
    classify_packets,
    eardley_of_packets,
)
from curvlab.services.contact_geometry import ContactGeometryService
from curvlab.services.curvature_engine import (
    CurvatureEngine,
    CurvaturePacket,
    PacketDepth,
)
from curvlab.services.warped_product import WarpedProductService
from curvlab.telemetry.tracing import get_tracer

logger = logging.getLogger(__name__)
tracer = get_tracer(__name__)

T = TypeVar("T")
R = TypeVar("R")

# predicate name -> (verdict, constants)
Found = dict[str, tuple[bool, dict[str, float | None]]]

VERIFY_TARGETS = (
    "thm1.1",
    "prop1.1",
    "thm1.2",
    "eardley",
    "gebarowski",
    "normalization",
)

WARPED_SUITE = ("warped_s2xs2", "warped_s2xr", "frw_s3", "frw_flat", "hyperbolic_4")
BLOCK_SUITE = ("frw_s3", "frw_flat", "warped_s2xs2", "warped_s2xr")
REEB_WEYL_SUITE = ("sasakian_r5", "sasakian_r2xs2")
REDUCTION_SUITE = (
    "sasakian_r3",
    "nil3",
    "sasakian_r5",
    "sasakian_s3",
    "flat_contact_r3",
    "contact_e2_group",
)
NORMALIZATION_SUITE = ("flat_contact_r3", "contact_e2_group", "sasakian_r3", "nil3")

# thresholds quoted by the verification suites
WEYL_PRESENT = 1e-3
CONDITION_FAILURE = 1e-4
CONSTANT_RELATIVE = 1e-6
K_VARIANCE = 1e-10


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(a)))


def metric_of(definition: Definition) -> MetricField:
    """The metric field analyzed for a definition of any kind."""
    if isinstance(definition, WarpedProductSpec):
        return assemble_metric(definition)
    if isinstance(definition, ContactStructure):
        return definition.metric
    return definition


def point_values(
    packet: CurvaturePacket, structural: dict[str, float] | None = None
) -> dict[str, float | None]:
    """Scalar summaries of one packet, optionally with structural residuals."""
    g_inv = packet.g_inv
    riem = packet.riem04.components
    riem_up = np.einsum("ae,bf,cg,dh,efgh->abcd", g_inv, g_inv, g_inv, g_inv, riem)
    ric = packet.ric.components
    values: dict[str, float | None] = {
        "det_g": float(np.linalg.det(packet.g)),
        "scalar_curvature": packet.r,
        "ricci_norm": _norm(ric),
        "ricci_squared": float(np.einsum("ab,ac,bd,cd->", ric, g_inv, g_inv, ric)),
        "riemann_norm": packet.riem04.norm(),
        "kretschmann": float(np.einsum("abcd,abcd->", riem, riem_up)),
        "weyl_norm": packet.weyl04.norm() if packet.weyl04 is not None else None,
        "div_weyl_norm": (
            packet.div_weyl.norm() if packet.div_weyl is not None else None
        ),
        "bach_norm": packet.bach.norm() if packet.bach is not None else None,
    }
    for name, residual in (structural or {}).items():
        values[f"structural.{name}"] = residual
    return values


@dataclass
class AnalysisOutcome:
    """Everything an analysis run produced, ready for report assembly."""

    label: str
    kind: str
    points: list[Point]
    classification: ClassificationReport
    point_results: list[PointResult]
    sections: dict[str, Any] = field(default_factory=dict)
    assertions: list[AssertionResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


@dataclass
class SuiteOutcome:
    """Assertions and supporting sections of a verification suite."""

    target: str
    entries: list[str]
    assertions: list[AssertionResult] = field(default_factory=list)
    sections: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)


class AnalysisService:
    """Service running analyses and verification suites with a shared engine."""

    def __init__(
        self,
        ladder: ToleranceLadder | None = None,
        engine: CurvatureEngine | None = None,
        workers: int | None = None,
    ):
        """Initialize the service.

        Args:
            ladder: Tolerance ladder used by every predicate
            engine: Curvature engine shared by the sub-services
            workers: Threads for point evaluation; results keep point order
        """
        self.ladder = ladder or ToleranceLadder.from_settings()
        self.engine = engine or CurvatureEngine()
        self.workers = settings.workers if workers is None else workers
        if self.workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {self.workers}")
        self.classifier = ClassifierService(self.engine, self.ladder)
        self.warped = WarpedProductService(self.engine, self.ladder)
        self.contact = ContactGeometryService(self.engine, self.ladder)

    def _map(self, fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
        if self.workers == 1 or len(items) < 2:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    def packets(
        self, m: MetricField, points: Sequence[Point], depth: PacketDepth
    ) -> list[CurvaturePacket]:
        return self._map(lambda p: self.engine.packet(m, p, depth), points)

    def classify(
        self, m: MetricField, points: Sequence[Point]
    ) -> tuple[ClassificationReport, list[CurvaturePacket]]:
        depth = PacketDepth.BACH if m.dim >= 4 else PacketDepth.RIEMANN
        packets = self.packets(m, points, depth)
        return classify_packets(m, packets, self.ladder), packets

    def analyze(
        self,
        definition: Definition,
        seed: int | None = None,
        count: int | None = None,
        points: Sequence[Point] | None = None,
    ) -> AnalysisOutcome:
        """Curvature packets, every applicable predicate and the kind's procedures.

        Args:
            definition: Plain metric, warped product or contact structure
            seed: Sampler seed
            count: Number of sample points
            points: Explicit points, overriding seed and count

        Returns:
            AnalysisOutcome: Classification, per-point values and sections
        """
        m = metric_of(definition)
        if points is not None:
            pts = list(points)
        else:
            pts = sample_points(m.domain, seed, count)
        with tracer.start_as_current_span("analysis.analyze") as span:
            span.set_attribute("curvlab.metric", m.label)
            span.set_attribute("curvlab.points", len(pts))
            logger.info(
                "analyzing %s (dimension %d) at %d points", m.label, m.dim, len(pts)
            )
            report, packets = self.classify(m, pts)
            structural = self._map(
                lambda p: self.engine.structural_residuals(m, p), pts
            )
            rows = [
                PointResult(point=list(pk.point.coords), values=point_values(pk, s))
                for pk, s in zip(packets, structural)
            ]
            outcome = AnalysisOutcome(
                label=m.label,
                kind=_kind(definition),
                points=pts,
                classification=report,
                point_results=rows,
            )
            outcome.sections["structural"] = {
                name: max(s[name] for s in structural) for name in structural[0]
            }
            if isinstance(definition, WarpedProductSpec):
                self._analyze_warped(definition, pts, outcome)
            elif isinstance(definition, ContactStructure):
                self._analyze_contact(definition, pts, outcome)
        return outcome

    def _analyze_warped(
        self, spec: WarpedProductSpec, points: Sequence[Point], outcome: AnalysisOutcome
    ) -> None:
        blocks = self._map(lambda p: self.warped.compare_blocks(spec, p), points)
        outcome.sections["warped_blocks"] = {
            key: max(b.residuals[key] for b in blocks) for key in blocks[0].residuals
        }
        if spec.dim >= 4:
            verification = self.warped.theorem_1_1_verify(spec, points)
            outcome.sections["warped"] = {
                "conditions_agree": verification.conditions_agree,
                "all_conditions": verification.all_conditions,
                "conclusions_hold": verification.conclusions_hold,
            }
            outcome.sections["warped_predicates"] = [
                p.model_dump() for p in verification.predicates
            ]
        else:
            outcome.notes.append("Weyl statements skipped: total dimension below 4")

    def _analyze_contact(
        self, cs: ContactStructure, points: Sequence[Point], outcome: AnalysisOutcome
    ) -> None:
        invariants = self.contact.invariants(cs, points)
        outcome.sections["contact"] = invariants.model_dump()
        if cs.dim >= 5 and invariants.k_contact.verdict:
            equivalence = self.contact.proposition_1_1_verify(cs, points)
            outcome.sections["reeb_weyl"] = {
                "weyl_reeb_vanishes": equivalence.weyl_reeb_vanishes,
                "is_eta_einstein": equivalence.is_eta_einstein,
                "verdict": equivalence.verdict,
                "engine_vs_formula": max(
                    w.engine_vs_formula for w in equivalence.weyl_reeb
                ),
            }
        reduction = self.contact.theorem_1_2_reduction(cs, points)
        outcome.sections["reduction"] = reduction.model_dump(exclude={"k_values"})

    def contact_predicates(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> Found:
        """Verdict and constants of each contact procedure."""
        structure = self.contact.verify_structure(cs, points)
        results: Found = {"structure": (structure.passed, {})}
        if not structure.passed:
            return results
        results["k_contact"] = (self.contact.is_k_contact(cs, points).verdict, {})
        results["sasakian"] = (self.contact.is_sasakian(cs, points).verdict, {})
        eta = self.contact.eta_einstein_fit(cs, points)
        results["eta_einstein"] = (
            eta.verdict,
            {
                "eta_einstein_a": float(np.mean(eta.a)),
                "eta_einstein_b": float(np.mean(eta.b)),
            },
        )
        k_mu = self.contact.fit_k_mu(cs, points)
        results["k_mu"] = (k_mu.verdict, {"k": k_mu.k, "mu": k_mu.mu})
        return results

    def check_entry(
        self, entry: CatalogEntry, points: Sequence[Point] | None = None
    ) -> list[AssertionResult]:
        """Reproduce every documented expectation of a catalog entry."""
        pts = list(points) if points is not None else entry_points(entry)
        found: dict[Procedure, Found] = {}
        with tracer.start_as_current_span("analysis.check_entry") as span:
            span.set_attribute("curvlab.entry", entry.name)
            if entry.expectations(Procedure.CLASSIFY):
                report, _ = self.classify(entry.metric, pts)
                found[Procedure.CLASSIFY] = {
                    p.name: (p.verdict, report.constants) for p in report.predicates
                }
            if entry.expectations(Procedure.WARPED):
                assert isinstance(entry.definition, WarpedProductSpec)
                verification = self.warped.theorem_1_1_verify(entry.definition, pts)
                found[Procedure.WARPED] = {
                    p.name: (p.verdict, {}) for p in verification.predicates
                }
            if entry.expectations(Procedure.CONTACT):
                assert isinstance(entry.definition, ContactStructure)
                found[Procedure.CONTACT] = self.contact_predicates(
                    entry.definition, pts
                )
        results = [
            _compare(entry.name, e, found.get(e.procedure, {})) for e in entry.expected
        ]
        failed = sum(not r.passed for r in results)
        logger.info(
            "catalog entry %s: %d expectations, %d failed",
            entry.name,
            len(results),
            failed,
        )
        return results

    def verify(
        self, target: str, seed: int | None = None, count: int | None = None
    ) -> SuiteOutcome:
        """Run one verification suite over its catalog entries.

        Raises:
            InvalidArgumentError: For an unknown target
        """
        suites: dict[str, Callable[[int | None, int | None], SuiteOutcome]] = {
            "thm1.1": self.verify_warped_theorem,
            "prop1.1": self.verify_reeb_weyl,
            "thm1.2": self.verify_reduction,
            "eardley": self.verify_eardley,
            "gebarowski": self.verify_harmonic_weyl,
            "normalization": self.verify_normalization,
        }
        suite = suites.get(target)
        if suite is None:
            raise InvalidArgumentError(
                f"unknown verification target '{target}'; "
                f"expected one of {', '.join(VERIFY_TARGETS)}"
            )
        with tracer.start_as_current_span("analysis.verify") as span:
            span.set_attribute("curvlab.target", target)
            outcome = suite(seed, count)
        logger.info(
            "verification %s: %d assertions, %d failed",
            target,
            len(outcome.assertions),
            sum(not a.passed for a in outcome.assertions),
        )
        return outcome

    def verify_warped_theorem(
        self, seed: int | None = None, count: int | None = None
    ) -> SuiteOutcome:
        """Einstein-fiber conditions and their conclusions, plus closed-form blocks."""
        outcome = SuiteOutcome("thm1.1", list(WARPED_SUITE))
        for name in WARPED_SUITE:
            entry = get_entry(name)
            spec = entry.definition
            assert isinstance(spec, WarpedProductSpec)
            pts = entry_points(entry, seed, count)
            verification = self.warped.theorem_1_1_verify(spec, pts)
            add = _adder(outcome.assertions, name)
            add("conditions are equivalent", verification.conditions_agree)
            if verification.all_conditions:
                for predicate in (
                    "weakly_cf_along_u",
                    "quasi_einstein_along_u",
                    "bach_flat",
                ):
                    result = verification.predicate(predicate)
                    add(f"conclusion {predicate}", result.verdict, result.max_residual)
            closed = verification.predicate("electric_weyl_closed_form")
            add(
                "electric Weyl matches -(eps/(n-2)) FRic0",
                closed.verdict,
                closed.max_residual,
            )
            mixed = verification.predicate("mixed_weyl_zero")
            add("W(U, x, y, z) = 0", mixed.verdict, mixed.max_residual)
            relation = verification.predicate("fiber_weyl_relation")
            add("fiber Weyl relation", relation.verdict, relation.max_residual)
            weyl = max(r.weyl_norm for r in verification.points)
            if name == "warped_s2xs2":
                add("Weyl tensor does not vanish", weyl > WEYL_PRESENT, weyl)
            if name == "warped_s2xr":
                for predicate in (
                    "fiber_einstein",
                    "electric_weyl_zero",
                    "harmonic_weyl",
                ):
                    worst = verification.predicate(predicate).max_residual
                    add(f"{predicate} fails clearly", worst > CONDITION_FAILURE, worst)
            for e in entry.expectations(Procedure.WARPED):
                result = verification.predicate(e.predicate)
                add(e.describe(), result.verdict == e.verdict, result.max_residual)
            outcome.sections[name] = [p.model_dump() for p in verification.predicates]
        for name in BLOCK_SUITE:
            entry = get_entry(name)
            spec = entry.definition
            assert isinstance(spec, WarpedProductSpec)
            blocks = self._map(
                lambda p: self.warped.compare_blocks(spec, p),
                entry_points(entry, seed, count),
            )
            worst = max(b.worst for b in blocks)
            outcome.assertions.append(
                AssertionResult(
                    name="closed-form blocks match the engine",
                    passed=worst < self.ladder.derived,
                    entry=name,
                    residual=worst,
                )
            )
        frw = get_entry("frw_s3")
        report, _ = self.classify(frw.metric, entry_points(frw, seed, count))
        cf = report.predicate("conformally_flat")
        qe = report.predicate("quasi_einstein")
        add = _adder(outcome.assertions, "frw_s3")
        add("conformally flat", cf.verdict, cf.max_residual)
        timelike = report.constants.get("quasi_einstein_epsilon_u") == -1.0
        add(
            "quasi-Einstein with timelike generator",
            qe.verdict and timelike,
            qe.max_residual,
        )
        return outcome

    def verify_reeb_weyl(
        self, seed: int | None = None, count: int | None = None
    ) -> SuiteOutcome:
        """``W(X, xi)xi = 0`` against eta-Einstein on K-contact fixtures."""
        outcome = SuiteOutcome("prop1.1", list(REEB_WEYL_SUITE))
        expected = {"sasakian_r5": "both true", "sasakian_r2xs2": "both false"}
        for name in REEB_WEYL_SUITE:
            entry = get_entry(name)
            cs = entry.definition
            assert isinstance(cs, ContactStructure)
            pts = entry_points(entry, seed, count)
            add = _adder(outcome.assertions, name)
            structure = self.contact.verify_structure(cs, pts)
            add(
                "contact metric identities",
                structure.passed,
                max(structure.residuals.values()),
            )
            try:
                equivalence = self.contact.proposition_1_1_verify(cs, pts)
            except HypothesisError as exc:
                add("K-contact hypothesis", False, detail=str(exc))
                continue
            verdict = equivalence.verdict
            formula = max(w.engine_vs_formula for w in equivalence.weyl_reeb)
            add("W(X, xi)xi engine vs formula", formula < self.ladder.derived, formula)
            add("biconditional is never mixed", verdict != "mixed", detail=verdict)
            want = expected[name]
            add(f"verdict is {want}", verdict == want, detail=verdict)
            if equivalence.is_eta_einstein:
                fit = equivalence.eta_einstein
                sums = [a + b for a, b in zip(fit.a, fit.b)]
                worst = max(abs(s - 2 * cs.m) for s in sums)
                bound = self.ladder.structural * (1 + 2 * cs.m)
                add("a + b = 2m", worst < bound, worst)
                ricci = [
                    w.ricci_operator_residual
                    for w in equivalence.weyl_reeb
                    if w.ricci_operator_residual is not None
                ]
                if ricci:
                    add(
                        "Ricci operator formula",
                        max(ricci) < self.ladder.derived,
                        max(ricci),
                    )
            outcome.sections[name] = {
                "verdict": verdict,
                "weyl_reeb_vanishes": equivalence.weyl_reeb_vanishes,
                "is_eta_einstein": equivalence.is_eta_einstein,
            }
        return outcome

    def verify_reduction(
        self, seed: int | None = None, count: int | None = None
    ) -> SuiteOutcome:
        """Reduction of eta-Einstein contact metrics with ``W(X, Y)xi = 0``."""
        outcome = SuiteOutcome("thm1.2", list(REDUCTION_SUITE))
        for name in REDUCTION_SUITE:
            entry = get_entry(name)
            cs = entry.definition
            assert isinstance(cs, ContactStructure)
            pts = entry_points(entry, seed, count)
            report = self.contact.theorem_1_2_reduction(cs, pts)
            add = _adder(outcome.assertions, name)
            contact_expectations = entry.expectations(Procedure.CONTACT)
            eta_expected = next(
                (
                    e.verdict
                    for e in contact_expectations
                    if e.predicate == "eta_einstein"
                ),
                None,
            )
            if eta_expected is False:
                add(
                    "hypothesis failure is reported",
                    not report.hypotheses_hold,
                    detail=report.hypothesis_detail,
                )
                outcome.sections[name] = report.model_dump(exclude={"k_values"})
                continue
            add(
                "hypotheses hold",
                report.hypotheses_hold,
                detail=report.hypothesis_detail,
            )
            add(
                "nullity condition with k = (a + b)/2m",
                report.nullity_residual < self.ladder.theorem,
                report.nullity_residual,
            )
            add("k is constant", report.k_variance < K_VARIANCE, report.k_variance)
            k_expected = next(
                (e.constants["k"] for e in contact_expectations if "k" in e.constants),
                None,
            )
            if k_expected is not None:
                k_error = abs(report.k_mean - k_expected)
                add(f"k = {k_expected:g}", k_error < self.ladder.derived, k_error)
            if report.branch == "sasakian":
                add(
                    "Sasakian identity",
                    (report.sasakian_residual or 0.0) < self.ladder.derived,
                    report.sasakian_residual,
                )
            elif report.branch == "k_below_one":
                add(
                    "forced a = 2(m - 1)",
                    (report.forced_a_residual or 0.0) < self.ladder.theorem,
                    report.forced_a_residual,
                )
                add("Ricci rank <= 1", report.ricci_rank <= 1, float(report.ricci_rank))
                identity = self.contact.reduction_identity_residual(cs, pts)
                add("reduction identity", identity < self.ladder.theorem, identity)
            else:
                add("k <= 1", False, report.k_mean, detail=report.branch)
            outcome.sections[name] = report.model_dump(exclude={"k_values"})
        return outcome

    def verify_eardley(
        self, seed: int | None = None, count: int | None = None
    ) -> SuiteOutcome:
        """Non-null Weyl kernel vectors force ``W = 0`` on every 4-dimensional entry."""
        entries = [e for e in catalog_entries() if e.dim == 4]
        outcome = SuiteOutcome("eardley", [e.name for e in entries])
        for entry in entries:
            pts = entry_points(entry, seed, count)
            packets = self.packets(entry.metric, pts, PacketDepth.RIEMANN)
            report = eardley_of_packets(entry.metric.label, packets, self.ladder)
            add = _adder(outcome.assertions, entry.name)
            add("no rigidity violations", report.consistent, float(report.violations))
            if entry.name == "pp_wave_4":
                weyl = min(p.weyl_norm for p in report.points)
                add(
                    "null kernel vector at every point",
                    report.null_kernel_points == len(pts),
                    float(report.null_kernel_points),
                )
                add("Weyl tensor does not vanish", weyl > WEYL_PRESENT, weyl)
            outcome.sections[entry.name] = {
                "violations": report.violations,
                "null_kernel_points": report.null_kernel_points,
            }
        return outcome

    def verify_harmonic_weyl(
        self, seed: int | None = None, count: int | None = None
    ) -> SuiteOutcome:
        """Harmonic Weyl exactly when the fiber is Einstein, on every warped entry."""
        entries = [
            e
            for e in catalog_entries()
            if isinstance(e.definition, WarpedProductSpec) and e.dim >= 4
        ]
        outcome = SuiteOutcome("gebarowski", [e.name for e in entries])
        for entry in entries:
            spec = entry.definition
            assert isinstance(spec, WarpedProductSpec)
            pts = entry_points(entry, seed, count)
            fiber_points = [Point(p.coords[1:]) for p in pts]
            fiber = self.classifier.is_einstein(spec.fiber, fiber_points)
            harmonic = self.classifier.harmonic_weyl_check(entry.metric, pts)
            outcome.assertions.append(
                AssertionResult(
                    name="harmonic Weyl iff Einstein fiber",
                    passed=fiber.verdict == harmonic.verdict,
                    entry=entry.name,
                    residual=harmonic.max_residual,
                    detail=(
                        f"fiber Einstein {fiber.verdict}, "
                        f"harmonic Weyl {harmonic.verdict}"
                    ),
                )
            )
            outcome.sections[entry.name] = {
                "fiber_einstein": fiber.verdict,
                "harmonic_weyl": harmonic.verdict,
            }
        return outcome

    def verify_normalization(
        self, seed: int | None = None, count: int | None = None
    ) -> SuiteOutcome:
        """Which normalization of the (k, mu) scalar curvature the fixtures satisfy."""
        outcome = SuiteOutcome("normalization", list(NORMALIZATION_SUITE))
        cases = []
        for name in NORMALIZATION_SUITE:
            entry = get_entry(name)
            assert isinstance(entry.definition, ContactStructure)
            cases.append((entry.definition, entry_points(entry, seed, count)))
        report = self.contact.scalar_normalization_report(cases)
        outcome.assertions.append(
            AssertionResult(
                name="trace comparison completed", passed=True, detail=report.conclusion
            )
        )
        for case in report.cases:
            residual = abs(case.ricci_trace - case.engine_scalar)
            threshold = self.ladder.theorem * (1.0 + abs(case.engine_scalar))
            outcome.assertions.append(
                AssertionResult(
                    name="trace of the (k, mu) Ricci tensor equals r",
                    passed=residual < threshold,
                    entry=case.label,
                    residual=residual,
                )
            )
        outcome.sections["normalization"] = report.model_dump()
        outcome.notes.append(f"scalar curvature of (k, mu)-spaces: {report.conclusion}")
        return outcome


def _kind(definition: Definition) -> str:
    if isinstance(definition, WarpedProductSpec):
        return "warped"
    if isinstance(definition, ContactStructure):
        return "contact"
    return "plain"


def _adder(sink: list[AssertionResult], entry: str) -> Callable[..., None]:
    def add(
        name: str,
        passed: bool,
        residual: float | None = None,
        detail: str | None = None,
    ) -> None:
        sink.append(
            AssertionResult(
                name=name,
                passed=bool(passed),
                entry=entry,
                residual=None if residual is None else float(residual),
                detail=detail,
            )
        )

    return add


def _compare(entry: str, expectation: Expectation, found: Found) -> AssertionResult:
    name = expectation.describe()

    def failure(detail: str, residual: float | None = None) -> AssertionResult:
        return AssertionResult(
            name=name, passed=False, entry=entry, residual=residual, detail=detail
        )

    if expectation.predicate not in found:
        return failure("predicate not evaluated")
    verdict, constants = found[expectation.predicate]
    if verdict != expectation.verdict:
        return failure(f"verdict {verdict}")
    worst = 0.0
    for key, want in expectation.constants.items():
        got = constants.get(key)
        if got is None:
            return failure(f"{key} not determined")
        error = abs(got - want)
        worst = max(worst, error)
        if not error < CONSTANT_RELATIVE * (1.0 + abs(want)):
            return failure(f"{key} = {got:.12g}", error)
    return AssertionResult(name=name, passed=True, entry=entry, residual=worst)


def check_catalog(
    service: AnalysisService,
    names: Iterable[str] | None = None,
    seed: int | None = None,
    count: int | None = None,
) -> list[AssertionResult]:
    """Expectation checks for the named entries, or the whole catalog."""
    entries = [get_entry(n) for n in names] if names is not None else catalog_entries()
    results: list[AssertionResult] = []
    for entry in entries:
        results.extend(service.check_entry(entry, entry_points(entry, seed, count)))
    return results
