"""Decision procedures for Einstein-type and Weyl-type conditions."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
import scipy.linalg

from curvlab.config import settings
from curvlab.core.metric import MetricField, Point
from curvlab.core.tensors import TensorValue, kulkarni_nomizu
from curvlab.exceptions import DimensionError, InvalidArgumentError
from curvlab.schemas.fits import (
    ConstantCurvatureFit,
    EardleyPoint,
    EardleyReport,
    KernelVector,
    KernelVectorKind,
    QuasiEinsteinBranch,
    QuasiEinsteinFit,
    WeylKernel,
)
from curvlab.schemas.report import (
    ClassificationReport,
    PredicateResult,
    ToleranceLadder,
)
from curvlab.services.curvature_engine import (
    CurvatureEngine,
    CurvaturePacket,
    PacketDepth,
)

logger = logging.getLogger(__name__)


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(a)))


def cluster_eigenvalues(values: np.ndarray, gap: float) -> list[tuple[float, int]]:
    """Group sorted real eigenvalues whose neighbours lie within ``gap``.

    Returns:
        list: (cluster mean, multiplicity) pairs in ascending order
    """
    ordered = np.sort(np.real(values))
    clusters: list[list[float]] = []
    for value in ordered:
        if clusters and value - clusters[-1][-1] <= gap:
            clusters[-1].append(float(value))
        else:
            clusters.append([float(value)])
    return [(float(np.mean(c)), len(c)) for c in clusters]


def _normalize_sign(vector: np.ndarray) -> float:
    """Sign making the largest-magnitude component positive."""
    return 1.0 if vector[int(np.argmax(np.abs(vector)))] >= 0 else -1.0


def fit_quasi_einstein(
    g: np.ndarray,
    ric: np.ndarray,
    tol: float,
    cluster_gap: float | None = None,
) -> QuasiEinsteinFit:
    """Decompose ``Ric = a g + b u (x) u`` at a point.

    Candidates for ``a`` are eigenvalues of ``Q = g^-1 Ric`` of multiplicity
    at least n - 1, plus ``r / n``; the candidate leaving the smallest second
    singular value of ``T = Ric - a g`` wins. A rank-one ``T`` is split along
    its dominant eigenpair; a generator with ``g^-1(v, v) ~ 0`` takes the
    null branch.

    Args:
        g: Metric components
        ric: Ricci components
        tol: Relative threshold (scaled by 1 + |Ric|)
        cluster_gap: Relative eigenvalue clustering gap

    Returns:
        QuasiEinsteinFit: Fit with verdict and residual
    """
    n = g.shape[0]
    gap_rel = settings.eigen_cluster_gap if cluster_gap is None else cluster_gap
    g_inv = np.linalg.inv(g)
    q = g_inv @ ric
    eigenvalues = np.linalg.eigvals(q)
    scale = 1.0 + _norm(ric)
    gap = gap_rel * (1.0 + float(np.max(np.abs(eigenvalues))))
    candidates = [
        mean
        for mean, count in cluster_eigenvalues(eigenvalues, gap)
        if count >= n - 1
    ]
    candidates.append(float(np.trace(q)) / n)

    best_a, best_s = candidates[0], np.inf
    best_singular = np.zeros(n)
    for a in candidates:
        singular = np.sort(np.abs(np.linalg.eigvalsh(ric - a * g)))[::-1]
        if singular[1] < best_s:
            best_a, best_s, best_singular = a, float(singular[1]), singular
    if not best_s < tol * scale:
        return QuasiEinsteinFit(
            verdict=False,
            branch=QuasiEinsteinBranch.NONE,
            a=best_a,
            residual=best_s,
            second_singular_value=best_s,
        )

    t = ric - best_a * g
    if best_singular[0] < tol * scale:
        return QuasiEinsteinFit(
            verdict=True,
            branch=QuasiEinsteinBranch.EINSTEIN,
            a=best_a,
            b=0.0,
            residual=_norm(t),
            second_singular_value=best_s,
        )

    values, vectors = np.linalg.eigh(t)
    k = int(np.argmax(np.abs(values)))
    lam, v = float(values[k]), vectors[:, k]
    c = float(v @ g_inv @ v)
    null_scale = tol * (1.0 + _norm(g_inv))
    if abs(c) > null_scale:
        u = v / np.sqrt(abs(c))
        b = lam * abs(c)
        epsilon = 1 if c > 0 else -1
        branch = QuasiEinsteinBranch.NON_NULL
    else:
        u = np.sqrt(abs(lam)) * v
        b = 1.0 if lam > 0 else -1.0
        epsilon = 0
        branch = QuasiEinsteinBranch.NULL
    u_vector = g_inv @ u
    sign = _normalize_sign(u_vector)
    u, u_vector = sign * u, sign * u_vector
    residual = _norm(ric - best_a * g - b * np.outer(u, u))
    return QuasiEinsteinFit(
        verdict=residual < tol * scale,
        branch=branch,
        a=best_a,
        b=b,
        u=[float(x) for x in u],
        u_vector=[float(x) for x in u_vector],
        epsilon_u=epsilon,
        residual=residual,
        second_singular_value=best_s,
    )


def weyl_action(weyl13: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``W(d_c, d_d) V`` as the array ``W^a_bcd V^b`` indexed (a, c, d)."""
    return np.einsum("abcd,b->acd", weyl13, v)


def weyl_flat_matrix(weyl13: np.ndarray) -> np.ndarray:
    """Matrix of ``V -> W(., .)V``: rows (a, c, d), columns the components of V."""
    n = weyl13.shape[0]
    return np.transpose(weyl13, (0, 2, 3, 1)).reshape(n**3, n)


def weyl_kernel(
    weyl13: np.ndarray,
    g: np.ndarray,
    point: Sequence[float],
    tol: float,
    scale: float,
) -> WeylKernel:
    """Kernel of the flattened Weyl map, with causal type of each basis vector."""
    matrix = weyl_flat_matrix(weyl13)
    _, singular, vh = scipy.linalg.svd(matrix, full_matrices=True)
    n = g.shape[0]
    threshold = tol * (1.0 + scale)
    rank = int(np.sum(singular > threshold))
    basis = vh[rank:].T  # columns span the kernel
    metric_scale = 1.0 + _norm(g)
    vectors = []
    for column in basis.T:
        column = column * _normalize_sign(column)
        nsq = float(column @ g @ column)
        if abs(nsq) <= tol * metric_scale:
            kind = KernelVectorKind.NULL
        elif nsq > 0:
            kind = KernelVectorKind.SPACELIKE
        else:
            kind = KernelVectorKind.TIMELIKE
        vectors.append(
            KernelVector(
                components=[float(x) for x in column], norm_squared=nsq, kind=kind
            )
        )
    restricted = basis.T @ g @ basis if basis.size else np.zeros((0, 0))
    restricted_norm = _norm(restricted)
    return WeylKernel(
        point=[float(x) for x in point],
        dimension=n - rank,
        basis=vectors,
        singular_values=[float(s) for s in singular],
        restricted_metric_norm=restricted_norm,
        contains_non_null=bool(basis.size) and restricted_norm > tol * metric_scale,
    )


def constant_curvature_residual(
    riem04: np.ndarray, g: np.ndarray, r: float
) -> tuple[float, float]:
    """(c, |Riem - c (g_ac g_bd - g_ad g_bc)|) with ``c = r / (n (n - 1))``."""
    n = g.shape[0]
    c = r / (n * (n - 1))
    return c, _norm(riem04 - 0.5 * c * kulkarni_nomizu(g, g))


class ClassifierService:
    """Service evaluating the characterization predicates on a metric."""

    def __init__(
        self,
        engine: CurvatureEngine | None = None,
        ladder: ToleranceLadder | None = None,
    ):
        """Initialize the service.

        Args:
            engine: Curvature engine
            ladder: Tolerance ladder; defaults to the configured one
        """
        self.engine = engine or CurvatureEngine()
        self.ladder = ladder or ToleranceLadder.from_settings()

    def _packets(
        self,
        m: MetricField,
        points: Sequence[Point],
        depth: PacketDepth = PacketDepth.RIEMANN,
    ) -> list[CurvaturePacket]:
        return [self.engine.packet(m, p, depth) for p in points]

    def _tolerance(self, tol: float | None) -> float:
        if tol is None:
            return self.ladder.theorem
        if not tol > 0:
            raise InvalidArgumentError(f"tolerance must be > 0, got {tol}")
        return tol

    def is_einstein(
        self, m: MetricField, points: Sequence[Point], tol: float | None = None
    ) -> PredicateResult:
        """``|Ric - (r/n) g| < tol (1 + |Ric|)`` at every point."""
        return einstein_predicate(self._packets(m, points), self._tolerance(tol))

    def quasi_einstein_fit(
        self, m: MetricField, p: Point, tol: float | None = None
    ) -> QuasiEinsteinFit:
        packet = self.engine.packet(m, p)
        return fit_quasi_einstein(
            packet.g, packet.ric.components, self._tolerance(tol)
        )

    def weakly_cf_check(self, m: MetricField, p: Point, v: Sequence[float]) -> float:
        """``|W(., .)V|`` for a Euclidean-normalized V.

        Raises:
            InvalidArgumentError: For the zero vector
            DimensionError: For n < 4
        """
        weyl13, _ = self.engine.weyl(m, p)
        return weakly_cf_residual(weyl13.components, v)

    def weakly_cf_kernel(self, m: MetricField, p: Point) -> WeylKernel:
        packet = self.engine.packet(m, p)
        return kernel_of_packet(packet, self.ladder.derived)

    def eardley_check(self, m: MetricField, points: Sequence[Point]) -> EardleyReport:
        """Non-null kernel vectors force a vanishing Weyl tensor (dimension four).

        Raises:
            DimensionError: Unless n = 4
        """
        if m.dim != 4:
            raise DimensionError(
                f"the rigidity check is stated for dimension 4, got {m.dim}"
            )
        return eardley_of_packets(m.label, self._packets(m, points), self.ladder)

    def harmonic_weyl_check(
        self, m: MetricField, points: Sequence[Point]
    ) -> PredicateResult:
        if m.dim < 4:
            raise DimensionError(f"harmonic Weyl needs dimension >= 4, got {m.dim}")
        packets = self._packets(m, points, PacketDepth.DIVERGENCE)
        return harmonic_weyl_predicate(packets, self.ladder.derived)

    def constant_curvature_check(
        self, m: MetricField, points: Sequence[Point]
    ) -> ConstantCurvatureFit:
        return constant_curvature_fit(self._packets(m, points), self.ladder.derived)

    def classify(
        self,
        m: MetricField,
        points: Sequence[Point],
        depth: PacketDepth = PacketDepth.BACH,
    ) -> ClassificationReport:
        """All predicates applicable to the metric's dimension."""
        if m.dim < 4:
            depth = PacketDepth.RIEMANN
        packets = self._packets(m, points, depth)
        return classify_packets(m, packets, self.ladder)


def weakly_cf_residual(weyl13: np.ndarray, v: Sequence[float]) -> float:
    vector = np.asarray(v, dtype=float)
    length = float(np.linalg.norm(vector))
    if length == 0.0:
        raise InvalidArgumentError("weak conformal flatness needs a nonzero vector")
    return _norm(weyl_action(weyl13, vector / length))


def kernel_of_packet(packet: CurvaturePacket, tol: float) -> WeylKernel:
    if packet.weyl13 is None:
        raise DimensionError(f"Weyl kernel needs dimension >= 4, got {packet.dim}")
    return weyl_kernel(
        packet.weyl13.components,
        packet.g,
        packet.point.coords,
        tol,
        packet.riem04.norm(),
    )


def _coords(packets: Sequence[CurvaturePacket]) -> list[tuple[float, ...]]:
    return [pk.point.coords for pk in packets]


def einstein_predicate(
    packets: Sequence[CurvaturePacket], tol: float
) -> PredicateResult:
    residuals = []
    for pk in packets:
        ric = pk.ric.components
        residuals.append(_norm(ric - (pk.r / pk.dim) * pk.g) / (1.0 + _norm(ric)))
    return PredicateResult.aggregate("einstein", residuals, _coords(packets), tol)


def quasi_einstein_predicate(
    packets: Sequence[CurvaturePacket], tol: float
) -> tuple[PredicateResult, list[QuasiEinsteinFit]]:
    fits = [fit_quasi_einstein(pk.g, pk.ric.components, tol) for pk in packets]
    residuals = []
    for fit, pk in zip(fits, packets):
        relative = max(fit.residual, fit.second_singular_value) / (1.0 + pk.ric.norm())
        # a rejected fit never counts as passing
        residuals.append(relative if fit.verdict else max(relative, tol))
    return (
        PredicateResult.aggregate(
            "quasi_einstein", residuals, _coords(packets), tol
        ),
        fits,
    )


def conformally_flat_predicate(
    packets: Sequence[CurvaturePacket], tol: float
) -> PredicateResult:
    residuals = [
        _require_weyl(pk).norm() / (1.0 + pk.riem04.norm()) for pk in packets
    ]
    return PredicateResult.aggregate(
        "conformally_flat", residuals, _coords(packets), tol
    )


def harmonic_weyl_predicate(
    packets: Sequence[CurvaturePacket], tol: float
) -> PredicateResult:
    residuals = []
    for pk in packets:
        if pk.div_weyl is None:
            raise InvalidArgumentError("packet lacks the divergence of Weyl")
        residuals.append(pk.div_weyl.norm() / (1.0 + pk.riem04.norm()))
    return PredicateResult.aggregate("harmonic_weyl", residuals, _coords(packets), tol)


def bach_flat_predicate(
    packets: Sequence[CurvaturePacket], tol: float
) -> PredicateResult:
    residuals = []
    for pk in packets:
        if pk.bach is None:
            raise InvalidArgumentError("packet lacks the Bach tensor")
        residuals.append(pk.bach.norm() / (1.0 + pk.riem04.norm() ** 2))
    return PredicateResult.aggregate("bach_flat", residuals, _coords(packets), tol)


def constant_curvature_fit(
    packets: Sequence[CurvaturePacket], tol: float
) -> ConstantCurvatureFit:
    cs, residuals = [], []
    for pk in packets:
        c, res = constant_curvature_residual(pk.riem04.components, pk.g, pk.r)
        cs.append(c)
        residuals.append(res / (1.0 + pk.riem04.norm()))
    spread = float(np.max(cs) - np.min(cs)) if cs else 0.0
    aggregated = PredicateResult.aggregate(
        "constant_curvature", residuals, _coords(packets), tol
    )
    c_scale = 1.0 + float(np.max(np.abs(cs), initial=0.0))
    return ConstantCurvatureFit(
        verdict=aggregated.verdict and spread < tol * c_scale,
        c=float(np.mean(cs)) if cs else 0.0,
        c_spread=spread,
        max_residual=aggregated.max_residual,
        witness_point=aggregated.witness_point,
    )


def eardley_of_packets(
    label: str, packets: Sequence[CurvaturePacket], ladder: ToleranceLadder
) -> EardleyReport:
    rows = []
    for pk in packets:
        kernel = kernel_of_packet(pk, ladder.derived)
        weyl_norm = _require_weyl(pk).norm()
        relative = weyl_norm / (1.0 + pk.riem04.norm())
        rows.append(
            EardleyPoint(
                point=list(pk.point.coords),
                kernel_dimension=kernel.dimension,
                contains_non_null=kernel.contains_non_null,
                weyl_norm=weyl_norm,
                violation=kernel.contains_non_null and not relative < ladder.theorem,
            )
        )
    return EardleyReport(
        metric_label=label,
        points=rows,
        violations=sum(r.violation for r in rows),
        null_kernel_points=sum(
            r.kernel_dimension > 0 and not r.contains_non_null for r in rows
        ),
        threshold=ladder.theorem,
    )


def _require_weyl(packet: CurvaturePacket) -> TensorValue:
    if packet.weyl04 is None:
        raise DimensionError(f"Weyl tensor needs dimension >= 4, got {packet.dim}")
    return packet.weyl04


def classify_packets(
    m: MetricField, packets: Sequence[CurvaturePacket], ladder: ToleranceLadder
) -> ClassificationReport:
    """Aggregate every applicable predicate over precomputed packets."""
    predicates = [einstein_predicate(packets, ladder.theorem)]
    qe, fits = quasi_einstein_predicate(packets, ladder.theorem)
    predicates.append(qe)
    cc = constant_curvature_fit(packets, ladder.derived)
    predicates.append(
        PredicateResult(
            name="constant_curvature",
            verdict=cc.verdict,
            max_residual=cc.max_residual,
            threshold=ladder.derived,
            points=len(packets),
            witness_point=cc.witness_point,
        )
    )
    constants: dict[str, float | None] = {
        "scalar_curvature_mean": (
            float(np.mean([pk.r for pk in packets])) if packets else None
        ),
        "sectional_constant": cc.c if cc.verdict else None,
    }
    if predicates[0].verdict and packets:
        constants["einstein_constant"] = float(
            np.mean([pk.r / pk.dim for pk in packets])
        )
    if qe.verdict and fits:
        constants["quasi_einstein_a"] = fits[0].a
        constants["quasi_einstein_b"] = fits[0].b
        constants["quasi_einstein_epsilon_u"] = (
            float(fits[0].epsilon_u) if fits[0].epsilon_u is not None else None
        )
    if m.dim >= 4:
        predicates.append(conformally_flat_predicate(packets, ladder.derived))
        if packets and packets[0].div_weyl is not None:
            predicates.append(harmonic_weyl_predicate(packets, ladder.derived))
        if packets and packets[0].bach is not None:
            predicates.append(bach_flat_predicate(packets, ladder.theorem))
        kernels = [kernel_of_packet(pk, ladder.derived) for pk in packets]
        residuals = [
            min(k.singular_values) / (1.0 + pk.riem04.norm())
            for k, pk in zip(kernels, packets)
        ]
        predicates.append(
            PredicateResult.aggregate(
                "weakly_conformally_flat",
                residuals,
                _coords(packets),
                ladder.derived,
                detail="kernel of V -> W(., .)V is nontrivial",
            )
        )
        constants["weyl_kernel_min_dimension"] = float(
            min((k.dimension for k in kernels), default=0)
        )
    logger.info(
        "classified %s over %d points: %s",
        m.label,
        len(packets),
        ", ".join(f"{p.name}={p.verdict}" for p in predicates),
    )
    return ClassificationReport(
        metric_label=m.label,
        points_used=len(packets),
        predicates=predicates,
        constants=constants,
    )
