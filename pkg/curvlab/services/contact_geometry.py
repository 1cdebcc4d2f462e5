"""Contact metric structures: identities, h, (k, mu) and eta-Einstein fits."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from curvlab.config import settings
from curvlab.core.jets import JetEvaluator
from curvlab.core.metric import Point
from curvlab.exceptions import ContactStructureError, DimensionError, HypothesisError
from curvlab.models.contact import ContactStructure
from curvlab.schemas.fits import EtaEinsteinFit, KMuFit
from curvlab.schemas.report import PredicateResult, ToleranceLadder
from curvlab.schemas.verification import (
    ContactInvariants,
    ContactStructureReport,
    HOperatorCheck,
    NablaXiCheck,
    NormalizationCase,
    NormalizationReport,
    PropositionPoint,
    ReductionReport,
    ReebWeylEquivalence,
    WeylReebPoint,
)
from curvlab.services.curvature_engine import (
    CurvatureEngine,
    CurvaturePacket,
    PacketDepth,
)
from curvlab.telemetry.tracing import get_tracer

logger = logging.getLogger(__name__)
tracer = get_tracer(__name__)

FRAME_CACHE_SIZE = 1024

STRUCTURAL_IDENTITIES = (
    "eta(xi) = 1",
    "eta = g(xi, .)",
    "phi^2 = -I + eta (x) xi",
    "phi xi = 0",
    "d eta(xi, .) = 0",
    "d eta(X, Y) = g(X, phi Y)",
    "g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y)",
    "contact volume",
)


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(a)))


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a)))


def _wedge_with_eta(eta: np.ndarray, op: np.ndarray) -> np.ndarray:
    """``[a, i, j] = eta_j op^a_i - eta_i op^a_j``."""
    return np.einsum("j,ai->aij", eta, op) - np.einsum("i,aj->aij", eta, op)


@dataclass(frozen=True)
class ContactFrame:
    """Structure tensors and their first derivatives at one point.

    ``d_xi[a, c]`` is ``d_c xi^a`` and ``nabla_xi[a, b]`` is ``nabla_b xi^a``.
    """

    point: Point
    packet: CurvaturePacket
    eta: np.ndarray
    xi: np.ndarray
    phi: np.ndarray
    d_eta: np.ndarray
    d_xi: np.ndarray
    h: np.ndarray
    nabla_xi: np.ndarray
    contact_volume: float

    @property
    def g(self) -> np.ndarray:
        return self.packet.g

    @property
    def riemann_scale(self) -> float:
        return 1.0 + self.packet.riem04.norm()

    def h_form(self) -> np.ndarray:
        """``[i, j] = g(h d_i, d_j)``."""
        return self.h.T @ self.g

    def reeb_curvature(self) -> np.ndarray:
        """``[a, i, j]``: component a of ``R(d_i, d_j) xi``."""
        return np.einsum("abij,b->aij", self.packet.riem13.components, self.xi)

    def nullity_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """``eta(Y)X - eta(X)Y`` and ``eta(Y)hX - eta(X)hY`` on coordinate pairs."""
        n = len(self.eta)
        eye = np.eye(n)
        return _wedge_with_eta(self.eta, eye), _wedge_with_eta(self.eta, self.h)

    def eta_einstein_coefficients(self, m: int) -> tuple[float, float, float]:
        """Trace-fitted ``(a, b)`` and the residual of ``Ric - a g - b eta (x) eta``."""
        ric = self.packet.ric.components
        reeb = float(self.xi @ ric @ self.xi)
        a = (self.packet.r - reeb) / (2 * m)
        b = reeb - a
        fitted = a * self.g + b * np.outer(self.eta, self.eta)
        residual = _norm(ric - fitted) / (1.0 + _norm(ric))
        return a, b, residual


class ContactGeometryService:
    """Service evaluating contact metric identities over sample points."""

    def __init__(
        self,
        engine: CurvatureEngine | None = None,
        ladder: ToleranceLadder | None = None,
    ):
        """Initialize the service.

        Args:
            engine: Curvature engine shared with the other services
            ladder: Tolerance ladder
        """
        self.engine = engine or CurvatureEngine()
        self.ladder = ladder or ToleranceLadder.from_settings()
        self._frame = lru_cache(maxsize=FRAME_CACHE_SIZE)(self._build_frame)

    def frame(self, cs: ContactStructure, p: Point) -> ContactFrame:
        """Frame data at a point, cached on the structure's content and the point."""
        return self._frame(cs, p)

    def frames(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> list[ContactFrame]:
        return [self.frame(cs, p) for p in points]

    def _build_frame(self, cs: ContactStructure, p: Point) -> ContactFrame:
        n = cs.dim
        packet = self.engine.packet(cs.metric, p, PacketDepth.RIEMANN)
        evaluate = JetEvaluator(p.coords, 1, cs.metric.coord_names)
        units = [tuple(int(k == c) for k in range(n)) for c in range(n)]

        def value_and_gradient(exprs: Sequence) -> tuple[np.ndarray, np.ndarray]:
            jets = [evaluate(e) for e in exprs]
            values = np.array([float(j.value) for j in jets])
            grads = np.array([[float(j.partial(u)) for u in units] for j in jets])
            return values, grads

        eta, grad_eta = value_and_gradient(cs.eta)
        xi, d_xi = value_and_gradient(cs.xi)
        flat_phi, flat_dphi = value_and_gradient([e for row in cs.phi for e in row])
        phi = flat_phi.reshape(n, n)
        d_phi = flat_dphi.reshape(n, n, n)

        d_eta = 0.5 * (grad_eta.T - grad_eta)
        lie_phi = (
            np.einsum("c,abc->ab", xi, d_phi)
            - np.einsum("cb,ac->ab", phi, d_xi)
            + np.einsum("ac,cb->ab", phi, d_xi)
        )
        gamma = np.asarray(packet.christoffel.value)
        nabla_xi = d_xi + np.einsum("abc,c->ab", gamma, xi)

        bordered = np.zeros((n + 1, n + 1))
        bordered[:n, :n] = d_eta
        bordered[:n, n] = eta
        bordered[n, :n] = -eta
        volume = float(np.sqrt(abs(np.linalg.det(bordered))))
        return ContactFrame(
            p, packet, eta, xi, phi, d_eta, d_xi, 0.5 * lie_phi, nabla_xi, volume
        )

    def verify_structure(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> ContactStructureReport:
        """Worst residual of each structural identity plus the contact volume floor.

        The first identity (in :data:`STRUCTURAL_IDENTITIES` order) exceeding
        the structural tolerance is reported with its worst point.
        """
        floor = self.ladder.structural
        worst: dict[str, tuple[float, Point | None]] = {
            name: (0.0, None) for name in STRUCTURAL_IDENTITIES
        }
        failures: dict[str, bool] = {name: False for name in STRUCTURAL_IDENTITIES}
        min_volume = np.inf
        for frame in self.frames(cs, points):
            g, eta, xi, phi = frame.g, frame.eta, frame.xi, frame.phi
            n = len(eta)
            values = {
                "eta(xi) = 1": abs(float(eta @ xi) - 1.0),
                "eta = g(xi, .)": float(np.max(np.abs(eta - g @ xi))),
                "phi^2 = -I + eta (x) xi": _max_abs(
                    phi @ phi + np.eye(n) - np.outer(xi, eta)
                ),
                "phi xi = 0": _max_abs(phi @ xi),
                "d eta(xi, .) = 0": _max_abs(xi @ frame.d_eta),
                "d eta(X, Y) = g(X, phi Y)": _max_abs(frame.d_eta - g @ phi),
                "g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y)": _max_abs(
                    phi.T @ g @ phi - g + np.outer(eta, eta)
                ),
            }
            threshold = floor * (1.0 + float(np.max(np.abs(g))))
            for name, value in values.items():
                if value > worst[name][0] or worst[name][1] is None:
                    worst[name] = (max(value, worst[name][0]), frame.point)
                failures[name] = failures[name] or not value < threshold
            min_volume = min(min_volume, frame.contact_volume)
            if frame.contact_volume < settings.contact_volume_floor:
                failures["contact volume"] = True
                if worst["contact volume"][1] is None:
                    worst["contact volume"] = (frame.contact_volume, frame.point)

        failed = next((name for name in STRUCTURAL_IDENTITIES if failures[name]), None)
        witness = worst[failed][1] if failed else None
        residuals = {
            name: worst[name][0]
            for name in STRUCTURAL_IDENTITIES
            if name != "contact volume"
        }
        report = ContactStructureReport(
            label=cs.label,
            residuals=residuals,
            min_contact_volume=float(min_volume) if points else 0.0,
            passed=failed is None,
            failed_identity=failed,
            witness_point=list(witness.coords) if witness is not None else None,
        )
        logger.debug(
            "structure %s: %s", cs.label, "ok" if report.passed else f"fails {failed}"
        )
        return report

    def require_structure(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> ContactStructureReport:
        """Like :meth:`verify_structure` but raising on the first failed identity.

        Raises:
            ContactStructureError: Naming the identity and the witness point
        """
        report = self.verify_structure(cs, points)
        if not report.passed:
            failed = report.failed_identity
            assert failed is not None and report.witness_point is not None
            residual = report.residuals.get(failed, report.min_contact_volume)
            raise ContactStructureError(
                failed, tuple(report.witness_point), residual
            )
        return report

    def compute_h(self, cs: ContactStructure, p: Point) -> HOperatorCheck:
        """``h = 1/2 Lie_xi phi`` with its self-adjointness, trace and phi residuals.

        Raises:
            ContactStructureError: If the structure identities fail at ``p``
        """
        self.require_structure(cs, [p])
        frame = self.frame(cs, p)
        h = frame.h
        h_form = frame.h_form()
        return HOperatorCheck(
            point=list(p.coords),
            h=h.tolist(),
            norm_squared=float(np.trace(h @ h)),
            self_adjoint=float(np.max(np.abs(h_form - h_form.T))),
            trace=abs(float(np.trace(h))),
            anticommutes_with_phi=_max_abs(h @ frame.phi + frame.phi @ h),
        )

    def check_nabla_xi(self, cs: ContactStructure, p: Point) -> NablaXiCheck:
        """``nabla_X xi = -phi X - phi h X`` and ``Ric(xi, xi) = 2m - |h|^2``."""
        frame = self.frame(cs, p)
        residual = frame.nabla_xi + frame.phi + frame.phi @ frame.h
        reeb_ricci = float(frame.xi @ frame.packet.ric.components @ frame.xi)
        return NablaXiCheck(
            point=list(p.coords),
            nabla_residual=float(np.max(np.abs(residual))),
            reeb_ricci=reeb_ricci,
            reeb_ricci_residual=abs(
                reeb_ricci - 2 * cs.m + float(np.trace(frame.h @ frame.h))
            ),
        )

    def _k_contact_residual(self, frame: ContactFrame) -> float:
        n = len(frame.xi)
        lhs = np.einsum(
            "abid,b,d->ai", frame.packet.riem13.components, frame.xi, frame.xi
        )
        rhs = np.eye(n) - np.outer(frame.xi, frame.eta)
        return _norm(lhs - rhs) / frame.riemann_scale

    def _sasakian_residual(self, frame: ContactFrame) -> float:
        k_part, _ = frame.nullity_basis()
        return _norm(frame.reeb_curvature() - k_part) / frame.riemann_scale

    def is_k_contact(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> PredicateResult:
        """``R(X, xi)xi = X - eta(X)xi`` over coordinate frames."""
        self.require_structure(cs, points)
        frames = self.frames(cs, points)
        return PredicateResult.aggregate(
            "k_contact",
            [self._k_contact_residual(f) for f in frames],
            [f.point.coords for f in frames],
            self.ladder.derived,
        )

    def is_sasakian(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> PredicateResult:
        """``R(X, Y)xi = eta(Y)X - eta(X)Y`` over coordinate frames."""
        self.require_structure(cs, points)
        frames = self.frames(cs, points)
        result = PredicateResult.aggregate(
            "sasakian",
            [self._sasakian_residual(f) for f in frames],
            [f.point.coords for f in frames],
            self.ladder.derived,
        )
        if result.verdict and not self.is_k_contact(cs, points).verdict:
            logger.warning(
                "%s passes the Sasakian test but not the K-contact test", cs.label
            )
        return result

    def fit_k_mu(self, cs: ContactStructure, points: Sequence[Point]) -> KMuFit:
        """Least-squares ``(k, mu)`` in ``R(X, Y)xi = k(...) + mu(...)``.

        ``mu`` is left undetermined when ``h`` vanishes at every point. For a
        successful fit with ``k < 1`` the Ricci formula of (k, mu)-spaces and
        both normalizations of its trace are compared with the engine.
        """
        self.require_structure(cs, points)
        frames = self.frames(cs, points)
        m = cs.m
        h_max = max((_norm(f.h) for f in frames), default=0.0)
        mu_determined = h_max >= self.ladder.structural

        rows, target = [], []
        for f in frames:
            k_part, mu_part = f.nullity_basis()
            columns = [k_part.ravel()]
            if mu_determined:
                columns.append(mu_part.ravel())
            rows.append(np.stack(columns, axis=1) / f.riemann_scale)
            target.append(f.reeb_curvature().ravel() / f.riemann_scale)
        design = np.concatenate(rows)
        rhs = np.concatenate(target)
        solution, *_ = np.linalg.lstsq(design, rhs, rcond=None)
        k = float(solution[0])
        mu = float(solution[1]) if mu_determined else None

        residuals = []
        for f in frames:
            k_part, mu_part = f.nullity_basis()
            model = k * k_part + (mu or 0.0) * mu_part
            residuals.append(_norm(f.reeb_curvature() - model) / f.riemann_scale)
        residual = max(residuals, default=0.0)
        verdict = residual < self.ladder.theorem

        ricci_residual = bare_residual = scaled_residual = None
        if verdict and k < 1.0 - self.ladder.theorem:
            mu_value = mu or 0.0
            bare = 2 * m - 2 + k - m * mu_value
            ricci_residual = max(
                _norm(f.packet.ric.components - _k_mu_ricci(f, m, k, mu_value))
                / (1.0 + f.packet.ric.norm())
                for f in frames
            )
            bare_residual = max(abs(f.packet.r - bare) for f in frames)
            scaled_residual = max(abs(f.packet.r - 2 * m * bare) for f in frames)
        logger.info(
            "k-mu fit for %s: k=%.6g mu=%s residual=%.3g", cs.label, k, mu, residual
        )
        return KMuFit(
            verdict=verdict,
            k=k,
            mu=mu,
            mu_determined=mu_determined,
            residual=residual,
            h_norm_max=h_max,
            ricci_formula_residual=ricci_residual,
            scalar_bare_residual=bare_residual,
            scalar_scaled_residual=scaled_residual,
        )

    def eta_einstein_fit(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> EtaEinsteinFit:
        """Pointwise ``a = (r - Ric(xi, xi)) / 2m``, ``b = Ric(xi, xi) - a``.

        For K-contact structures the trace identity ``r = (2m+1)a + b`` and
        ``a + b = 2m`` are also evaluated.
        """
        self.require_structure(cs, points)
        frames = self.frames(cs, points)
        m = cs.m
        coefficients = [f.eta_einstein_coefficients(m) for f in frames]
        a_values = [c[0] for c in coefficients]
        b_values = [c[1] for c in coefficients]
        residual = max((c[2] for c in coefficients), default=0.0)

        scalar_identity = sum_identity = None
        if frames and self.is_k_contact(cs, points).verdict:
            scalar_identity = max(
                abs(f.packet.r - (2 * m + 1) * a - b)
                for f, a, b in zip(frames, a_values, b_values)
            )
            sum_identity = max(abs(a + b - 2 * m) for a, b in zip(a_values, b_values))
        return EtaEinsteinFit(
            verdict=residual < self.ladder.derived,
            a=a_values,
            b=b_values,
            residual=residual,
            a_spread=float(np.ptp(a_values)) if a_values else 0.0,
            b_spread=float(np.ptp(b_values)) if b_values else 0.0,
            scalar_identity_residual=scalar_identity,
            sum_identity_residual=sum_identity,
        )

    def weyl_reeb_double(self, cs: ContactStructure, p: Point) -> WeylReebPoint:
        """``W(X, xi)xi`` from the engine against its K-contact closed form.

        Raises:
            DimensionError: For three-dimensional structures
            HypothesisError: If the structure is not K-contact at ``p``
        """
        _require_weyl_dimension(cs)
        frame = self.frame(cs, p)
        if not self._k_contact_residual(frame) < self.ladder.derived:
            raise HypothesisError(f"'{cs.label}' is not K-contact at {p.coords}")
        return self._weyl_reeb(cs, frame)

    def _weyl_reeb(self, cs: ContactStructure, frame: ContactFrame) -> WeylReebPoint:
        m = cs.m
        n = cs.dim
        packet = frame.packet
        assert packet.weyl13 is not None
        xi, eta = frame.xi, frame.eta
        engine_side = np.einsum("abid,b,d->ai", packet.weyl13.components, xi, xi)
        q = packet.q.components
        r = packet.r
        reeb = np.outer(xi, eta)
        transverse = (r - 2 * m) / (2 * m * (2 * m - 1)) * (np.eye(n) - reeb)
        formula = transverse - (q - 2 * m * reeb) / (2 * m - 1)

        ricci_operator = None
        _, _, eta_residual = frame.eta_einstein_coefficients(m)
        if eta_residual < self.ladder.theorem:
            expected = (r / (2 * m) - 1) * np.eye(n) + (2 * m + 1 - r / (2 * m)) * reeb
            ricci_operator = _norm(q - expected) / (1.0 + _norm(q))
        return WeylReebPoint(
            point=list(frame.point.coords),
            engine_vs_formula=_max_abs(engine_side - formula) / frame.riemann_scale,
            weyl_reeb_norm=_norm(engine_side) / frame.riemann_scale,
            ricci_operator_residual=ricci_operator,
        )

    def proposition_1_1_verify(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> ReebWeylEquivalence:
        """``W(X, xi)xi = 0`` against eta-Einstein, point by point, when K-contact.

        Raises:
            DimensionError: For three-dimensional structures
            HypothesisError: If the structure is not K-contact
        """
        _require_weyl_dimension(cs)
        with tracer.start_as_current_span("contact.reeb_weyl") as span:
            span.set_attribute("curvlab.structure", cs.label)
            k_contact = self.is_k_contact(cs, points)
            if not k_contact.verdict:
                raise HypothesisError(
                    f"'{cs.label}' is not K-contact "
                    f"(residual {k_contact.max_residual:.3g})"
                )
            tol = self.ladder.theorem
            fit = self.eta_einstein_fit(cs, points)
            rows, weyl_rows = [], []
            for frame in self.frames(cs, points):
                wr = self._weyl_reeb(cs, frame)
                _, _, eta_residual = frame.eta_einstein_coefficients(cs.m)
                vanishes = wr.weyl_reeb_norm < tol
                eta_einstein = eta_residual < tol
                weyl_rows.append(wr)
                rows.append(
                    PropositionPoint(
                        point=wr.point,
                        weyl_reeb_vanishes=vanishes,
                        eta_einstein=eta_einstein,
                        agree=vanishes == eta_einstein,
                    )
                )
        all_vanish = all(r.weyl_reeb_vanishes for r in rows)
        all_eta = all(r.eta_einstein for r in rows)
        if all(r.agree for r in rows) and all_vanish:
            verdict = "both true"
        elif all(r.agree for r in rows) and not any(r.eta_einstein for r in rows):
            verdict = "both false"
        else:
            verdict = "mixed"
        logger.info("W(X, xi)xi = 0 vs eta-Einstein on %s: %s", cs.label, verdict)
        return ReebWeylEquivalence(
            label=cs.label,
            points=rows,
            weyl_reeb=weyl_rows,
            eta_einstein=fit,
            weyl_reeb_vanishes=all_vanish,
            is_eta_einstein=all_eta,
            verdict=verdict,
        )

    def theorem_1_2_reduction(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> ReductionReport:
        """Reduction of an eta-Einstein structure with ``W(X, Y)xi = 0``.

        Checks the induced nullity condition with ``k = (a + b) / 2m``, the
        constancy of ``k``, and then either the Sasakian identity (``k = 1``)
        or the forced ``a = 2(m - 1)`` with a rank-one Ricci tensor (``k < 1``).
        A failed hypothesis is reported, never skipped.
        """
        self.require_structure(cs, points)
        frames = self.frames(cs, points)
        m = cs.m
        tol = self.ladder.theorem
        fit = self.eta_einstein_fit(cs, points)

        details = []
        if not fit.verdict:
            details.append(f"not eta-Einstein (residual {fit.residual:.3g})")
        if cs.dim >= 4:
            weyl_xi = max(_weyl_reeb_full(f) for f in frames)
            if not weyl_xi < tol:
                details.append(f"W(X, Y)xi != 0 (residual {weyl_xi:.3g})")
        hypotheses = not details
        if details:
            detail = "; ".join(details)
        elif cs.dim >= 4:
            detail = "eta-Einstein, W(X, Y)xi = 0"
        else:
            detail = "eta-Einstein (Weyl condition vacuous in dimension 3)"

        k_values = [(a + b) / (2 * m) for a, b in zip(fit.a, fit.b)]
        nullity = 0.0
        for f, k in zip(frames, k_values):
            k_part, _ = f.nullity_basis()
            residual = _norm(f.reeb_curvature() - k * k_part) / f.riemann_scale
            nullity = max(nullity, residual)
        k_mean = float(np.mean(k_values)) if k_values else 0.0
        k_variance = float(np.var(k_values)) if k_values else 0.0
        h_max = max((_norm(f.h) for f in frames), default=0.0)
        ric_rank = max((_rank(f.packet.ric.components, tol) for f in frames), default=0)

        sasakian_residual = forced_a = None
        model = None
        if not hypotheses:
            branch = "hypotheses_failed"
        elif abs(k_mean - 1.0) < tol:
            branch = "sasakian"
            sasakian_residual = max(self._sasakian_residual(f) for f in frames)
            model = "Sasakian"
        elif k_mean < 1.0:
            branch = "k_below_one"
            a_mean = float(np.mean(fit.a))
            forced_a = abs(a_mean - 2 * (m - 1))
            if m == 1:
                if abs(k_mean) < tol:
                    model = "flat"
                elif k_mean > 0:
                    model = "SU(2) with a left-invariant metric"
                else:
                    model = "SL(2,R) with a left-invariant metric"
        else:
            branch = "k_above_one"
        logger.info("reduction on %s: branch %s, k = %.6g", cs.label, branch, k_mean)
        return ReductionReport(
            label=cs.label,
            dimension=cs.dim,
            hypotheses_hold=hypotheses,
            hypothesis_detail=detail,
            nullity_residual=nullity,
            k_values=k_values,
            k_mean=k_mean,
            k_variance=k_variance,
            branch=branch,
            sasakian_residual=sasakian_residual,
            forced_a_residual=forced_a,
            h_norm_max=h_max,
            ricci_rank=ric_rank,
            model_space=model,
        )

    def reduction_identity_residual(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> float:
        """Worst residual of ``(a-2m+2)g + (2m-2-a) eta (x) eta = 2(m-1) g(h., .)``."""
        frames = self.frames(cs, points)
        m = cs.m
        worst = 0.0
        for f in frames:
            a, _, _ = f.eta_einstein_coefficients(m)
            lhs = (a - 2 * m + 2) * f.g + (2 * m - 2 - a) * np.outer(f.eta, f.eta)
            residual = _norm(lhs - 2 * (m - 1) * f.h_form()) / (1.0 + _norm(f.g))
            worst = max(worst, residual)
        return worst

    def scalar_normalization_report(
        self, cases: Sequence[tuple[ContactStructure, Sequence[Point]]]
    ) -> NormalizationReport:
        """Compare ``2m - 2 + k - m mu`` and ``2m`` times it with the engine's ``r``.

        Only successful (k, mu) fits with ``k < 1`` take part; a case
        discriminates when the two candidates differ.
        """
        rows = []
        for cs, points in cases:
            fit = self.fit_k_mu(cs, points)
            if not fit.verdict or fit.k >= 1.0 - self.ladder.theorem:
                continue
            frames = self.frames(cs, points)
            m = cs.m
            mu = fit.mu or 0.0
            engine_r = float(np.mean([f.packet.r for f in frames]))
            trace = float(
                np.mean(
                    [
                        np.trace(f.packet.g_inv @ _k_mu_ricci(f, m, fit.k, mu))
                        for f in frames
                    ]
                )
            )
            bare = 2 * m - 2 + fit.k - m * mu
            scaled = 2 * m * bare
            tol = self.ladder.theorem * (1.0 + abs(engine_r))
            rows.append(
                NormalizationCase(
                    label=cs.label,
                    k=fit.k,
                    mu=fit.mu,
                    engine_scalar=engine_r,
                    ricci_trace=trace,
                    bare_formula=bare,
                    scaled_formula=scaled,
                    bare_matches=abs(engine_r - bare) < tol,
                    scaled_matches=abs(engine_r - scaled) < tol,
                    discriminating=abs(bare - scaled) >= tol,
                )
            )
        deciding = [c for c in rows if c.discriminating]
        if not deciding:
            conclusion = "no fixture with k < 1 separates the two normalizations"
        elif all(c.scaled_matches and not c.bare_matches for c in deciding):
            conclusion = "r = 2m(2m - 2 + k - m mu)"
        elif all(c.bare_matches and not c.scaled_matches for c in deciding):
            conclusion = "r = 2m - 2 + k - m mu"
        else:
            conclusion = "inconclusive"
        return NormalizationReport(cases=rows, conclusion=conclusion)

    def invariants(
        self, cs: ContactStructure, points: Sequence[Point]
    ) -> ContactInvariants:
        """Everything the contact report shows for one structure."""
        structure = self.require_structure(cs, points)
        h_checks = [self.compute_h(cs, p) for p in points]
        nabla = [self.check_nabla_xi(cs, p) for p in points]
        return ContactInvariants(
            structure=structure,
            h=h_checks[0].h if h_checks else [],
            h_norm_max=max(
                (float(np.sqrt(max(c.norm_squared, 0.0))) for c in h_checks),
                default=0.0,
            ),
            h_identity_residuals={
                "self_adjoint": max((c.self_adjoint for c in h_checks), default=0.0),
                "trace": max((c.trace for c in h_checks), default=0.0),
                "anticommutes_with_phi": max(
                    (c.anticommutes_with_phi for c in h_checks), default=0.0
                ),
            },
            nabla_xi_residual=max((c.nabla_residual for c in nabla), default=0.0),
            reeb_ricci_residual=max(
                (c.reeb_ricci_residual for c in nabla), default=0.0
            ),
            k_contact=self.is_k_contact(cs, points),
            sasakian=self.is_sasakian(cs, points),
            k_mu=self.fit_k_mu(cs, points),
            eta_einstein=self.eta_einstein_fit(cs, points),
        )


def _k_mu_ricci(frame: ContactFrame, m: int, k: float, mu: float) -> np.ndarray:
    """Ricci tensor of a (k, mu)-space with ``k < 1``."""
    return (
        (2 * m - 2 - m * mu) * frame.g
        + (2 * m - 2 + mu) * frame.h_form()
        + (m * (2 * k + mu) - 2 * m + 2) * np.outer(frame.eta, frame.eta)
    )


def _weyl_reeb_full(frame: ContactFrame) -> float:
    """Relative norm of ``W(X, Y)xi`` over coordinate pairs."""
    weyl13 = frame.packet.weyl13
    assert weyl13 is not None
    weyl_xi = np.einsum("abij,b->aij", weyl13.components, frame.xi)
    return _norm(weyl_xi) / frame.riemann_scale


def _rank(matrix: np.ndarray, tol: float) -> int:
    singular = np.linalg.svd(matrix, compute_uv=False)
    return int(np.sum(singular > tol * (1.0 + float(np.max(singular, initial=0.0)))))


def _require_weyl_dimension(cs: ContactStructure) -> None:
    if cs.dim < 5:
        raise DimensionError(
            f"Weyl-based contact statements need dimension >= 5, got {cs.dim}"
        )
