"""Closed-form warped-product curvature checked against the generic engine."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from curvlab.core.metric import MetricField, Point
from curvlab.core.tensors import DOWN, TensorValue
from curvlab.exceptions import DimensionError
from curvlab.models.warped import WarpedProductSpec, assemble_metric
from curvlab.schemas.report import PredicateResult, ToleranceLadder
from curvlab.schemas.verification import (
    BlockComparison,
    WarpedPointResult,
    WarpedProductVerification,
)
from curvlab.services.classifier import fit_quasi_einstein, weakly_cf_residual
from curvlab.services.curvature_engine import (
    CurvatureEngine,
    CurvaturePacket,
    PacketDepth,
)
from curvlab.telemetry.tracing import get_tracer

logger = logging.getLogger(__name__)
tracer = get_tracer(__name__)

PACKET_CACHE_SIZE = 1024


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(a)))


@dataclass(frozen=True)
class WarpingValues:
    """Warping function data at one base point."""

    f: float
    f_dot: float
    f_ddot: float

    @property
    def hubble(self) -> float:
        return self.f_dot / self.f

    @property
    def acceleration(self) -> float:
        return self.f_ddot / self.f


@dataclass(frozen=True)
class WarpedRiemannBlocks:
    """Riemann tensor of a warped product split along ``U = d_0``.

    Index conventions (fiber indices i, j run over the fiber, a over all n):

    * ``r_xuu[a, i]``: component a of ``R(d_i, U)U``
    * ``r_xyu[a, i, j]``: component a of ``R(d_i, d_j)U``
    * ``r_xuy[a, i, j]``: component a of ``R(d_i, U)d_j``
    * ``r_xyzw``: fiber block of the (0,4) tensor, engine storage order
    """

    r_xuu: np.ndarray
    r_xyu: np.ndarray
    r_xuy: np.ndarray
    r_xyzw: np.ndarray

    @classmethod
    def from_packet(cls, packet: CurvaturePacket) -> WarpedRiemannBlocks:
        r13 = packet.riem13.components
        r04 = packet.riem04.components
        return cls(
            r_xuu=r13[:, 0, 1:, 0],
            r_xyu=r13[:, 0, 1:, 1:],
            r_xuy=np.transpose(r13[:, 1:, 1:, 0], (0, 2, 1)),
            r_xyzw=r04[1:, 1:, 1:, 1:],
        )


@dataclass(frozen=True)
class WarpedRicciBlocks:
    ric_uu: float
    ric_ux: np.ndarray
    ric_xy: np.ndarray
    scalar: float

    @classmethod
    def from_packet(cls, packet: CurvaturePacket) -> WarpedRicciBlocks:
        ric = packet.ric.components
        return cls(float(ric[0, 0]), ric[0, 1:], ric[1:, 1:], packet.r)


class WarpedProductService:
    """Service for warped-product curvature identities."""

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
        self._metric = lru_cache(maxsize=PACKET_CACHE_SIZE)(assemble_metric)
        self._fiber_packet = lru_cache(maxsize=PACKET_CACHE_SIZE)(self.engine.packet)

    def assemble_metric(self, spec: WarpedProductSpec) -> MetricField:
        """Total-space metric, memoized on the spec's content."""
        return self._metric(spec)

    def fiber_packet(self, spec: WarpedProductSpec, p: Point) -> CurvaturePacket:
        """Curvature of the fiber at the fiber part of a total-space point."""
        return self._fiber_packet(spec.fiber, Point(p.coords[1:]))

    @staticmethod
    def warping(spec: WarpedProductSpec, p: Point) -> WarpingValues:
        return WarpingValues(*spec.warping_derivatives(p.coords[0]))

    def closed_form_riemann(
        self, spec: WarpedProductSpec, p: Point
    ) -> WarpedRiemannBlocks:
        """Riemann blocks from the warping function and the fiber curvature."""
        w = self.warping(spec, p)
        fiber = self.fiber_packet(spec, p)
        eps = spec.epsilon
        m = spec.fiber_dim
        n = spec.dim
        g_fiber = fiber.g
        g = w.f**2 * g_fiber

        r_xuu = np.zeros((n, m))
        r_xuu[1:, :] = -w.acceleration * np.eye(m)
        r_xyu = np.zeros((n, m, m))
        r_xuy = np.zeros((n, m, m))
        r_xuy[0] = eps * w.acceleration * g
        model = np.einsum("ac,bd->abcd", g_fiber, g_fiber) - np.einsum(
            "ad,bc->abcd", g_fiber, g_fiber
        )
        r_xyzw = w.f**2 * fiber.riem04.components - eps * w.f_dot**2 * w.f**2 * model
        return WarpedRiemannBlocks(r_xuu, r_xyu, r_xuy, r_xyzw)

    def closed_form_ricci_scalar(
        self, spec: WarpedProductSpec, p: Point, literal: bool = False
    ) -> WarpedRicciBlocks:
        """Ricci blocks and scalar curvature from fiber data.

        Args:
            spec: Warped product
            p: Total-space point
            literal: Drop the sign factor on the squared-Hubble terms, as the
                formulas are often quoted; only correct for eps = +1

        Returns:
            WarpedRicciBlocks: Closed-form blocks
        """
        w = self.warping(spec, p)
        fiber = self.fiber_packet(spec, p)
        eps = spec.epsilon
        n = spec.dim
        h2 = w.hubble**2
        h2_sign = 1.0 if literal else float(eps)
        shift = eps * w.acceleration + h2_sign * (n - 2) * h2
        ric_xy = fiber.ric.components - shift * w.f**2 * fiber.g
        scalar = (
            fiber.r / w.f**2
            - 2.0 * eps * (n - 1) * w.acceleration
            - h2_sign * (n - 1) * (n - 2) * h2
        )
        return WarpedRicciBlocks(
            ric_uu=-(n - 1) * w.acceleration,
            ric_ux=np.zeros(spec.fiber_dim),
            ric_xy=ric_xy,
            scalar=scalar,
        )

    def compare_blocks(self, spec: WarpedProductSpec, p: Point) -> BlockComparison:
        """Relative mismatch of every closed-form block against the engine."""
        packet = self.engine.packet(self.assemble_metric(spec), p)
        closed_r = self.closed_form_riemann(spec, p)
        engine_r = WarpedRiemannBlocks.from_packet(packet)
        closed_ric = self.closed_form_ricci_scalar(spec, p)
        engine_ric = WarpedRicciBlocks.from_packet(packet)
        scale_r = 1.0 + packet.riem04.norm()
        scale_ric = 1.0 + packet.ric.norm()
        residuals = {
            "R(x,U)U": _norm(closed_r.r_xuu - engine_r.r_xuu) / scale_r,
            "R(x,y)U": _norm(closed_r.r_xyu - engine_r.r_xyu) / scale_r,
            "R(x,U)y": _norm(closed_r.r_xuy - engine_r.r_xuy) / scale_r,
            "R(x,y,z,w)": _norm(closed_r.r_xyzw - engine_r.r_xyzw) / scale_r,
            "Ric(U,U)": abs(closed_ric.ric_uu - engine_ric.ric_uu) / scale_ric,
            "Ric(U,x)": _norm(closed_ric.ric_ux - engine_ric.ric_ux) / scale_ric,
            "Ric(x,y)": _norm(closed_ric.ric_xy - engine_ric.ric_xy) / scale_ric,
            "r": abs(closed_ric.scalar - engine_ric.scalar)
            / (1.0 + abs(engine_ric.scalar)),
        }
        return BlockComparison(point=list(p.coords), residuals=residuals)

    def electric_weyl(self, spec: WarpedProductSpec, p: Point) -> TensorValue:
        """``-(eps / (n - 2)) FRic0`` with FRic0 traceless for the fiber metric.

        Raises:
            DimensionError: For n < 4
        """
        _require_weyl_dimension(spec)
        fiber = self.fiber_packet(spec, p)
        m = spec.fiber_dim
        traceless = fiber.ric.components - (fiber.r / m) * fiber.g
        components = -(spec.epsilon / (spec.dim - 2)) * traceless
        return TensorValue(m, (DOWN, DOWN), components, ("symmetric",))

    @staticmethod
    def engine_electric_weyl(packet: CurvaturePacket) -> np.ndarray:
        """``E_ij = g(W(d_i, U)U, d_j)`` read from the engine's Weyl tensor."""
        if packet.weyl04 is None:
            raise DimensionError("electric Weyl part needs dimension >= 4")
        return np.transpose(packet.weyl04.components[1:, 0, 1:, 0])

    def mixed_weyl_check(self, spec: WarpedProductSpec, p: Point) -> float:
        """``max |g(W(x, y)z, U)|`` over fiber coordinate vectors."""
        _require_weyl_dimension(spec)
        packet = self.engine.packet(self.assemble_metric(spec), p)
        return _mixed_weyl(packet)

    def fiber_weyl_relation(self, spec: WarpedProductSpec, p: Point) -> float:
        """Largest mismatch of the fiber block of W against fiber data.

        The fiber block equals ``f^2 FW + KN(g, FRic0) / ((n - 2)(n - 3))``
        with ``g = f^2 g_F``; ``FW`` is dropped for a three-dimensional fiber.
        """
        _require_weyl_dimension(spec)
        packet = self.engine.packet(self.assemble_metric(spec), p)
        return self._fiber_weyl_relation(spec, p, packet)

    def _fiber_weyl_relation(
        self, spec: WarpedProductSpec, p: Point, packet: CurvaturePacket
    ) -> float:
        assert packet.weyl04 is not None
        n = spec.dim
        w = self.warping(spec, p)
        fiber = self.fiber_packet(spec, p)
        g = w.f**2 * fiber.g
        traceless = fiber.ric.components - (fiber.r / spec.fiber_dim) * fiber.g
        kn = (
            np.einsum("ac,bd->abcd", g, traceless)
            + np.einsum("bd,ac->abcd", g, traceless)
            - np.einsum("ad,bc->abcd", g, traceless)
            - np.einsum("bc,ad->abcd", g, traceless)
        )
        rhs = kn / ((n - 2) * (n - 3))
        if fiber.weyl04 is not None:
            rhs = rhs + w.f**2 * fiber.weyl04.components
        lhs = packet.weyl04.components[1:, 1:, 1:, 1:]
        return float(np.max(np.abs(lhs - rhs)))

    def theorem_1_1_verify(
        self, spec: WarpedProductSpec, points: Sequence[Point]
    ) -> WarpedProductVerification:
        """Einstein fiber, zero electric Weyl and harmonic Weyl, with conclusions.

        The three conditions must agree point by point; when they hold the
        metric must be weakly conformally flat along U, quasi-Einstein with
        generator along U, and Bach flat.
        """
        _require_weyl_dimension(spec)
        metric = self.assemble_metric(spec)
        tol = self.ladder.theorem
        rows = []
        with tracer.start_as_current_span("warped.verify") as span:
            span.set_attribute("curvlab.spec", spec.label)
            for p in points:
                rows.append(self._verify_point(spec, metric, p, tol))
        coords = [r.point for r in rows]
        n = spec.dim

        def agg(
            name: str, values: list[float], threshold: float = tol
        ) -> PredicateResult:
            return PredicateResult.aggregate(name, values, coords, threshold)

        derived = self.ladder.derived
        qe_residuals = [
            r.u_alignment_residual
            if r.quasi_einstein.verdict
            else max(1.0, r.u_alignment_residual)
            for r in rows
        ]

        predicates = [
            agg("fiber_einstein", [r.fiber_einstein_residual for r in rows]),
            agg("electric_weyl_zero", [r.electric_weyl_norm for r in rows]),
            agg("harmonic_weyl", [r.div_weyl_norm for r in rows]),
            agg(
                "electric_weyl_closed_form",
                [r.electric_closed_form_mismatch for r in rows],
                derived,
            ),
            agg("mixed_weyl_zero", [r.mixed_weyl_residual for r in rows], derived),
            agg(
                "fiber_weyl_relation", [r.fiber_weyl_relation_residual for r in rows]
            ),
            agg("weakly_cf_along_u", [r.weakly_cf_along_u for r in rows]),
            agg("quasi_einstein_along_u", qe_residuals),
            agg("bach_flat", [r.bach_norm for r in rows]),
            agg("conformally_flat", [r.weyl_norm for r in rows], derived),
        ]
        by_name = {pr.name: pr.verdict for pr in predicates}
        conditions_agree = all(r.conditions_agree for r in rows)
        all_conditions = all(all(r.conditions) for r in rows)
        conclusions = (
            by_name["weakly_cf_along_u"]
            and by_name["quasi_einstein_along_u"]
            and by_name["bach_flat"]
        )
        logger.info(
            "warped product %s (n=%d): conditions %s, agree=%s, conclusions=%s",
            spec.label,
            n,
            "hold" if all_conditions else "fail",
            conditions_agree,
            conclusions,
        )
        return WarpedProductVerification(
            label=spec.label,
            epsilon=spec.epsilon,
            dimension=n,
            points=rows,
            predicates=predicates,
            conditions_agree=conditions_agree,
            all_conditions=all_conditions,
            conclusions_hold=conclusions,
        )

    def _verify_point(
        self, spec: WarpedProductSpec, metric: MetricField, p: Point, tol: float
    ) -> WarpedPointResult:
        packet = self.engine.packet(metric, p, PacketDepth.BACH)
        assert packet.weyl13 is not None and packet.weyl04 is not None
        assert packet.div_weyl is not None and packet.bach is not None
        fiber = self.fiber_packet(spec, p)
        scale = 1.0 + packet.riem04.norm()

        fiber_ric = fiber.ric.components
        fiber_traceless = fiber_ric - (fiber.r / spec.fiber_dim) * fiber.g
        fiber_einstein = _norm(fiber_traceless) / (1.0 + _norm(fiber_ric))
        electric = self.engine_electric_weyl(packet)
        electric_closed = self.electric_weyl(spec, p).components
        qe = fit_quasi_einstein(packet.g, packet.ric.components, tol)
        if qe.u_vector is None:
            alignment = 0.0
        else:
            u = np.asarray(qe.u_vector)
            alignment = _norm(u[1:]) / _norm(u)

        conditions = [
            fiber_einstein < tol,
            _norm(electric) / scale < tol,
            packet.div_weyl.norm() / scale < tol,
        ]
        return WarpedPointResult(
            point=list(p.coords),
            fiber_einstein_residual=fiber_einstein,
            electric_weyl_norm=_norm(electric) / scale,
            electric_closed_form_mismatch=_norm(electric - electric_closed) / scale,
            div_weyl_norm=packet.div_weyl.norm() / scale,
            mixed_weyl_residual=_mixed_weyl(packet),
            fiber_weyl_relation_residual=self._fiber_weyl_relation(spec, p, packet),
            weyl_norm=packet.weyl04.norm() / scale,
            weakly_cf_along_u=weakly_cf_residual(
                packet.weyl13.components, np.eye(spec.dim)[0]
            )
            / scale,
            quasi_einstein=qe,
            u_alignment_residual=alignment,
            bach_norm=packet.bach.norm() / (1.0 + packet.riem04.norm() ** 2),
            conditions=conditions,
            conditions_agree=all(conditions) or not any(conditions),
        )


def _mixed_weyl(packet: CurvaturePacket) -> float:
    assert packet.weyl04 is not None
    return float(np.max(np.abs(packet.weyl04.components[0, 1:, 1:, 1:])))


def _require_weyl_dimension(spec: WarpedProductSpec) -> None:
    if spec.dim < 4:
        raise DimensionError(
            f"Weyl statements need total dimension >= 4, got {spec.dim}"
        )
