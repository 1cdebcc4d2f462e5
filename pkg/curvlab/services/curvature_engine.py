"""Pointwise curvature of a metric field.

Conventions:

* ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``
* ``R(d_c, d_d) d_b = R^a_bcd d_a`` is stored as ``riem13[a, b, c, d]``
* ``riem04[a, b, c, d] = g_ae R^e_bcd``; the unit sphere has
  ``riem04 = g_ac g_bd - g_ad g_bc``
* ``Ric_bd = R^a_bad`` so the unit n-sphere has ``Ric = (n - 1) g``
* covariant derivatives put the new (derivative) index first

Each tensor is carried as a jet so that further covariant derivatives are
exact: a metric jet of order N gives Christoffel symbols of order N - 1,
curvature of order N - 2, nabla W of order N - 3.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Callable

import numpy as np

from curvlab.core.jets import JetArray, jet_einsum
from curvlab.core.metric import MetricField, Point, inverse_metric_jets, metric_jets
from curvlab.core.tensors import DOWN, UP, TensorValue, Variance
from curvlab.exceptions import DimensionError, InvalidArgumentError

logger = logging.getLogger(__name__)

_SLOT_LETTERS = "abcdefgh"


class PacketDepth(IntEnum):
    """Metric jet order needed for a packet."""

    RIEMANN = 2
    DIVERGENCE = 3
    BACH = 4


class BachNormalization(str, Enum):
    """Coefficient of the double-divergence term of the Bach tensor."""

    STANDARD = "standard"  # 1 / (n - 1)
    CONFORMAL = "conformal"  # 1 / (n - 3)

    def coefficient(self, n: int) -> float:
        return 1.0 / (n - 1) if self is BachNormalization.STANDARD else 1.0 / (n - 3)


def jet_permute(subscripts: str, t: JetArray) -> JetArray:
    """Index permutation or trace of a single jet array."""
    inputs, output = subscripts.replace(" ", "").split("->")
    return JetArray(np.einsum(f"{inputs}K->{output}K", t.data), t.algebra)


def kulkarni_nomizu_jets(h: JetArray, k: JetArray) -> JetArray:
    """``h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad`` on jets."""
    return (
        jet_einsum("ac,bd->abcd", h, k)
        + jet_einsum("bd,ac->abcd", h, k)
        - jet_einsum("ad,bc->abcd", h, k)
        - jet_einsum("bc,ad->abcd", h, k)
    )


def nabla(t: JetArray, variance: tuple[Variance, ...], gamma: JetArray) -> JetArray:
    """Covariant derivative of a jet tensor field.

    Args:
        t: Jet components, one axis per slot
        variance: Variance of each slot
        gamma: Christoffel jets ``gamma[a, i, j] = Gamma^a_ij``

    Returns:
        JetArray: ``nabla_y T`` with ``y`` as the leading axis, one order lower
    """
    rank = len(variance)
    if rank != len(t.shape):
        raise InvalidArgumentError("variance does not match tensor rank")
    result = t.gradient()
    order = result.order
    g = gamma.truncate(order)
    tt = t.truncate(order)
    slots = _SLOT_LETTERS[:rank]
    for s, kind in enumerate(variance):
        replaced = slots[:s] + "z" + slots[s + 1 :]
        if kind is UP:
            result = result + jet_einsum(f"{slots[s]}yz,{replaced}->y{slots}", g, tt)
        else:
            result = result - jet_einsum(f"zy{slots[s]},{replaced}->y{slots}", g, tt)
    return result


@dataclass
class CurvatureJets:
    """Jet-valued curvature of one metric at one point.

    Orders: ``g`` and ``g_inv`` N, ``gamma`` N - 1, curvature N - 2.
    Curvature fields are ``None`` when N < 2; ``weyl04`` is ``None`` when n < 4.
    """

    metric: MetricField
    point: Point
    order: int
    g: JetArray
    g_inv: JetArray
    gamma: JetArray | None
    riem13: JetArray | None = None
    riem04: JetArray | None = None
    ric: JetArray | None = None
    scalar: JetArray | None = None
    weyl04: JetArray | None = None

    @property
    def dim(self) -> int:
        return self.metric.dim


@dataclass(frozen=True)
class JetField:
    """A tensor field whose jets come out of a curvature computation."""

    name: str
    depth: int
    variance: tuple[Variance, ...]
    extract: Callable[[CurvatureJets], JetArray]


METRIC_FIELD = JetField("g", 0, (DOWN, DOWN), lambda c: c.g)
RICCI_FIELD = JetField("Ric", 2, (DOWN, DOWN), lambda c: _require(c.ric))
SCALAR_FIELD = JetField("r", 2, (), lambda c: _require(c.scalar))
RIEMANN_FIELD = JetField("Riem", 2, (DOWN,) * 4, lambda c: _require(c.riem04))
WEYL_FIELD = JetField("W", 2, (DOWN,) * 4, lambda c: _require(c.weyl04))


def _require(t: JetArray | None) -> JetArray:
    if t is None:
        raise InvalidArgumentError("curvature jets were not computed at this order")
    return t


@dataclass(frozen=True)
class CurvaturePacket:
    """Curvature objects of one metric at one point."""

    metric_label: str
    point: Point
    depth: PacketDepth
    g: np.ndarray
    g_inv: np.ndarray
    christoffel: JetArray
    riem13: TensorValue
    riem04: TensorValue
    ric: TensorValue
    r: float
    q: TensorValue
    weyl13: TensorValue | None
    weyl04: TensorValue | None
    div_weyl: TensorValue | None = None
    bach: TensorValue | None = None

    @property
    def dim(self) -> int:
        return self.g.shape[0]


class CurvatureEngine:
    """Service computing Christoffel, Riemann, Ricci, Weyl, div W and Bach."""

    def __init__(
        self,
        bach_normalization: BachNormalization = BachNormalization.STANDARD,
        degeneracy_epsilon: float | None = None,
    ):
        """Initialize the engine.

        Args:
            bach_normalization: Coefficient choice for the Bach tensor
            degeneracy_epsilon: Override of the configured |det g| floor
        """
        self.bach_normalization = bach_normalization
        self.degeneracy_epsilon = degeneracy_epsilon

    def curvature_jets(self, m: MetricField, p: Point, order: int) -> CurvatureJets:
        """Jet-valued curvature from metric jets of the given order."""
        g = metric_jets(m, p, order, self.degeneracy_epsilon)
        g_inv = inverse_metric_jets(g)
        if order == 0:
            return CurvatureJets(m, p, order, g, g_inv, None)
        gamma = _christoffel_from(g, g_inv)
        cj = CurvatureJets(m, p, order, g, g_inv, gamma)
        if order >= 2:
            self._fill_curvature(cj)
        return cj

    def _fill_curvature(self, cj: CurvatureJets) -> None:
        n = cj.dim
        gamma = _require(cj.gamma)
        d_gamma = gamma.gradient()
        low = d_gamma.order
        gt = gamma.truncate(low)
        riem13 = (
            jet_permute("cadb->abcd", d_gamma)
            - jet_permute("dacb->abcd", d_gamma)
            + jet_einsum("ace,edb->abcd", gt, gt)
            - jet_einsum("ade,ecb->abcd", gt, gt)
        )
        g = cj.g.truncate(low)
        g_inv = cj.g_inv.truncate(low)
        riem04 = jet_einsum("ae,ebcd->abcd", g, riem13)
        ric = jet_permute("abad->bd", riem13)
        scalar = jet_einsum("bd,bd->", g_inv, ric)
        cj.riem13, cj.riem04, cj.ric, cj.scalar = riem13, riem04, ric, scalar
        if n >= 4:
            cj.weyl04 = (
                riem04
                - kulkarni_nomizu_jets(g, ric) * (1.0 / (n - 2))
                + scalar
                * kulkarni_nomizu_jets(g, g)
                * (1.0 / (2.0 * (n - 1) * (n - 2)))
            )

    def christoffel(self, m: MetricField, p: Point, jet_extra: int = 0) -> JetArray:
        """Christoffel symbols ``gamma[k, i, j] = Gamma^k_ij``.

        Args:
            m: Metric field
            p: Point
            jet_extra: Derivative orders of Gamma carried along (0..3)

        Returns:
            JetArray: Jets of order ``jet_extra``, symmetric in (i, j)
        """
        if not 0 <= jet_extra <= 3:
            raise InvalidArgumentError(f"jet_extra must lie in 0..3, got {jet_extra}")
        return _require(self.curvature_jets(m, p, jet_extra + 1).gamma)

    def riemann(self, m: MetricField, p: Point) -> tuple[TensorValue, TensorValue]:
        """(1,3) and (0,4) Riemann tensors."""
        cj = self.curvature_jets(m, p, PacketDepth.RIEMANN)
        return (
            TensorValue(m.dim, (UP, DOWN, DOWN, DOWN), _require(cj.riem13).value),
            TensorValue(m.dim, (DOWN,) * 4, _require(cj.riem04).value, ("riemann",)),
        )

    def ricci_scalar(
        self, m: MetricField, p: Point
    ) -> tuple[TensorValue, float, TensorValue]:
        """Ricci tensor, scalar curvature and Ricci operator ``Q = g^-1 Ric``."""
        cj = self.curvature_jets(m, p, PacketDepth.RIEMANN)
        ric = _require(cj.ric).value
        q = cj.g_inv.value @ ric
        return (
            TensorValue(m.dim, (DOWN, DOWN), ric, ("symmetric",)),
            float(_require(cj.scalar).value),
            TensorValue(m.dim, (UP, DOWN), q),
        )

    def weyl(self, m: MetricField, p: Point) -> tuple[TensorValue, TensorValue]:
        """(1,3) and (0,4) Weyl tensors.

        Raises:
            DimensionError: For n <= 3
        """
        _require_weyl_dimension(m.dim)
        cj = self.curvature_jets(m, p, PacketDepth.RIEMANN)
        w04 = _require(cj.weyl04).value
        w13 = np.einsum("ae,ebcd->abcd", cj.g_inv.value, w04)
        return (
            TensorValue(m.dim, (UP, DOWN, DOWN, DOWN), w13),
            TensorValue(m.dim, (DOWN,) * 4, w04, ("riemann",)),
        )

    def covariant_derivative(
        self, field: JetField, m: MetricField, p: Point
    ) -> TensorValue:
        """``nabla`` of a jet-native field, derivative index first."""
        if field is WEYL_FIELD:
            _require_weyl_dimension(m.dim)
        cj = self.curvature_jets(m, p, field.depth + 1)
        value = nabla(field.extract(cj), field.variance, _require(cj.gamma))
        return TensorValue(m.dim, (DOWN,) + field.variance, value.value)

    def div_weyl(self, m: MetricField, p: Point) -> TensorValue:
        """``(div W)_abd = nabla^c W_cabd``."""
        _require_weyl_dimension(m.dim)
        cj = self.curvature_jets(m, p, PacketDepth.DIVERGENCE)
        return TensorValue(m.dim, (DOWN,) * 3, _div_weyl(cj).value)

    def bach(self, m: MetricField, p: Point) -> TensorValue:
        """Bach tensor ``alpha nabla^c nabla^d W_acbd + R^cd W_acbd / (n - 2)``."""
        _require_weyl_dimension(m.dim)
        cj = self.curvature_jets(m, p, PacketDepth.BACH)
        return TensorValue(m.dim, (DOWN, DOWN), self._bach(cj), ("symmetric",))

    def structural_residuals(self, m: MetricField, p: Point) -> dict[str, float]:
        """Identities every metric satisfies, relative to ``1 + |Riem|``.

        Covers the algebraic Riemann symmetries, metric compatibility, the
        second and contracted Bianchi identities and, for n >= 4, the Weyl
        traces.
        """
        cj = self.curvature_jets(m, p, PacketDepth.DIVERGENCE)
        gamma = _require(cj.gamma)
        riem04 = _require(cj.riem04)
        scale = 1.0 + float(np.linalg.norm(riem04.value))
        residuals = {
            k: v / scale for k, v in riemann_symmetry_residuals(riem04.value).items()
        }
        residuals["metric_compatibility"] = float(
            np.linalg.norm(nabla(cj.g, (DOWN, DOWN), gamma).value)
        )
        nabla_riem = nabla(riem04, (DOWN,) * 4, gamma).value
        cyclic = (
            nabla_riem
            + np.einsum("cabde->eabcd", nabla_riem)
            + np.einsum("dabec->eabcd", nabla_riem)
        )
        residuals["second_bianchi"] = float(np.linalg.norm(cyclic)) / scale
        g_inv = cj.g_inv.value
        nabla_ric = nabla(_require(cj.ric), (DOWN, DOWN), gamma).value
        div_ric = np.einsum("ea,eab->b", g_inv, nabla_ric)
        d_scalar = _require(cj.scalar).gradient().value
        bianchi = float(np.linalg.norm(div_ric - 0.5 * d_scalar))
        residuals["contracted_bianchi"] = bianchi / scale
        if cj.weyl04 is not None:
            residuals["weyl_traces"] = weyl_trace_norm(cj.weyl04.value, g_inv) / scale
        return residuals

    def packet(
        self, m: MetricField, p: Point, depth: PacketDepth = PacketDepth.RIEMANN
    ) -> CurvaturePacket:
        """All curvature objects at one point from a single jet evaluation.

        Args:
            m: Metric field
            p: Point inside the domain
            depth: RIEMANN, DIVERGENCE (adds div W) or BACH (adds div W and Bach)

        Returns:
            CurvaturePacket: Evaluated tensors
        """
        n = m.dim
        cj = self.curvature_jets(m, p, int(depth))
        g = cj.g.value
        g_inv = cj.g_inv.value
        ric = _require(cj.ric).value
        weyl13 = weyl04 = div_w = bach = None
        if cj.weyl04 is not None:
            w = cj.weyl04.value
            weyl04 = TensorValue(n, (DOWN,) * 4, w, ("riemann",))
            weyl13 = TensorValue(
                n, (UP, DOWN, DOWN, DOWN), np.einsum("ae,ebcd->abcd", g_inv, w)
            )
            if depth >= PacketDepth.DIVERGENCE:
                div_w = TensorValue(n, (DOWN,) * 3, _div_weyl(cj).value)
            if depth >= PacketDepth.BACH:
                bach = TensorValue(n, (DOWN, DOWN), self._bach(cj), ("symmetric",))
        logger.debug(
            "curvature packet for %s at %s (depth %d)", m.label, p.coords, depth
        )
        return CurvaturePacket(
            metric_label=m.label,
            point=p,
            depth=depth,
            g=g,
            g_inv=g_inv,
            christoffel=_require(cj.gamma),
            riem13=TensorValue(n, (UP, DOWN, DOWN, DOWN), _require(cj.riem13).value),
            riem04=TensorValue(n, (DOWN,) * 4, _require(cj.riem04).value, ("riemann",)),
            ric=TensorValue(n, (DOWN, DOWN), ric, ("symmetric",)),
            r=float(_require(cj.scalar).value),
            q=TensorValue(n, (UP, DOWN), g_inv @ ric),
            weyl13=weyl13,
            weyl04=weyl04,
            div_weyl=div_w,
            bach=bach,
        )

    def _bach(self, cj: CurvatureJets) -> np.ndarray:
        n = cj.dim
        w = _require(cj.weyl04)
        nabla_w = nabla(w, (DOWN,) * 4, _require(cj.gamma))
        # d_acb = nabla^d W_acbd
        d = jet_einsum("de,eacbd->acb", cj.g_inv.truncate(nabla_w.order), nabla_w)
        nabla_d = nabla(d, (DOWN,) * 3, _require(cj.gamma))
        g_inv = cj.g_inv.value
        double_divergence = np.einsum("cf,facb->ab", g_inv, nabla_d.value)
        ric_up = g_inv @ _require(cj.ric).value @ g_inv
        ricci_term = np.einsum("cd,acbd->ab", ric_up, w.value)
        alpha = self.bach_normalization.coefficient(n)
        return alpha * double_divergence + ricci_term / (n - 2)


def _christoffel_from(g: JetArray, g_inv: JetArray) -> JetArray:
    dg = g.gradient()  # dg[c, a, b] = d_c g_ab
    lowered = (
        jet_permute("ijl->lij", dg) + jet_permute("jil->lij", dg) - dg
    ) * 0.5  # Gamma_lij
    return jet_einsum("kl,lij->kij", g_inv.truncate(dg.order), lowered)


def _div_weyl(cj: CurvatureJets) -> JetArray:
    nabla_w = nabla(_require(cj.weyl04), (DOWN,) * 4, _require(cj.gamma))
    return jet_einsum("ce,ecabd->abd", cj.g_inv.truncate(nabla_w.order), nabla_w)


def _require_weyl_dimension(n: int) -> None:
    if n < 4:
        raise DimensionError(
            f"the Weyl tensor is only meaningful in dimension >= 4 (got {n}); "
            "it vanishes identically for n = 3"
        )


def weyl_trace_norm(w04: np.ndarray, g_inv: np.ndarray) -> float:
    """Largest norm over the six single traces of a (0,4) tensor."""
    letters = "abcd"
    worst = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            spec = list(letters)
            spec[i], spec[j] = "x", "y"
            rest = "".join(c for k, c in enumerate(letters) if k not in (i, j))
            trace = np.einsum(f"xy,{''.join(spec)}->{rest}", g_inv, w04)
            worst = max(worst, float(np.linalg.norm(trace)))
    return worst


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(a)))


def riemann_symmetry_residuals(riem04: np.ndarray) -> dict[str, float]:
    """Norms of the algebraic Riemann identities."""
    return {
        "antisymmetry_first_pair": _norm(riem04 + riem04.transpose(1, 0, 2, 3)),
        "antisymmetry_second_pair": _norm(riem04 + riem04.transpose(0, 1, 3, 2)),
        "pair_symmetry": _norm(riem04 - riem04.transpose(2, 3, 0, 1)),
        "first_bianchi": _norm(
            riem04 + np.einsum("acdb->abcd", riem04) + np.einsum("adbc->abcd", riem04)
        ),
    }
