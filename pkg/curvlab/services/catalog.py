"""Built-in fixture metrics, warped products and contact structures."""

from __future__ import annotations

import difflib
import logging
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from curvlab.config import settings
from curvlab.core.expression import ScalarExpr
from curvlab.core.metric import DomainBox, Interval, MetricField, Point
from curvlab.core.parser import parse_expr
from curvlab.exceptions import CatalogLookupError, InvalidArgumentError
from curvlab.models.catalog import (
    CatalogEntry,
    EntryKind,
    Expectation,
    Procedure,
    Provenance,
)
from curvlab.models.contact import ContactStructure
from curvlab.models.warped import WarpedProductSpec

logger = logging.getLogger(__name__)

PAPER, DERIVED, TRIVIAL = Provenance.PAPER, Provenance.DERIVED, Provenance.TRIVIAL
CLASSIFY, WARPED, CONTACT = Procedure.CLASSIFY, Procedure.WARPED, Procedure.CONTACT

# polar angles stay away from the chart singularities at 0 and pi
POLAR = (0.4, math.pi - 0.4)
AZIMUTH = (0.0, 2.0 * math.pi)
UNIT = (-1.0, 1.0)


def _metric(
    label: str,
    coords: Sequence[str],
    entries: dict[tuple[int, int], str],
    bounds: Sequence[tuple[float, float]],
    signature: Sequence[int] | None = None,
) -> MetricField:
    return MetricField.from_lower_triangle(
        label=label,
        coord_names=tuple(coords),
        entries={key: parse_expr(text, coords) for key, text in entries.items()},
        signature=tuple(signature) if signature else (1,) * len(coords),
        domain=DomainBox.of(*bounds),
    )


def _diagonal(
    label: str,
    coords: Sequence[str],
    diagonal: Sequence[str],
    bounds: Sequence[tuple[float, float]],
    signature: Sequence[int] | None = None,
) -> MetricField:
    entries = {(i, i): e for i, e in enumerate(diagonal)}
    return _metric(label, coords, entries, bounds, signature)


def _contact(
    label: str,
    metric: MetricField,
    eta: Sequence[str],
    xi: Sequence[str],
    phi: dict[tuple[str, str], str],
) -> ContactStructure:
    names = metric.coord_names
    index = {name: k for k, name in enumerate(names)}

    def parse(text: str) -> ScalarExpr:
        return parse_expr(text, names)

    return ContactStructure.build(
        label,
        metric,
        [parse(e) for e in eta],
        [parse(e) for e in xi],
        {(index[a], index[b]): parse(e) for (a, b), e in phi.items()},
    )


def _expect(
    procedure: Procedure,
    predicate: str,
    verdict: bool,
    provenance: Provenance,
    note: str = "",
    **constants: float,
) -> Expectation:
    return Expectation(procedure, predicate, verdict, provenance, dict(constants), note)


def _flat_expectations(provenance: Provenance = TRIVIAL) -> tuple[Expectation, ...]:
    return (
        _expect(CLASSIFY, "einstein", True, provenance, einstein_constant=0.0),
        _expect(
            CLASSIFY, "constant_curvature", True, provenance, sectional_constant=0.0
        ),
        _expect(CLASSIFY, "conformally_flat", True, provenance),
        _expect(CLASSIFY, "harmonic_weyl", True, provenance),
        _expect(CLASSIFY, "bach_flat", True, provenance),
        _expect(
            CLASSIFY,
            "weakly_conformally_flat",
            True,
            provenance,
            "kernel is the whole tangent space",
        ),
    )


def _sphere_3() -> MetricField:
    return _diagonal(
        "sphere_3",
        ("a", "b", "c"),
        ("1", "sin(a)^2", "sin(a)^2*sin(b)^2"),
        (POLAR, POLAR, AZIMUTH),
    )


def _flat_3() -> MetricField:
    return _diagonal("flat_3", ("x", "y", "z"), ("1", "1", "1"), (UNIT, UNIT, UNIT))


def _s2xs2() -> MetricField:
    return _diagonal(
        "s2xs2",
        ("a", "b", "c", "d"),
        ("1", "sin(a)^2", "1", "sin(c)^2"),
        (POLAR, AZIMUTH, POLAR, AZIMUTH),
    )


def _s2xr() -> MetricField:
    return _diagonal(
        "s2xr", ("a", "b", "z"), ("1", "sin(a)^2", "1"), (POLAR, AZIMUTH, UNIT)
    )


def _plain_entries() -> list[CatalogEntry]:
    sphere_4 = _diagonal(
        "sphere_4",
        ("a", "b", "c", "d"),
        ("1", "sin(a)^2", "sin(a)^2*sin(b)^2", "sin(a)^2*sin(b)^2*sin(c)^2"),
        (POLAR, POLAR, POLAR, AZIMUTH),
    )
    pp_wave = _metric(
        "pp_wave_4",
        ("u", "v", "x", "y"),
        {(0, 0): "x^2 - 3*y^2 + u*x*y", (1, 0): "1", (2, 2): "1", (3, 3): "1"},
        (UNIT, UNIT, UNIT, UNIT),
        signature=(-1, 1, 1, 1),
    )
    return [
        CatalogEntry(
            "euclidean_4",
            EntryKind.PLAIN,
            _diagonal("euclidean_4", ("x", "y", "z", "w"), ("1",) * 4, (UNIT,) * 4),
            _flat_expectations(),
            "Flat Euclidean 4-space in Cartesian coordinates.",
        ),
        CatalogEntry(
            "minkowski_4",
            EntryKind.PLAIN,
            _diagonal(
                "minkowski_4",
                ("t", "x", "y", "z"),
                ("-1", "1", "1", "1"),
                (UNIT,) * 4,
                (-1, 1, 1, 1),
            ),
            _flat_expectations(),
            "Flat Lorentzian 4-space.",
        ),
        CatalogEntry(
            "sphere_4",
            EntryKind.PLAIN,
            sphere_4,
            (
                _expect(CLASSIFY, "einstein", True, DERIVED, einstein_constant=3.0),
                _expect(CLASSIFY, "quasi_einstein", True, TRIVIAL, "Einstein, b = 0"),
                _expect(
                    CLASSIFY,
                    "constant_curvature",
                    True,
                    DERIVED,
                    sectional_constant=1.0,
                ),
                _expect(CLASSIFY, "conformally_flat", True, DERIVED),
                _expect(CLASSIFY, "harmonic_weyl", True, TRIVIAL),
                _expect(CLASSIFY, "bach_flat", True, TRIVIAL),
            ),
            "Unit 4-sphere in polar coordinates.",
        ),
        CatalogEntry(
            "sphere_3",
            EntryKind.PLAIN,
            _sphere_3(),
            (
                _expect(CLASSIFY, "einstein", True, DERIVED, einstein_constant=2.0),
                _expect(
                    CLASSIFY,
                    "constant_curvature",
                    True,
                    DERIVED,
                    sectional_constant=1.0,
                ),
            ),
            "Unit 3-sphere; fiber of frw_s3.",
        ),
        CatalogEntry(
            "flat_3",
            EntryKind.PLAIN,
            _flat_3(),
            (
                _expect(CLASSIFY, "einstein", True, TRIVIAL, einstein_constant=0.0),
                _expect(
                    CLASSIFY,
                    "constant_curvature",
                    True,
                    TRIVIAL,
                    sectional_constant=0.0,
                ),
            ),
            "Euclidean 3-space; fiber of hyperbolic_4 and frw_flat.",
        ),
        CatalogEntry(
            "s2xs2",
            EntryKind.PLAIN,
            _s2xs2(),
            (
                _expect(CLASSIFY, "einstein", True, DERIVED, einstein_constant=1.0),
                _expect(CLASSIFY, "constant_curvature", False, DERIVED),
                _expect(CLASSIFY, "conformally_flat", False, DERIVED),
            ),
            "Product of two unit 2-spheres: Einstein, not conformally flat.",
        ),
        CatalogEntry(
            "s2xr",
            EntryKind.PLAIN,
            _s2xr(),
            (
                _expect(
                    CLASSIFY, "einstein", False, DERIVED, "Ricci eigenvalues (1, 1, 0)"
                ),
                _expect(
                    CLASSIFY,
                    "quasi_einstein",
                    True,
                    DERIVED,
                    "Ric = g - dz (x) dz",
                    quasi_einstein_a=1.0,
                    quasi_einstein_b=-1.0,
                    quasi_einstein_epsilon_u=1.0,
                ),
                _expect(CLASSIFY, "constant_curvature", False, DERIVED),
            ),
            "Unit 2-sphere times a line; non-Einstein fiber control.",
        ),
        CatalogEntry(
            "pp_wave_4",
            EntryKind.PLAIN,
            pp_wave,
            (
                _expect(CLASSIFY, "einstein", False, DERIVED),
                _expect(
                    CLASSIFY,
                    "quasi_einstein",
                    True,
                    PAPER,
                    "null dust: Ric = 2 du (x) du",
                    quasi_einstein_a=0.0,
                    quasi_einstein_b=1.0,
                    quasi_einstein_epsilon_u=0.0,
                ),
                _expect(CLASSIFY, "conformally_flat", False, DERIVED),
                _expect(
                    CLASSIFY,
                    "weakly_conformally_flat",
                    True,
                    DERIVED,
                    "kernel spanned by the null d_v",
                ),
            ),
            "Plane-fronted wave 2 du dv + H du^2 + dx^2 + dy^2 "
            "with H = x^2 - 3y^2 + uxy. "
            "H is not harmonic in (x, y): its Laplacian -4 sources "
            "the null dust Ric = 2 du (x) du; "
            "a harmonic H would give a vacuum wave with Ric = 0.",
        ),
    ]


def _warped_expectations(
    einstein_fiber: bool, provenance: Provenance = PAPER
) -> list[Expectation]:
    names = ("fiber_einstein", "electric_weyl_zero", "harmonic_weyl")
    result = [_expect(WARPED, name, einstein_fiber, provenance) for name in names]
    if einstein_fiber:
        result += [
            _expect(WARPED, "weakly_cf_along_u", True, provenance),
            _expect(WARPED, "quasi_einstein_along_u", True, provenance),
            _expect(WARPED, "bach_flat", True, provenance),
        ]
    return result


def _warped_entries() -> list[CatalogEntry]:
    t = ("t",)

    def spec(
        label: str,
        epsilon: int,
        f: str,
        bounds: tuple[float, float],
        fiber: MetricField,
    ) -> WarpedProductSpec:
        return WarpedProductSpec(
            label, epsilon, parse_expr(f, t), Interval(*bounds), fiber
        )

    timelike_qe = _expect(
        CLASSIFY, "quasi_einstein", True, PAPER, quasi_einstein_epsilon_u=-1.0
    )

    return [
        CatalogEntry(
            "hyperbolic_4",
            EntryKind.WARPED,
            spec("hyperbolic_4", 1, "exp(t)", (-0.5, 0.5), _flat_3()),
            (
                _expect(CLASSIFY, "einstein", True, DERIVED, einstein_constant=-3.0),
                _expect(
                    CLASSIFY,
                    "constant_curvature",
                    True,
                    DERIVED,
                    sectional_constant=-1.0,
                ),
                _expect(CLASSIFY, "conformally_flat", True, DERIVED),
                *_warped_expectations(True, DERIVED),
            ),
            "Hyperbolic 4-space as dt^2 + e^(2t) (flat 3-space).",
        ),
        CatalogEntry(
            "frw_s3",
            EntryKind.WARPED,
            spec("frw_s3", -1, "1 + t^2", (1.0, 2.0), _sphere_3()),
            (
                _expect(CLASSIFY, "conformally_flat", True, PAPER),
                timelike_qe,
                _expect(CLASSIFY, "einstein", False, DERIVED),
                *_warped_expectations(True),
            ),
            "Closed FRW spacetime -dt^2 + (1 + t^2)^2 g_S3.",
        ),
        CatalogEntry(
            "frw_flat",
            EntryKind.WARPED,
            spec("frw_flat", -1, "t^(2/3)", (0.5, 2.0), _flat_3()),
            (
                _expect(CLASSIFY, "conformally_flat", True, PAPER),
                timelike_qe,
                _expect(CLASSIFY, "einstein", False, DERIVED),
                *_warped_expectations(True),
            ),
            "Spatially flat dust FRW spacetime -dt^2 + t^(4/3) g_E3.",
        ),
        CatalogEntry(
            "warped_s2xs2",
            EntryKind.WARPED,
            spec("warped_s2xs2", -1, "exp(t)", (-0.5, 0.5), _s2xs2()),
            (
                _expect(CLASSIFY, "conformally_flat", False, PAPER, "W != 0"),
                timelike_qe,
                _expect(CLASSIFY, "harmonic_weyl", True, PAPER),
                _expect(CLASSIFY, "bach_flat", True, PAPER),
                _expect(WARPED, "conformally_flat", False, PAPER),
                *_warped_expectations(True),
            ),
            "Einstein, non-constant-curvature fiber: "
            "weakly but not fully conformally flat.",
        ),
        CatalogEntry(
            "warped_s2xr",
            EntryKind.WARPED,
            spec("warped_s2xr", -1, "exp(t)", (-0.5, 0.5), _s2xr()),
            (
                _expect(CLASSIFY, "einstein", False, DERIVED),
                *_warped_expectations(False, DERIVED),
            ),
            "Non-Einstein fiber control: all three fiber conditions fail.",
        ),
    ]


def _blair(m: int) -> ContactStructure:
    """Standard Sasakian structure on R^(2m+1), eta = (dz - sum y_i dx_i) / 2."""
    xs = [f"x{i}" for i in range(1, m + 1)] if m > 1 else ["x"]
    ys = [f"y{i}" for i in range(1, m + 1)] if m > 1 else ["y"]
    coords = (*xs, *ys, "z")
    z = 2 * m
    entries: dict[tuple[int, int], str] = {(z, z): "1/4"}
    for i, (x, y) in enumerate(zip(xs, ys)):
        entries[(i, i)] = f"1/4 + {y}^2/4"
        entries[(m + i, m + i)] = "1/4"
        entries[(z, i)] = f"-{y}/4"
        for j in range(i):
            entries[(i, j)] = f"{y}*{ys[j]}/4"
    label = f"sasakian_r{2 * m + 1}"
    metric = _metric(label, coords, entries, [(-1.0, 1.0)] * (2 * m + 1))
    eta = [f"-{y}/2" for y in ys]
    phi: dict[tuple[str, str], str] = {}
    for x, y in zip(xs, ys):
        phi[(y, x)] = "-1"
        phi[(x, y)] = "1"
        phi[("z", y)] = y
    xi = ["0"] * (2 * m) + ["2"]
    return _contact(label, metric, [*eta, *(["0"] * m), "1/2"], xi, phi)


def _contact_entries() -> list[CatalogEntry]:
    nil3 = _contact(
        "nil3",
        _metric(
            "nil3",
            ("x", "y", "z"),
            {
                (0, 0): "1/2 + y^2/4",
                (1, 1): "1/2 + x^2/4",
                (2, 2): "1",
                (1, 0): "-x*y/4",
                (2, 0): "-y/2",
                (2, 1): "x/2",
            },
            (UNIT, UNIT, UNIT),
        ),
        ["-y/2", "x/2", "1"],
        ["0", "0", "1"],
        {("y", "x"): "-1", ("z", "x"): "x/2", ("x", "y"): "1", ("z", "y"): "y/2"},
    )
    sasakian_s3 = _contact(
        "sasakian_s3",
        _metric(
            "sasakian_s3",
            ("theta", "phi", "psi"),
            {(0, 0): "1/4", (1, 1): "1/4", (2, 2): "1/4", (2, 1): "-cos(theta)/4"},
            (POLAR, AZIMUTH, AZIMUTH),
        ),
        ["0", "-cos(theta)/2", "1/2"],
        ["0", "0", "2"],
        {
            ("phi", "theta"): "-1/sin(theta)",
            ("psi", "theta"): "-cos(theta)/sin(theta)",
            ("theta", "phi"): "sin(theta)",
        },
    )
    flat_contact = _contact(
        "flat_contact_r3",
        _diagonal(
            "flat_contact_r3",
            ("x", "y", "z"),
            ("1/4", "1/4", "1/4"),
            (UNIT, UNIT, UNIT),
        ),
        ["cos(z)/2", "sin(z)/2", "0"],
        ["2*cos(z)", "2*sin(z)", "0"],
        {
            ("z", "x"): "-sin(z)",
            ("z", "y"): "cos(z)",
            ("x", "z"): "sin(z)",
            ("y", "z"): "-cos(z)",
        },
    )
    r2xs2 = _contact(
        "sasakian_r2xs2",
        _metric(
            "sasakian_r2xs2",
            ("x", "y", "theta", "phi", "z"),
            {
                (0, 0): "1/4 + y^2/4",
                (1, 1): "1/4",
                (2, 2): "1/4",
                (3, 3): "sin(theta)^2/4 + cos(theta)^2/4",
                (4, 4): "1/4",
                (3, 0): "y*cos(theta)/4",
                (4, 0): "-y/4",
                (4, 3): "-cos(theta)/4",
            },
            (UNIT, UNIT, POLAR, AZIMUTH, UNIT),
        ),
        ["-y/2", "0", "0", "-cos(theta)/2", "1/2"],
        ["0", "0", "0", "0", "2"],
        {
            ("y", "x"): "-1",
            ("x", "y"): "1",
            ("z", "y"): "y",
            ("phi", "theta"): "-1/sin(theta)",
            ("theta", "phi"): "sin(theta)",
            ("z", "theta"): "-cos(theta)/sin(theta)",
        },
    )
    e2_group = _contact(
        "contact_e2_group",
        _metric(
            "contact_e2_group",
            ("x", "y", "z"),
            {
                (0, 0): "cos(z)^2 + sin(z)^2/4",
                (1, 1): "4*sin(z)^2 + cos(z)^2",
                (1, 0): "3/2*sin(z)*cos(z)",
                (2, 2): "1",
            },
            (UNIT, UNIT, UNIT),
        ),
        ["cos(z)", "2*sin(z)", "0"],
        ["cos(z)", "sin(z)/2", "0"],
        {
            ("z", "x"): "-sin(z)/2",
            ("z", "y"): "cos(z)",
            ("x", "z"): "2*sin(z)",
            ("y", "z"): "-cos(z)",
        },
    )

    def sasakian(
        a: float, b: float, provenance: Provenance = DERIVED
    ) -> tuple[Expectation, ...]:
        return (
            _expect(CONTACT, "structure", True, provenance),
            _expect(CONTACT, "k_contact", True, provenance),
            _expect(CONTACT, "sasakian", True, provenance),
            _expect(
                CONTACT,
                "eta_einstein",
                True,
                provenance,
                eta_einstein_a=a,
                eta_einstein_b=b,
            ),
            _expect(
                CONTACT, "k_mu", True, PAPER, "Sasakian: k = 1, mu undetermined", k=1.0
            ),
        )

    return [
        CatalogEntry(
            "sasakian_r3",
            EntryKind.CONTACT,
            _blair(1),
            sasakian(-2.0, 4.0),
            "Standard Sasakian structure on R^3 (phi-sectional curvature -3).",
        ),
        CatalogEntry(
            "sasakian_r5",
            EntryKind.CONTACT,
            _blair(2),
            sasakian(-2.0, 6.0),
            "Standard Sasakian structure on R^5; a + b = 2m = 4.",
        ),
        CatalogEntry(
            "nil3",
            EntryKind.CONTACT,
            nil3,
            sasakian(-2.0, 4.0),
            "Left-invariant Sasakian structure on the Heisenberg group.",
        ),
        CatalogEntry(
            "sasakian_s3",
            EntryKind.CONTACT,
            sasakian_s3,
            (
                *sasakian(2.0, 0.0),
                _expect(CLASSIFY, "einstein", True, DERIVED, einstein_constant=2.0),
            ),
            "Round unit 3-sphere with its Hopf contact form: Einstein Sasakian, b = 0.",
        ),
        CatalogEntry(
            "flat_contact_r3",
            EntryKind.CONTACT,
            flat_contact,
            (
                _expect(CONTACT, "structure", True, DERIVED),
                _expect(CONTACT, "k_contact", False, DERIVED, "h != 0"),
                _expect(CONTACT, "sasakian", False, DERIVED),
                _expect(
                    CONTACT,
                    "eta_einstein",
                    True,
                    TRIVIAL,
                    eta_einstein_a=0.0,
                    eta_einstein_b=0.0,
                ),
                _expect(
                    CONTACT,
                    "k_mu",
                    True,
                    PAPER,
                    "flat 3-dimensional case",
                    k=0.0,
                    mu=0.0,
                ),
                _expect(
                    CLASSIFY,
                    "constant_curvature",
                    True,
                    TRIVIAL,
                    sectional_constant=0.0,
                ),
            ),
            "Flat contact metric structure on R^3 (k = mu = 0, h != 0).",
        ),
        CatalogEntry(
            "sasakian_r2xs2",
            EntryKind.CONTACT,
            r2xs2,
            (
                _expect(CONTACT, "structure", True, DERIVED),
                _expect(CONTACT, "k_contact", True, DERIVED),
                _expect(CONTACT, "sasakian", True, DERIVED),
                _expect(
                    CONTACT,
                    "eta_einstein",
                    False,
                    DERIVED,
                    "Ricci -2 on R^2, +2 on S^2",
                ),
                _expect(CONTACT, "k_mu", True, PAPER, k=1.0),
            ),
            "Sasakian circle bundle over R^2 x S^2; "
            "not eta-Einstein (negative control).",
        ),
        CatalogEntry(
            "contact_e2_group",
            EntryKind.CONTACT,
            e2_group,
            (
                _expect(CONTACT, "structure", True, DERIVED),
                _expect(
                    CONTACT,
                    "k_contact",
                    False,
                    DERIVED,
                    "h != 0, Ric(xi, xi) = 15/8 < 2",
                ),
                _expect(CONTACT, "sasakian", False, DERIVED),
                _expect(CONTACT, "eta_einstein", False, DERIVED),
                _expect(CONTACT, "k_mu", True, DERIVED, k=0.9375, mu=1.5),
            ),
            "Left-invariant contact metric on a group of type E(2), "
            "brackets (2, 1/2, 0): "
            "a non-Sasakian (k, mu)-space with r = -9/8.",
        ),
    ]


@lru_cache(maxsize=1)
def _catalog() -> dict[str, CatalogEntry]:
    entries = [*_plain_entries(), *_warped_entries(), *_contact_entries()]
    return {entry.name: entry for entry in entries}


def catalog_entries() -> list[CatalogEntry]:
    """All built-in entries in catalog order."""
    return list(_catalog().values())


def get_entry(name: str) -> CatalogEntry:
    """Entry by name, accepting an optional ``catalog:`` prefix.

    Raises:
        CatalogLookupError: If no entry has that name
    """
    key = name.removeprefix("catalog:")
    entry = _catalog().get(key)
    if entry is None:
        close = difflib.get_close_matches(key, list(_catalog()), n=3)
        hint = f"; did you mean {', '.join(close)}?" if close else ""
        raise CatalogLookupError(f"no catalog entry named '{key}'{hint}")
    return entry


def sample_points(
    domain: DomainBox,
    seed: int | None = None,
    count: int | None = None,
    margin: float | None = None,
) -> list[Point]:
    """Seeded uniform points in the margin-shrunk domain box.

    Args:
        domain: Chart domain
        seed: Generator seed (default from settings)
        count: Number of points (default from settings)
        margin: Fraction of each interval width dropped at both ends

    Returns:
        list[Point]: Points in generation order

    Raises:
        InvalidArgumentError: If count < 1 or the shrunk box is empty
    """
    seed = settings.default_seed if seed is None else seed
    count = settings.default_points if count is None else count
    margin = settings.sampler_margin if margin is None else margin
    if count < 1:
        raise InvalidArgumentError(f"point count must be >= 1, got {count}")
    if not 0 <= margin < 0.5:
        raise InvalidArgumentError(f"sampler margin must lie in [0, 0.5), got {margin}")
    box = domain.shrink(margin)
    lows = np.array([iv.lower for iv in box.intervals])
    highs = np.array([iv.upper for iv in box.intervals])
    rng = np.random.default_rng(seed)
    samples = rng.uniform(lows, highs, size=(count, box.dim))
    return [Point(tuple(float(x) for x in row)) for row in samples]


def entry_points(
    entry: CatalogEntry, seed: int | None = None, count: int | None = None
) -> list[Point]:
    """Deterministic sample points for a catalog entry."""
    return sample_points(entry.domain, seed, count)
