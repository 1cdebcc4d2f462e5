"""Metric definition files: stanza-based text for plain, warped and contact definitions.

Layout::

    [metric]
    version = 1
    kind = plain | warped | contact
    label = sphere_4
    dimension = 4                      # optional for warped definitions
    coordinates = a, b, c, d
    signature = +, +, +, +

    [components]                       # lower triangle, the rest is implied
    g_{a,a} = 1
    g_{b,b} = sin(a)^2
    g_10 = 0                           # 0-based digit form, dimension <= 10

    [domain]
    a = (0.4, pi - 0.4)

A warped definition replaces [components]/[domain] with::

    [warped]
    epsilon = -1
    base = t
    f = 1 + t^2
    interval = (1, 2)
    fiber = catalog:sphere_3           # or an inline [fiber] stanza set:

    [fiber]                            # label, coordinates, signature
    [fiber.components]
    [fiber.domain]

A contact definition adds::

    [contact]
    eta_{x} = -y/2
    xi^{z} = 2
    phi^{x}_{y} = 1                    # component phi^x_y; missing ones are 0

An optional [analysis] stanza holds ``seed``, ``points``, ``tol_structural``,
``tol_derived`` and ``tol_theorem``. Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from curvlab.core import expression as ex
from curvlab.core.expression import ScalarExpr
from curvlab.core.metric import DomainBox, Interval, MetricField
from curvlab.core.parser import fold_constant, parse_expr
from curvlab.exceptions import (
    CatalogLookupError,
    ExpressionSyntaxError,
    MetricFileError,
    NumericalDomainError,
    StructuralValidationError,
)
from curvlab.models.catalog import CatalogEntry, Definition, EntryKind
from curvlab.models.contact import ContactStructure
from curvlab.models.warped import WarpedProductSpec

FORMAT_VERSION = 1

SECTIONS = (
    "metric",
    "components",
    "domain",
    "warped",
    "fiber",
    "fiber.components",
    "fiber.domain",
    "contact",
    "analysis",
)

_SECTION_RE = re.compile(r"^\[\s*([A-Za-z_.]+)\s*\]$")
_KEY_RE = re.compile(r"^([^=]+?)\s*=\s*")
_BRACED_COMPONENT_RE = re.compile(r"^g_\{\s*(\w+)\s*,\s*(\w+)\s*\}$")
_DIGIT_COMPONENT_RE = re.compile(r"^g_(\d)(\d)$")
_ETA_RE = re.compile(r"^eta_\{\s*(\w+)\s*\}$")
_XI_RE = re.compile(r"^xi\^\{\s*(\w+)\s*\}$")
_PHI_RE = re.compile(r"^phi\^\{\s*(\w+)\s*\}_\{\s*(\w+)\s*\}$")
_ANALYSIS_KEYS = ("seed", "points", "tol_structural", "tol_derived", "tol_theorem")


@dataclass(frozen=True)
class Field:
    """One ``key = value`` line; ``column`` is the 1-based byte column of the value."""

    key: str
    value: str
    line: int
    column: int


@dataclass
class Stanza:
    name: str
    line: int
    fields: dict[str, Field] = field(default_factory=dict)

    def get(self, key: str) -> Field | None:
        return self.fields.get(key)

    def require(self, key: str) -> Field:
        found = self.fields.get(key)
        if found is None:
            raise MetricFileError(f"[{self.name}] is missing '{key}'", self.line)
        return found


@dataclass(frozen=True)
class AnalysisDefaults:
    """Optional per-file analysis settings; CLI flags take precedence."""

    seed: int | None = None
    points: int | None = None
    tol_structural: float | None = None
    tol_derived: float | None = None
    tol_theorem: float | None = None

    def tolerances(self) -> dict[str, float | None]:
        return {
            "structural": self.tol_structural,
            "derived": self.tol_derived,
            "theorem": self.tol_theorem,
        }


@dataclass(frozen=True)
class MetricFile:
    """Parsed metric definition file."""

    version: int
    kind: EntryKind
    definition: Definition
    analysis: AnalysisDefaults = AnalysisDefaults()

    @property
    def label(self) -> str:
        return self.definition.label


def split_stanzas(text: str) -> dict[str, Stanza]:
    """Group ``key = value`` lines under their stanza headers.

    Raises:
        MetricFileError: On unknown or repeated stanzas, repeated keys and stray lines
    """
    stanzas: dict[str, Stanza] = {}
    current: Stanza | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        header = _SECTION_RE.match(line)
        if header:
            name = header.group(1)
            if name not in SECTIONS:
                raise MetricFileError(
                    f"unknown stanza [{name}]", number, raw.index("[") + 1
                )
            if name in stanzas:
                raise MetricFileError(
                    f"stanza [{name}] appears twice", number, raw.index("[") + 1
                )
            current = Stanza(name, number)
            stanzas[name] = current
            continue
        indent = len(raw) - len(raw.lstrip())
        match = _KEY_RE.match(line)
        if match is None:
            raise MetricFileError("expected 'key = value'", number, indent + 1)
        if current is None:
            raise MetricFileError("key outside any stanza", number, 1)
        key = match.group(1).strip()
        if key in current.fields:
            raise MetricFileError(
                f"key '{key}' repeated in [{current.name}]", number, 1
            )
        value = _strip_comment(line[match.end() :])
        column = len(raw[: indent + match.end()].encode("utf-8")) + 1
        current.fields[key] = Field(key, value, number, column)
    return stanzas


def _strip_comment(value: str) -> str:
    hash_at = value.find("#")
    return (value[:hash_at] if hash_at >= 0 else value).rstrip()


def _expression(f: Field, coords: Sequence[str]) -> ScalarExpr:
    if not f.value:
        raise MetricFileError(f"'{f.key}' has an empty expression", f.line, f.column)
    try:
        return parse_expr(f.value, coords)
    except ExpressionSyntaxError as exc:
        raise MetricFileError(str(exc), f.line, f.column + exc.offset) from exc


def _number(f: Field) -> float:
    expr = _expression(f, ())
    try:
        return fold_constant(expr)
    except NumericalDomainError as exc:
        raise MetricFileError(str(exc), f.line, f.column) from exc


def _integer(f: Field) -> int:
    try:
        return int(f.value)
    except ValueError:
        raise MetricFileError(
            f"'{f.key}' must be an integer, got '{f.value}'", f.line, f.column
        ) from None


def _names(f: Field) -> tuple[str, ...]:
    names = tuple(n.strip() for n in f.value.split(","))
    if not all(re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n) for n in names):
        raise MetricFileError(f"invalid coordinate list '{f.value}'", f.line, f.column)
    return names


def _signature(f: Field, n: int) -> tuple[int, ...]:
    signs = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    items = [s.strip() for s in f.value.split(",")]
    if len(items) != n or any(s not in signs for s in items):
        raise MetricFileError(
            f"signature must list {n} signs (+ or -), got '{f.value}'",
            f.line,
            f.column,
        )
    return tuple(signs[s] for s in items)


def _interval(f: Field) -> Interval:
    value = f.value
    if not (value.startswith("(") and value.endswith(")")) or value.count(",") != 1:
        raise MetricFileError(
            f"interval must read '(lower, upper)', got '{value}'", f.line, f.column
        )
    comma = value.index(",")
    lower = Field(f.key, value[1:comma].strip(), f.line, f.column + 1)
    upper = Field(f.key, value[comma + 1 : -1].strip(), f.line, f.column + comma + 1)
    try:
        return Interval(_number(lower), _number(upper))
    except MetricFileError:
        raise
    except StructuralValidationError as exc:
        raise MetricFileError(str(exc), f.line, f.column) from exc


def _component_index(key: str, coords: Sequence[str]) -> tuple[int, int] | None:
    braced = _BRACED_COMPONENT_RE.match(key)
    if braced:
        a, b = braced.groups()
        if a not in coords or b not in coords:
            return None
        return coords.index(a), coords.index(b)
    digits = _DIGIT_COMPONENT_RE.match(key)
    if digits:
        i, j = int(digits.group(1)), int(digits.group(2))
        if i < len(coords) and j < len(coords):
            return i, j
    return None


def _metric_from(
    label: str,
    header: Stanza,
    components: Stanza | None,
    domain: Stanza | None,
    dimension: int | None = None,
) -> MetricField:
    coords = _names(header.require("coordinates"))
    n = len(coords)
    if dimension is not None and dimension != n:
        raise MetricFileError(
            f"dimension {dimension} does not match {n} coordinates",
            header.require("dimension").line,
        )
    signature = _signature(header.require("signature"), n)
    if components is None:
        raise MetricFileError(
            f"missing [{_child(header, 'components')}] stanza", header.line
        )
    if domain is None:
        raise MetricFileError(
            f"missing [{_child(header, 'domain')}] stanza", header.line
        )

    entries: dict[tuple[int, int], ScalarExpr] = {}
    for key, f in components.fields.items():
        index = _component_index(key, coords)
        if index is None:
            raise MetricFileError(
                f"'{key}' does not name a metric component", f.line, 1
            )
        unordered = (max(index), min(index))
        if unordered in entries:
            raise MetricFileError(
                f"component {key} given twice (symmetry is implied)", f.line, 1
            )
        entries[unordered] = _expression(f, coords)

    intervals = []
    for name in coords:
        f = domain.get(name)
        if f is None:
            raise MetricFileError(
                f"[{domain.name}] has no interval for '{name}'", domain.line
            )
        intervals.append(_interval(f))
    extra = set(domain.fields) - set(coords)
    if extra:
        stray = domain.fields[sorted(extra)[0]]
        raise MetricFileError(f"'{stray.key}' is not a coordinate", stray.line, 1)

    try:
        return MetricField.from_lower_triangle(
            label, coords, entries, signature, DomainBox(tuple(intervals))
        )
    except MetricFileError:
        raise
    except StructuralValidationError as exc:
        raise MetricFileError(str(exc), header.line) from exc


def _child(header: Stanza, name: str) -> str:
    return name if header.name == "metric" else f"fiber.{name}"


def _warped(
    label: str, stanzas: dict[str, Stanza], dimension: int | None
) -> WarpedProductSpec:
    warped = stanzas.get("warped")
    if warped is None:
        raise MetricFileError(
            "kind 'warped' needs a [warped] stanza", stanzas["metric"].line
        )
    epsilon_field = warped.require("epsilon")
    epsilon = _integer(epsilon_field)
    base = warped.get("base")
    t_name = base.value if base is not None else "t"
    f = _expression(warped.require("f"), (t_name,))
    interval = _interval(warped.require("interval"))

    reference = warped.get("fiber")
    if reference is not None:
        fiber = _catalog_fiber(reference)
    else:
        header = stanzas.get("fiber")
        if header is None:
            raise MetricFileError(
                "warped definition needs 'fiber = catalog:<name>' or a [fiber] stanza",
                warped.line,
            )
        fiber_label = header.get("label")
        fiber = _metric_from(
            fiber_label.value if fiber_label else f"{label}_fiber",
            header,
            stanzas.get("fiber.components"),
            stanzas.get("fiber.domain"),
        )
    if dimension is not None and dimension != fiber.dim + 1:
        raise MetricFileError(
            f"dimension {dimension} does not match 1 + fiber dimension {fiber.dim}",
            stanzas["metric"].require("dimension").line,
        )
    try:
        spec = WarpedProductSpec(label, epsilon, f, interval, fiber, t_name)
        spec.check_warping()
    except MetricFileError:
        raise
    except StructuralValidationError as exc:
        raise MetricFileError(str(exc), warped.line) from exc
    return spec


def _catalog_fiber(reference: Field) -> MetricField:
    from curvlab.services.catalog import get_entry

    if not reference.value.startswith("catalog:"):
        raise MetricFileError(
            "fiber reference must read 'catalog:<name>'",
            reference.line,
            reference.column,
        )
    try:
        entry = get_entry(reference.value)
    except CatalogLookupError as exc:
        raise MetricFileError(str(exc), reference.line, reference.column) from exc
    if entry.kind is not EntryKind.PLAIN:
        raise MetricFileError(
            f"fiber '{entry.name}' is not a plain metric",
            reference.line,
            reference.column,
        )
    return entry.metric


def _contact(metric: MetricField, stanza: Stanza | None) -> ContactStructure:
    if stanza is None:
        raise MetricFileError("kind 'contact' needs a [contact] stanza")
    coords = metric.coord_names
    n = metric.dim
    eta: list[ScalarExpr] = [ex.const(0.0)] * n
    xi: list[ScalarExpr] = [ex.const(0.0)] * n
    phi: dict[tuple[int, int], ScalarExpr] = {}
    for key, f in stanza.fields.items():
        if m := _ETA_RE.match(key):
            eta[_coordinate(m.group(1), coords, f)] = _expression(f, coords)
        elif m := _XI_RE.match(key):
            xi[_coordinate(m.group(1), coords, f)] = _expression(f, coords)
        elif m := _PHI_RE.match(key):
            a = _coordinate(m.group(1), coords, f)
            b = _coordinate(m.group(2), coords, f)
            phi[(a, b)] = _expression(f, coords)
        else:
            raise MetricFileError(
                f"'{key}' is not an eta_{{x}}, xi^{{x}} or phi^{{x}}_{{y}} entry",
                f.line,
                1,
            )
    try:
        return ContactStructure.build(metric.label, metric, eta, xi, phi)
    except StructuralValidationError as exc:
        raise MetricFileError(str(exc), stanza.line) from exc


def _coordinate(name: str, coords: Sequence[str], f: Field) -> int:
    if name not in coords:
        raise MetricFileError(f"unknown coordinate '{name}' in '{f.key}'", f.line, 1)
    return coords.index(name)


def _analysis(stanza: Stanza | None) -> AnalysisDefaults:
    if stanza is None:
        return AnalysisDefaults()
    values: dict[str, float | int] = {}
    for key, f in stanza.fields.items():
        if key not in _ANALYSIS_KEYS:
            raise MetricFileError(f"unknown analysis setting '{key}'", f.line, 1)
        if key in ("seed", "points"):
            values[key] = _integer(f)
            if key == "points" and values[key] < 1:
                raise MetricFileError("points must be >= 1", f.line, f.column)
        else:
            values[key] = _number(f)
            if not values[key] > 0:
                raise MetricFileError(f"{key} must be positive", f.line, f.column)
    return AnalysisDefaults(**values)  # type: ignore[arg-type]


def parse_metric_file(text: str) -> MetricFile:
    """Parse a metric definition file.

    Args:
        text: File contents

    Returns:
        MetricFile: Validated definition and analysis defaults

    Raises:
        MetricFileError: With the line (and column where known) of the problem
    """
    stanzas = split_stanzas(text)
    header = stanzas.get("metric")
    if header is None:
        raise MetricFileError("missing [metric] stanza", 1)
    version_field = header.require("version")
    version = _integer(version_field)
    if version != FORMAT_VERSION:
        raise MetricFileError(
            f"unsupported format version {version}",
            version_field.line,
            version_field.column,
        )
    kind_field = header.require("kind")
    try:
        kind = EntryKind(kind_field.value)
    except ValueError:
        raise MetricFileError(
            f"kind must be plain, warped or contact, got '{kind_field.value}'",
            kind_field.line,
            kind_field.column,
        ) from None
    label_field = header.get("label")
    label = label_field.value if label_field else "metric"
    dimension_field = header.get("dimension")
    dimension = _integer(dimension_field) if dimension_field else None

    definition: Definition
    if kind is EntryKind.WARPED:
        definition = _warped(label, stanzas, dimension)
    else:
        if dimension is None:
            raise MetricFileError("[metric] is missing 'dimension'", header.line)
        metric = _metric_from(
            label, header, stanzas.get("components"), stanzas.get("domain"), dimension
        )
        if kind is EntryKind.CONTACT:
            definition = _contact(metric, stanzas.get("contact"))
        else:
            definition = metric
    analysis = _analysis(stanzas.get("analysis"))
    return MetricFile(FORMAT_VERSION, kind, definition, analysis)


def load_metric_file(path: str | Path) -> MetricFile:
    """Read and parse a metric definition file from disk."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MetricFileError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_metric_file(text)


def _number_text(value: float) -> str:
    return ex.format_number(value)


def _interval_text(interval: Interval) -> str:
    return f"({_number_text(interval.lower)}, {_number_text(interval.upper)})"


def _metric_lines(m: MetricField, prefix: str = "") -> list[str]:
    coords = m.coord_names
    lines = [f"[{prefix}components]"]
    for i, j, expr in m.lower_triangle():
        lines.append(f"g_{{{coords[i]},{coords[j]}}} = {ex.to_text(expr, coords)}")
    lines += ["", f"[{prefix}domain]"]
    for name, interval in zip(coords, m.domain.intervals):
        lines.append(f"{name} = {_interval_text(interval)}")
    return lines


def _header_lines(m: MetricField) -> list[str]:
    return [
        f"coordinates = {', '.join(m.coord_names)}",
        f"signature = {', '.join('+' if s > 0 else '-' for s in m.signature)}",
    ]


def dump_definition(
    definition: Definition, analysis: AnalysisDefaults | None = None
) -> str:
    """Render a definition as metric file text that parses back to an equal one."""
    lines = [
        "# curvature-lab metric definition",
        "[metric]",
        f"version = {FORMAT_VERSION}",
    ]
    if isinstance(definition, WarpedProductSpec):
        fiber = definition.fiber
        lines += [
            "kind = warped",
            f"label = {definition.label}",
            f"dimension = {definition.dim}",
            "",
            "[warped]",
            f"epsilon = {definition.epsilon}",
            f"base = {definition.t_name}",
            f"f = {ex.to_text(definition.f, (definition.t_name,))}",
            f"interval = {_interval_text(definition.t_domain)}",
            "",
            "[fiber]",
            f"label = {fiber.label}",
            *_header_lines(fiber),
            "",
            *_metric_lines(fiber, "fiber."),
        ]
    else:
        if isinstance(definition, ContactStructure):
            metric, kind = definition.metric, "contact"
        else:
            metric, kind = definition, "plain"
        lines += [
            f"kind = {kind}",
            f"label = {definition.label}",
            f"dimension = {metric.dim}",
            *_header_lines(metric),
            "",
            *_metric_lines(metric),
        ]
        if isinstance(definition, ContactStructure):
            coords = metric.coord_names
            lines += ["", "[contact]"]
            lines += [
                f"eta_{{{c}}} = {ex.to_text(e, coords)}"
                for c, e in zip(coords, definition.eta)
                if not _is_zero(e)
            ]
            lines += [
                f"xi^{{{c}}} = {ex.to_text(e, coords)}"
                for c, e in zip(coords, definition.xi)
                if not _is_zero(e)
            ]
            for a, row in enumerate(definition.phi):
                for b, e in enumerate(row):
                    if not _is_zero(e):
                        key = f"phi^{{{coords[a]}}}_{{{coords[b]}}}"
                        lines.append(f"{key} = {ex.to_text(e, coords)}")
    if analysis is not None and any(v is not None for v in vars(analysis).values()):
        lines += ["", "[analysis]"]
        for key in _ANALYSIS_KEYS:
            value = getattr(analysis, key)
            if value is not None:
                text = value if isinstance(value, int) else _number_text(value)
                lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def _is_zero(expr: ScalarExpr) -> bool:
    return isinstance(expr, ex.Const) and expr.value == 0.0


def dump_entry(entry: CatalogEntry) -> str:
    """Metric file text of a catalog entry, headed by its notes."""
    header = f"# {entry.name}: {entry.notes}\n" if entry.notes else ""
    return header + dump_definition(entry.definition)
