"""Chart specification data model: parse, validate, canonically serialize.

A chart spec is the pair of a semantic description (topology, per-panel
coordinate systems, domains, series, data) and a code-level description
(derived statistics, relational structure, vector fields, contour levels,
auxiliary annotations).  Documents are canonical JSON: UTF-8, sorted keys,
shortest round-trip float formatting, explicit nulls for absent sections,
unknown fields rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .families import CanonicalFamily

SPEC_VERSION = 1
SPEC_SUFFIX = ".chartspec.json"

TREEMAP_RATIO_SUM_TOL = 1e-6
STAT_VECTOR_LEN = 5


class SchemaError(ValueError):
    """A document is structurally unusable: missing, unknown, or ill-typed field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class Violation:
    """One violated invariant, addressed by field path."""

    path: str
    invariant: str
    detail: str = ""

    def __str__(self) -> str:
        suffix = f" ({self.detail})" if self.detail else ""
        return f"{self.path}: {self.invariant}{suffix}"


class InvariantError(ValueError):
    """A structurally well-formed document violates one or more invariants."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class CoordKind(str, Enum):
    CARTESIAN = "cartesian"
    POLAR = "polar"
    THREE_D = "3d"

    def __str__(self) -> str:
        return self.value


class DomainKind(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"

    def __str__(self) -> str:
        return self.value


class DataKind(str, Enum):
    EXPLICIT = "explicit"
    FUNCTION = "function"
    MATRIX = "matrix"
    NONE = "none"

    def __str__(self) -> str:
        return self.value


# Named colors resolve through this fixed table; everything else must already
# be hex.  Canonical form is lowercase #rrggbb.
NAMED_COLORS: dict[str, str] = {
    "b": "#0000ff",
    "g": "#008000",
    "r": "#ff0000",
    "c": "#00bfbf",
    "m": "#bf00bf",
    "y": "#bfbf00",
    "k": "#000000",
    "w": "#ffffff",
    "black": "#000000",
    "white": "#ffffff",
    "red": "#ff0000",
    "green": "#008000",
    "blue": "#0000ff",
    "yellow": "#ffff00",
    "cyan": "#00ffff",
    "magenta": "#ff00ff",
    "orange": "#ffa500",
    "purple": "#800080",
    "brown": "#a52a2a",
    "pink": "#ffc0cb",
    "gray": "#808080",
    "grey": "#808080",
    "olive": "#808000",
    "navy": "#000080",
    "teal": "#008080",
    "maroon": "#800000",
    "lime": "#00ff00",
    "aqua": "#00ffff",
    "silver": "#c0c0c0",
    "fuchsia": "#ff00ff",
    "gold": "#ffd700",
    "indigo": "#4b0082",
    "violet": "#ee82ee",
    "coral": "#ff7f50",
    "salmon": "#fa8072",
    "khaki": "#f0e68c",
    "turquoise": "#40e0d0",
    "crimson": "#dc143c",
    "skyblue": "#87ceeb",
    "plum": "#dda0dd",
    "tan": "#d2b48c",
    "beige": "#f5f5dc",
    "darkred": "#8b0000",
    "darkblue": "#00008b",
    "darkgreen": "#006400",
    "lightblue": "#add8e6",
    "lightgreen": "#90ee90",
    "lightgray": "#d3d3d3",
    "lightgrey": "#d3d3d3",
    "tab:blue": "#1f77b4",
    "tab:orange": "#ff7f0e",
    "tab:green": "#2ca02c",
    "tab:red": "#d62728",
    "tab:purple": "#9467bd",
    "tab:brown": "#8c564b",
    "tab:pink": "#e377c2",
    "tab:gray": "#7f7f7f",
    "tab:olive": "#bcbd22",
    "tab:cyan": "#17becf",
}

_HEX_DIGITS = set("0123456789abcdef")


def canonical_color(value: str, path: str = "color") -> str:
    """Canonicalize a color to lowercase 6-digit hex.

    Accepts #rgb, #rrggbb, #rrggbbaa (alpha dropped), and the built-in color
    names.  Anything else is a SchemaError.
    """
    if not isinstance(value, str):
        raise SchemaError(path, f"expected color string, got {type(value).__name__}")
    raw = value.strip().lower()
    if raw.startswith("#"):
        digits = raw[1:]
        if not set(digits) <= _HEX_DIGITS:
            raise SchemaError(path, f"invalid hex color {value!r}")
        if len(digits) == 3:
            return "#" + "".join(d * 2 for d in digits)
        if len(digits) == 6:
            return "#" + digits
        if len(digits) == 8:
            return "#" + digits[:6]
        raise SchemaError(path, f"invalid hex color {value!r}")
    if raw in NAMED_COLORS:
        return NAMED_COLORS[raw]
    raise SchemaError(path, f"unknown color name {value!r}")


def canonical_dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, no spaces, shortest float repr."""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


@dataclass(frozen=True)
class Topology:
    """Global chart shape: family, subplot grid, and panel count."""

    chart_type: CanonicalFamily
    layout: tuple[int, int]
    panel_count: int

    def __post_init__(self):
        object.__setattr__(self, "layout", tuple(self.layout))


@dataclass(frozen=True)
class Domain:
    """An axis domain: a numeric interval or an ordered categorical label set."""

    kind: DomainKind
    min: float | None = None
    max: float | None = None
    values: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.values is not None:
            object.__setattr__(self, "values", tuple(self.values))

    @classmethod
    def numeric(cls, lo: float, hi: float) -> "Domain":
        return cls(kind=DomainKind.NUMERIC, min=float(lo), max=float(hi))

    @classmethod
    def categorical(cls, values) -> "Domain":
        return cls(kind=DomainKind.CATEGORICAL, values=tuple(values))


@dataclass(frozen=True)
class DataRepr:
    """Panel data payload: explicit arrays, a function expression, a matrix grid, or none."""

    kind: DataKind
    expr: str | None = None
    x: tuple[float, ...] | None = None
    ys: tuple[tuple[float, ...], ...] | None = None
    grid: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        for name in ("x", "ys", "grid"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _freeze(list(value)))

    @classmethod
    def none(cls) -> "DataRepr":
        return cls(kind=DataKind.NONE)

    @classmethod
    def function(cls, expr: str) -> "DataRepr":
        return cls(kind=DataKind.FUNCTION, expr=expr)

    @classmethod
    def explicit(cls, ys, x=None) -> "DataRepr":
        return cls(kind=DataKind.EXPLICIT, x=x, ys=ys)

    @classmethod
    def matrix(cls, grid) -> "DataRepr":
        return cls(kind=DataKind.MATRIX, grid=grid)


@dataclass(frozen=True)
class PanelSpec:
    """One panel: coordinate system, axis domains, series labels, data."""

    coord: CoordKind
    x_domain: Domain | None
    y_domain: Domain | None
    series: tuple[str, ...]
    data: DataRepr

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))


@dataclass(frozen=True)
class SemanticSpec:
    topology: Topology
    panels: tuple[PanelSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "panels", tuple(self.panels))


@dataclass(frozen=True)
class Relational:
    """Part-whole leaves (label, ratio) or a node/edge graph."""

    kind: str  # "treemap" | "graph"
    leaves: tuple[tuple[str, float], ...] | None = None
    nodes: tuple[str, ...] | None = None
    edges: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self):
        for name in ("leaves", "nodes", "edges"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _freeze(list(value)))

    @classmethod
    def treemap(cls, leaves) -> "Relational":
        return cls(kind="treemap", leaves=tuple((str(l), float(r)) for l, r in leaves))

    @classmethod
    def graph(cls, nodes, edges) -> "Relational":
        canon = sorted(set(tuple(sorted((str(a), str(b)))) for a, b in edges))
        return cls(kind="graph", nodes=tuple(str(n) for n in nodes), edges=tuple(canon))


@dataclass(frozen=True)
class VectorField:
    """Anchored 2-D vectors: anchors[i] carries components[i]."""

    anchors: tuple[tuple[float, float], ...]
    components: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "anchors", _freeze(list(self.anchors)))
        object.__setattr__(self, "components", _freeze(list(self.components)))


@dataclass(frozen=True)
class Auxiliary:
    """Annotation layer: texts at normalized positions, canonical colors."""

    texts: tuple[tuple[str, float, float], ...] = ()
    colors: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "texts", _freeze(list(self.texts)))
        object.__setattr__(self, "colors", tuple(self.colors))


@dataclass(frozen=True)
class CodeSpec:
    """Code-level structure; sections a family does not use stay None."""

    statistical: tuple[tuple[str, tuple[float, ...]], ...] | None = None
    relational: Relational | None = None
    vector: VectorField | None = None
    contour_levels: tuple[float, ...] | None = None
    auxiliary: Auxiliary | None = None

    def __post_init__(self):
        if self.statistical is not None:
            object.__setattr__(self, "statistical", _freeze(list(self.statistical)))
        if self.contour_levels is not None:
            object.__setattr__(self, "contour_levels", tuple(self.contour_levels))


@dataclass(frozen=True)
class ChartSpec:
    family: CanonicalFamily
    semantic: SemanticSpec
    code: CodeSpec = field(default_factory=CodeSpec)
    version: int = SPEC_VERSION


# ---------------------------------------------------------------------------
# Parsing

_TOP_KEYS = {"version", "family", "semantic", "code"}
_SEMANTIC_KEYS = {"topology", "panels"}
_TOPOLOGY_KEYS = {"chart_type", "layout", "panel_count"}
_PANEL_KEYS = {"coord", "x_domain", "y_domain", "series", "data"}
_CODE_KEYS = {"statistical", "relational", "vector", "contour_levels", "auxiliary"}
_DATA_KEYS = {
    DataKind.EXPLICIT: {"kind", "x", "ys"},
    DataKind.FUNCTION: {"kind", "expr"},
    DataKind.MATRIX: {"kind", "grid"},
    DataKind.NONE: {"kind"},
}


def _expect_object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected object, got {type(value).__name__}")
    return value


def _expect_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected array, got {type(value).__name__}")
    return value


def _check_keys(obj: dict, allowed: set[str], path: str):
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}" if path else key, "unknown field")
    for key in allowed:
        if key not in obj:
            raise SchemaError(f"{path}.{key}" if path else key, "missing field")


def _real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected number, got {type(value).__name__}")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected integer, got {type(value).__name__}")
    return value


def _string(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected string, got {type(value).__name__}")
    return value


def _enum(value, enum_cls, path: str):
    name = _string(value, path)
    try:
        return enum_cls(name)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise SchemaError(path, f"expected one of [{allowed}], got {name!r}") from None


def _real_array(value, path: str) -> tuple[float, ...]:
    return tuple(_real(v, f"{path}[{i}]") for i, v in enumerate(_expect_list(value, path)))


def _parse_domain(value, path: str) -> Domain | None:
    if value is None:
        return None
    obj = _expect_object(value, path)
    kind = _enum(obj.get("kind"), DomainKind, f"{path}.kind")
    if kind is DomainKind.NUMERIC:
        _check_keys(obj, {"kind", "min", "max"}, path)
        return Domain(kind=kind, min=_real(obj["min"], f"{path}.min"), max=_real(obj["max"], f"{path}.max"))
    _check_keys(obj, {"kind", "values"}, path)
    values = tuple(
        _string(v, f"{path}.values[{i}]") for i, v in enumerate(_expect_list(obj["values"], f"{path}.values"))
    )
    return Domain(kind=kind, values=values)


def _parse_data(value, path: str) -> DataRepr:
    obj = _expect_object(value, path)
    kind = _enum(obj.get("kind"), DataKind, f"{path}.kind")
    _check_keys(obj, _DATA_KEYS[kind], path)
    if kind is DataKind.FUNCTION:
        return DataRepr(kind=kind, expr=_string(obj["expr"], f"{path}.expr"))
    if kind is DataKind.EXPLICIT:
        x = None if obj["x"] is None else _real_array(obj["x"], f"{path}.x")
        ys = tuple(
            _real_array(row, f"{path}.ys[{i}]") for i, row in enumerate(_expect_list(obj["ys"], f"{path}.ys"))
        )
        return DataRepr(kind=kind, x=x, ys=ys)
    if kind is DataKind.MATRIX:
        grid = tuple(
            _real_array(row, f"{path}.grid[{i}]")
            for i, row in enumerate(_expect_list(obj["grid"], f"{path}.grid"))
        )
        return DataRepr(kind=kind, grid=grid)
    return DataRepr(kind=kind)


def _parse_panel(value, path: str) -> PanelSpec:
    obj = _expect_object(value, path)
    _check_keys(obj, _PANEL_KEYS, path)
    series = tuple(
        _string(v, f"{path}.series[{i}]") for i, v in enumerate(_expect_list(obj["series"], f"{path}.series"))
    )
    return PanelSpec(
        coord=_enum(obj["coord"], CoordKind, f"{path}.coord"),
        x_domain=_parse_domain(obj["x_domain"], f"{path}.x_domain"),
        y_domain=_parse_domain(obj["y_domain"], f"{path}.y_domain"),
        series=series,
        data=_parse_data(obj["data"], f"{path}.data"),
    )


def _parse_pair_array(value, path: str) -> tuple[tuple[float, float], ...]:
    out = []
    for i, pair in enumerate(_expect_list(value, path)):
        row = _expect_list(pair, f"{path}[{i}]")
        if len(row) != 2:
            raise SchemaError(f"{path}[{i}]", f"expected pair, got {len(row)} elements")
        out.append((_real(row[0], f"{path}[{i}][0]"), _real(row[1], f"{path}[{i}][1]")))
    return tuple(out)


def _parse_relational(value, path: str) -> Relational | None:
    if value is None:
        return None
    obj = _expect_object(value, path)
    kind = _string(obj.get("kind"), f"{path}.kind")
    if kind == "treemap":
        _check_keys(obj, {"kind", "leaves"}, path)
        leaves = []
        for i, leaf in enumerate(_expect_list(obj["leaves"], f"{path}.leaves")):
            row = _expect_list(leaf, f"{path}.leaves[{i}]")
            if len(row) != 2:
                raise SchemaError(f"{path}.leaves[{i}]", f"expected [label, ratio], got {len(row)} elements")
            leaves.append((_string(row[0], f"{path}.leaves[{i}][0]"), _real(row[1], f"{path}.leaves[{i}][1]")))
        return Relational(kind=kind, leaves=tuple(leaves))
    if kind == "graph":
        _check_keys(obj, {"kind", "nodes", "edges"}, path)
        nodes = tuple(
            _string(v, f"{path}.nodes[{i}]") for i, v in enumerate(_expect_list(obj["nodes"], f"{path}.nodes"))
        )
        edges = []
        for i, edge in enumerate(_expect_list(obj["edges"], f"{path}.edges")):
            row = _expect_list(edge, f"{path}.edges[{i}]")
            if len(row) != 2:
                raise SchemaError(f"{path}.edges[{i}]", f"expected pair, got {len(row)} elements")
            a = _string(row[0], f"{path}.edges[{i}][0]")
            b = _string(row[1], f"{path}.edges[{i}][1]")
            edges.append(tuple(sorted((a, b))))
        # unordered pair set: canonical order, duplicates collapse
        return Relational(kind=kind, nodes=nodes, edges=tuple(sorted(set(edges))))
    raise SchemaError(f"{path}.kind", f"expected one of [treemap, graph], got {kind!r}")


def _parse_vector(value, path: str) -> VectorField | None:
    if value is None:
        return None
    obj = _expect_object(value, path)
    _check_keys(obj, {"anchors", "components"}, path)
    return VectorField(
        anchors=_parse_pair_array(obj["anchors"], f"{path}.anchors"),
        components=_parse_pair_array(obj["components"], f"{path}.components"),
    )


def _parse_auxiliary(value, path: str) -> Auxiliary | None:
    if value is None:
        return None
    obj = _expect_object(value, path)
    _check_keys(obj, {"texts", "colors"}, path)
    texts = []
    for i, item in enumerate(_expect_list(obj["texts"], f"{path}.texts")):
        row = _expect_list(item, f"{path}.texts[{i}]")
        if len(row) != 3:
            raise SchemaError(f"{path}.texts[{i}]", f"expected [text, x, y], got {len(row)} elements")
        texts.append(
            (
                _string(row[0], f"{path}.texts[{i}][0]"),
                _real(row[1], f"{path}.texts[{i}][1]"),
                _real(row[2], f"{path}.texts[{i}][2]"),
            )
        )
    colors = tuple(
        canonical_color(v, f"{path}.colors[{i}]")
        for i, v in enumerate(_expect_list(obj["colors"], f"{path}.colors"))
    )
    return Auxiliary(texts=tuple(texts), colors=colors)


def _parse_statistical(value, path: str):
    if value is None:
        return None
    entries = []
    for i, item in enumerate(_expect_list(value, path)):
        row = _expect_list(item, f"{path}[{i}]")
        if len(row) != 2:
            raise SchemaError(f"{path}[{i}]", f"expected [label, stats], got {len(row)} elements")
        entries.append((_string(row[0], f"{path}[{i}][0]"), _real_array(row[1], f"{path}[{i}][1]")))
    return tuple(entries)


def parse_spec(data: bytes | str | dict) -> ChartSpec:
    """Parse and validate a chart spec document.

    Raises SchemaError for structural problems (first one found, with its
    field path) and InvariantError listing every violated invariant.
    """
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from None
    obj = _expect_object(data, "$")
    _check_keys(obj, _TOP_KEYS, "")
    version = _integer(obj["version"], "version")
    if version != SPEC_VERSION:
        raise SchemaError("version", f"unsupported version {version}, expected {SPEC_VERSION}")
    family = _enum(obj["family"], CanonicalFamily, "family")

    semantic_obj = _expect_object(obj["semantic"], "semantic")
    _check_keys(semantic_obj, _SEMANTIC_KEYS, "semantic")
    topo_obj = _expect_object(semantic_obj["topology"], "semantic.topology")
    _check_keys(topo_obj, _TOPOLOGY_KEYS, "semantic.topology")
    layout_list = _expect_list(topo_obj["layout"], "semantic.topology.layout")
    if len(layout_list) != 2:
        raise SchemaError("semantic.topology.layout", f"expected [rows, cols], got {len(layout_list)} elements")
    topology = Topology(
        chart_type=_enum(topo_obj["chart_type"], CanonicalFamily, "semantic.topology.chart_type"),
        layout=(
            _integer(layout_list[0], "semantic.topology.layout[0]"),
            _integer(layout_list[1], "semantic.topology.layout[1]"),
        ),
        panel_count=_integer(topo_obj["panel_count"], "semantic.topology.panel_count"),
    )
    panels = tuple(
        _parse_panel(p, f"semantic.panels[{i}]")
        for i, p in enumerate(_expect_list(semantic_obj["panels"], "semantic.panels"))
    )

    code_obj = _expect_object(obj["code"], "code")
    _check_keys(code_obj, _CODE_KEYS, "code")
    contour = code_obj["contour_levels"]
    code = CodeSpec(
        statistical=_parse_statistical(code_obj["statistical"], "code.statistical"),
        relational=_parse_relational(code_obj["relational"], "code.relational"),
        vector=_parse_vector(code_obj["vector"], "code.vector"),
        contour_levels=None if contour is None else _real_array(contour, "code.contour_levels"),
        auxiliary=_parse_auxiliary(code_obj["auxiliary"], "code.auxiliary"),
    )

    spec = ChartSpec(family=family, semantic=SemanticSpec(topology=topology, panels=panels), code=code)
    violations = validate(spec)
    if violations:
        raise InvariantError(violations)
    return spec


# ---------------------------------------------------------------------------
# Serialization

def _dump_domain(domain: Domain | None):
    if domain is None:
        return None
    if domain.kind is DomainKind.NUMERIC:
        return {"kind": "numeric", "min": float(domain.min), "max": float(domain.max)}
    return {"kind": "categorical", "values": list(domain.values)}


def _dump_data(data: DataRepr):
    if data.kind is DataKind.FUNCTION:
        return {"kind": "function", "expr": data.expr}
    if data.kind is DataKind.EXPLICIT:
        return {
            "kind": "explicit",
            "x": None if data.x is None else [float(v) for v in data.x],
            "ys": [[float(v) for v in row] for row in data.ys],
        }
    if data.kind is DataKind.MATRIX:
        return {"kind": "matrix", "grid": [[float(v) for v in row] for row in data.grid]}
    return {"kind": "none"}


def to_dict(spec: ChartSpec) -> dict:
    """The canonical dict form of a spec (what serialize_spec dumps)."""
    semantic = spec.semantic
    code = spec.code
    relational = None
    if code.relational is not None:
        if code.relational.kind == "treemap":
            relational = {
                "kind": "treemap",
                "leaves": [[label, float(ratio)] for label, ratio in code.relational.leaves],
            }
        else:
            relational = {
                "kind": "graph",
                "nodes": list(code.relational.nodes),
                "edges": [sorted([a, b]) for a, b in sorted(set(code.relational.edges))],
            }
    vector = None
    if code.vector is not None:
        vector = {
            "anchors": [[float(x), float(y)] for x, y in code.vector.anchors],
            "components": [[float(u), float(v)] for u, v in code.vector.components],
        }
    auxiliary = None
    if code.auxiliary is not None:
        auxiliary = {
            "texts": [[t, float(x), float(y)] for t, x, y in code.auxiliary.texts],
            "colors": list(code.auxiliary.colors),
        }
    return {
        "version": int(spec.version),
        "family": spec.family.value,
        "semantic": {
            "topology": {
                "chart_type": semantic.topology.chart_type.value,
                "layout": [int(semantic.topology.layout[0]), int(semantic.topology.layout[1])],
                "panel_count": int(semantic.topology.panel_count),
            },
            "panels": [
                {
                    "coord": p.coord.value,
                    "x_domain": _dump_domain(p.x_domain),
                    "y_domain": _dump_domain(p.y_domain),
                    "series": list(p.series),
                    "data": _dump_data(p.data),
                }
                for p in semantic.panels
            ],
        },
        "code": {
            "statistical": None
            if code.statistical is None
            else [[label, [float(v) for v in stats]] for label, stats in code.statistical],
            "relational": relational,
            "vector": vector,
            "contour_levels": None if code.contour_levels is None else [float(v) for v in code.contour_levels],
            "auxiliary": auxiliary,
        },
    }


def serialize_spec(spec: ChartSpec) -> bytes:
    """Canonical UTF-8 bytes; re-parsing yields an equal ChartSpec."""
    return (canonical_dumps(to_dict(spec)) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Validation

def _finite(*values) -> bool:
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in values)


def _validate_domain(domain: Domain | None, path: str, out: list[Violation]):
    if domain is None:
        return
    if domain.kind is DomainKind.NUMERIC:
        if not _finite(domain.min, domain.max):
            out.append(Violation(path, "numeric_domain_finite", "min/max must be finite numbers"))
        elif domain.min > domain.max:
            out.append(Violation(path, "numeric_domain_ordered", f"min {domain.min} > max {domain.max}"))
    else:
        values = domain.values or ()
        if len(values) == 0:
            out.append(Violation(path, "categorical_domain_nonempty", "no labels"))
        if any(not isinstance(v, str) or v == "" for v in values):
            out.append(Violation(path, "categorical_labels_nonempty", "empty label"))
        if len(set(values)) != len(values):
            out.append(Violation(path, "categorical_labels_unique", "duplicate label"))


def _validate_data(data: DataRepr, path: str, out: list[Violation]):
    if data.kind is DataKind.FUNCTION:
        if not data.expr or not data.expr.strip():
            out.append(Violation(f"{path}.expr", "function_expr_nonempty", "empty expression"))
    elif data.kind is DataKind.EXPLICIT:
        arrays = list(data.ys or ())
        if data.x is not None:
            arrays.append(data.x)
        for arr in arrays:
            if not _finite(*arr):
                out.append(Violation(path, "explicit_values_finite", "non-finite value"))
                break
        if data.x is not None:
            n = len(data.x)
            if any(len(row) != n for row in data.ys or ()):
                out.append(
                    Violation(path, "explicit_shared_length", f"series lengths must match x length {n}")
                )
    elif data.kind is DataKind.MATRIX:
        grid = data.grid or ()
        if len(grid) == 0 or any(len(row) == 0 for row in grid):
            out.append(Violation(f"{path}.grid", "matrix_nonempty", "empty grid"))
        elif len(set(len(row) for row in grid)) != 1:
            out.append(Violation(f"{path}.grid", "matrix_rectangular", "ragged rows"))
        if any(not _finite(*row) for row in grid):
            out.append(Violation(f"{path}.grid", "matrix_values_finite", "non-finite value"))


def validate(spec: ChartSpec) -> list[Violation]:
    """Every violated invariant, ordered by field path then invariant name."""
    out: list[Violation] = []
    topo = spec.semantic.topology
    rows, cols = topo.layout
    if rows < 1 or cols < 1:
        out.append(Violation("semantic.topology.layout", "layout_positive", f"got {rows}x{cols}"))
    if topo.panel_count < 1:
        out.append(Violation("semantic.topology.panel_count", "panel_count_positive", f"got {topo.panel_count}"))
    elif rows >= 1 and cols >= 1 and topo.panel_count > rows * cols:
        out.append(
            Violation(
                "semantic.topology.panel_count",
                "panel_count_fits_layout",
                f"{topo.panel_count} panels exceed {rows}x{cols} grid",
            )
        )
    if spec.family is not topo.chart_type:
        out.append(
            Violation(
                "family",
                "family_matches_topology",
                f"{spec.family.value} != {topo.chart_type.value}",
            )
        )
    if len(spec.semantic.panels) != topo.panel_count:
        out.append(
            Violation(
                "semantic.panels",
                "panel_list_matches_count",
                f"{len(spec.semantic.panels)} panels, panel_count {topo.panel_count}",
            )
        )
    for i, panel in enumerate(spec.semantic.panels):
        path = f"semantic.panels[{i}]"
        _validate_domain(panel.x_domain, f"{path}.x_domain", out)
        _validate_domain(panel.y_domain, f"{path}.y_domain", out)
        if len(set(panel.series)) != len(panel.series):
            out.append(Violation(f"{path}.series", "series_labels_unique", "duplicate label"))
        _validate_data(panel.data, f"{path}.data", out)

    code = spec.code
    if code.statistical is not None:
        labels = [label for label, _ in code.statistical]
        if len(set(labels)) != len(labels):
            out.append(Violation("code.statistical", "stat_labels_unique", "duplicate category"))
        for i, (_, stats) in enumerate(code.statistical):
            if len(stats) != STAT_VECTOR_LEN:
                out.append(
                    Violation(
                        f"code.statistical[{i}]",
                        "stat_vector_length",
                        f"expected {STAT_VECTOR_LEN} values, got {len(stats)}",
                    )
                )
                continue
            if not _finite(*stats):
                out.append(Violation(f"code.statistical[{i}]", "stat_values_finite", "non-finite value"))
            elif any(stats[j] > stats[j + 1] for j in range(len(stats) - 1)):
                out.append(
                    Violation(f"code.statistical[{i}]", "stat_vector_monotone", "summary must be non-decreasing")
                )
    rel = code.relational
    if rel is not None:
        if rel.kind == "treemap":
            leaves = rel.leaves or ()
            labels = [label for label, _ in leaves]
            if len(set(labels)) != len(labels):
                out.append(Violation("code.relational.leaves", "leaf_labels_unique", "duplicate label"))
            ratios = [r for _, r in leaves]
            if not _finite(*ratios) or any(r < 0 or r > 1 for r in ratios):
                out.append(Violation("code.relational.leaves", "leaf_ratios_in_unit", "ratio outside [0, 1]"))
            elif leaves and abs(sum(ratios) - 1.0) > TREEMAP_RATIO_SUM_TOL:
                out.append(
                    Violation(
                        "code.relational.leaves",
                        "leaf_ratios_sum_to_one",
                        f"sum {sum(ratios)!r} not within {TREEMAP_RATIO_SUM_TOL}",
                    )
                )
        else:
            nodes = rel.nodes or ()
            if len(set(nodes)) != len(nodes):
                out.append(Violation("code.relational.nodes", "node_labels_unique", "duplicate node"))
            if any(n == "" for n in nodes):
                out.append(Violation("code.relational.nodes", "node_labels_nonempty", "empty node label"))
    if code.vector is not None:
        if len(code.vector.anchors) != len(code.vector.components):
            out.append(
                Violation(
                    "code.vector",
                    "vector_lengths_equal",
                    f"{len(code.vector.anchors)} anchors, {len(code.vector.components)} components",
                )
            )
        flat = [v for pair in (*code.vector.anchors, *code.vector.components) for v in pair]
        if not _finite(*flat):
            out.append(Violation("code.vector", "vector_values_finite", "non-finite value"))
    if code.contour_levels is not None:
        levels = code.contour_levels
        if not _finite(*levels):
            out.append(Violation("code.contour_levels", "contour_levels_finite", "non-finite level"))
        elif any(levels[i] > levels[i + 1] for i in range(len(levels) - 1)):
            out.append(Violation("code.contour_levels", "contour_levels_sorted", "levels must be non-decreasing"))
    aux = code.auxiliary
    if aux is not None:
        for i, (_, x, y) in enumerate(aux.texts):
            if not _finite(x, y) or not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                out.append(
                    Violation(f"code.auxiliary.texts[{i}]", "text_position_normalized", f"({x}, {y}) outside [0, 1]^2")
                )
        for i, color in enumerate(aux.colors):
            if not isinstance(color, str) or len(color) != 7 or color[0] != "#" or not set(color[1:]) <= _HEX_DIGITS:
                out.append(
                    Violation(f"code.auxiliary.colors[{i}]", "color_canonical_hex", f"{color!r} is not #rrggbb")
                )
    out.sort(key=lambda v: (v.path, v.invariant))
    return out
