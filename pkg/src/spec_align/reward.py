"""Hierarchical reward: format and execution checks, a topology gate, then
semantic and code-level similarity scored against a reference spec.

The stages are a staircase: a response that fails the format check only loses
the format penalty, failed execution forfeits the semantic and code phases,
and a failed topology gate zeroes both similarity subtotals.  Code-level
metrics are mutually exclusive with the semantic data component per family,
so no structure is rewarded twice.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Mapping

from .chartspec import ChartSpec, DataKind, DataRepr, Domain, DomainKind, validate
from .execution import ExecStatus, ExecutionReport
from .families import CanonicalFamily
from .kernels import (
    auxiliary_scores,
    level_set_similarity,
    norm_edit_similarity,
    numeric_alignment,
    range_iou,
    relational_f1,
    set_jaccard,
    stat_l2_score,
    vector_cosine_score,
)


class InvalidSpec(ValueError):
    """A spec handed to the scorer fails validation."""

    def __init__(self, which: str, violations):
        self.which = which
        self.violations = list(violations)
        detail = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{which} spec invalid: {detail}")


@dataclass(frozen=True)
class FamilyToggles:
    """Which reward components are live for a family.

    ``data`` drives the semantic data component; the rest select the
    family's code-level metric.  Code metrics and the data component are
    mutually exclusive in the default table.
    """

    data: bool = True
    statistical: bool = False
    relational: bool = False
    vector: bool = False
    contour: bool = False
    auxiliary: bool = True


_DATA_ONLY = FamilyToggles()
DEFAULT_TOGGLES: dict[CanonicalFamily, FamilyToggles] = {
    CanonicalFamily.MIX: _DATA_ONLY,
    CanonicalFamily.THREE_D: _DATA_ONLY,
    CanonicalFamily.MULTI_AXES: _DATA_ONLY,
    CanonicalFamily.RADAR: _DATA_ONLY,
    CanonicalFamily.ROSE: _DATA_ONLY,
    CanonicalFamily.CONTOUR: FamilyToggles(data=False, contour=True),
    CanonicalFamily.QUIVER: FamilyToggles(data=False, vector=True),
    CanonicalFamily.BOXPLOT: FamilyToggles(data=False, statistical=True),
    CanonicalFamily.PIE: _DATA_ONLY,
    CanonicalFamily.HEATMAP: _DATA_ONLY,
    CanonicalFamily.ERROR: _DATA_ONLY,
    CanonicalFamily.RING: _DATA_ONLY,
    CanonicalFamily.VIOLIN: FamilyToggles(data=False, statistical=True),
    CanonicalFamily.TREEMAP: FamilyToggles(data=False, relational=True),
    CanonicalFamily.BAR: _DATA_ONLY,
    CanonicalFamily.LINE: _DATA_ONLY,
    CanonicalFamily.SCATTER: _DATA_ONLY,
    CanonicalFamily.GRAPH: FamilyToggles(data=False, relational=True),
    CanonicalFamily.HISTOGRAM: _DATA_ONLY,
    CanonicalFamily.DENSITY: _DATA_ONLY,
}


@dataclass(frozen=True)
class RewardConfig:
    beta: float = 0.5
    gate_bonus: float = 3.0
    format_penalty: float = -2.0
    exec_success: float = 0.5
    exec_failure: float = -1.0
    treemap_tol: float = 0.02
    think_open: str = "<think>"
    think_close: str = "</think>"
    toggles: Mapping[CanonicalFamily, FamilyToggles] = field(
        default_factory=lambda: dict(DEFAULT_TOGGLES)
    )

    def __post_init__(self):
        missing = [f.value for f in CanonicalFamily if f not in self.toggles]
        if missing:
            raise ValueError(f"toggle table missing families: {missing}")

    @classmethod
    def from_dict(cls, data: dict) -> "RewardConfig":
        """Build a config from a document, merging partial overrides over defaults."""
        kwargs = {}
        for name in ("beta", "gate_bonus", "format_penalty", "exec_success", "exec_failure", "treemap_tol"):
            if name in data:
                kwargs[name] = float(data[name])
        for name in ("think_open", "think_close"):
            if name in data:
                kwargs[name] = str(data[name])
        toggles = dict(DEFAULT_TOGGLES)
        for family_name, overrides in (data.get("toggles") or {}).items():
            family = CanonicalFamily(family_name)
            toggles[family] = replace(toggles[family], **{k: bool(v) for k, v in overrides.items()})
        return cls(toggles=toggles, **kwargs)


DEFAULT_CONFIG = RewardConfig()

_FENCE_RE = re.compile(r"```[^\n`]*\n?(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class SemanticBreakdown:
    gate_passed: bool
    gate: float
    coord: float | None
    domain: float | None
    series: float | None
    data: float | None
    subtotal: float

    def to_dict(self) -> dict:
        return {
            "gate_passed": self.gate_passed,
            "gate": self.gate,
            "coord": self.coord,
            "domain": self.domain,
            "series": self.series,
            "data": self.data,
            "subtotal": self.subtotal,
        }


@dataclass(frozen=True)
class CodeBreakdown:
    statistical: float | None
    relational: float | None
    vector: float | None
    auxiliary: float | None
    subtotal: float

    def to_dict(self) -> dict:
        return {
            "statistical": self.statistical,
            "relational": self.relational,
            "vector": self.vector,
            "auxiliary": self.auxiliary,
            "subtotal": self.subtotal,
        }


@dataclass(frozen=True)
class RewardBreakdown:
    format: float
    execution: float
    semantic: SemanticBreakdown
    code: CodeBreakdown
    total: float

    def to_dict(self) -> dict:
        return {
            "format": self.format,
            "execution": self.execution,
            "semantic": self.semantic.to_dict(),
            "code": self.code.to_dict(),
            "total": self.total,
        }


@dataclass(frozen=True)
class ScoreResult:
    breakdown: RewardBreakdown
    diagnostics: tuple[str, ...] = ()


_ZERO_SEMANTIC = SemanticBreakdown(
    gate_passed=False, gate=0.0, coord=None, domain=None, series=None, data=None, subtotal=0.0
)
_ZERO_CODE = CodeBreakdown(statistical=None, relational=None, vector=None, auxiliary=None, subtotal=0.0)


def format_reward(text: str, cfg: RewardConfig = DEFAULT_CONFIG) -> float:
    """0 for exactly one think block followed by an answer with a fenced code
    block, else the format penalty."""
    open_tok, close_tok = cfg.think_open, cfg.think_close
    if text.count(open_tok) != 1 or text.count(close_tok) != 1:
        return cfg.format_penalty
    if not text.lstrip().startswith(open_tok):
        return cfg.format_penalty
    open_at = text.find(open_tok)
    close_at = text.find(close_tok)
    if close_at < open_at:
        return cfg.format_penalty
    answer = text[close_at + len(close_tok) :]
    if not answer.strip():
        return cfg.format_penalty
    if not _FENCE_RE.search(answer):
        return cfg.format_penalty
    return 0.0


def extract_code_block(text: str, cfg: RewardConfig = DEFAULT_CONFIG) -> str:
    """The last fenced code block of the answer region (whole text as fallback)."""
    close_at = text.find(cfg.think_close)
    region = text[close_at + len(cfg.think_close) :] if close_at >= 0 else text
    blocks = _FENCE_RE.findall(region) or _FENCE_RE.findall(text)
    return blocks[-1] if blocks else ""


def execution_reward(report: ExecutionReport, cfg: RewardConfig = DEFAULT_CONFIG) -> float:
    return cfg.exec_success if report.status is ExecStatus.OK else cfg.exec_failure


def topology_gate(ref: ChartSpec, gen: ChartSpec) -> bool:
    """Exact agreement on chart type, subplot grid, and panel count."""
    rt, gt = ref.semantic.topology, gen.semantic.topology
    return (
        rt.chart_type is gt.chart_type
        and tuple(rt.layout) == tuple(gt.layout)
        and rt.panel_count == gt.panel_count
    )


def _domain_score(ref_dom: Domain, gen_dom: Domain | None) -> float:
    if gen_dom is None or gen_dom.kind is not ref_dom.kind:
        return 0.0
    if ref_dom.kind is DomainKind.NUMERIC:
        return range_iou((ref_dom.min, ref_dom.max), (gen_dom.min, gen_dom.max))
    return set_jaccard(ref_dom.values, gen_dom.values)


def _flatten(grid) -> list[float]:
    return [v for row in grid for v in row]


def _data_score(ref_data: DataRepr, gen_data: DataRepr) -> float | None:
    """Per-panel data agreement; None when the reference carries no data."""
    if ref_data.kind is DataKind.NONE:
        return None
    if ref_data.kind is DataKind.FUNCTION:
        if gen_data.kind is not DataKind.FUNCTION:
            return 0.0
        return norm_edit_similarity(ref_data.expr, gen_data.expr)
    if ref_data.kind is DataKind.MATRIX:
        if gen_data.kind is not DataKind.MATRIX:
            return 0.0
        return numeric_alignment(_flatten(ref_data.grid), _flatten(gen_data.grid))
    # explicit: compare y-series index-aligned (x ranges are the domain's job)
    ref_rows = [row for row in (ref_data.ys or ()) if len(row) > 0]
    if not ref_rows:
        return None
    if gen_data.kind is not DataKind.EXPLICIT:
        return 0.0
    gen_rows = list(gen_data.ys or ())
    scores = []
    for i, row in enumerate(ref_rows):
        if i < len(gen_rows) and len(gen_rows[i]) > 0:
            scores.append(numeric_alignment(row, gen_rows[i]))
        else:
            scores.append(0.0)
    return sum(scores) / len(scores)


def _mean_or_none(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def semantic_reward(ref: ChartSpec, gen: ChartSpec, cfg: RewardConfig = DEFAULT_CONFIG) -> SemanticBreakdown:
    """Gate on topology, then average per-panel component scores.

    Component scores are averaged per component across panels so the
    subtotal does not scale with the layout.  A component no panel
    instantiates stays None and contributes nothing.
    """
    for which, spec in (("reference", ref), ("generated", gen)):
        violations = validate(spec)
        if violations:
            raise InvalidSpec(which, violations)
    if not topology_gate(ref, gen):
        return _ZERO_SEMANTIC
    toggles = cfg.toggles[ref.family]
    coord_scores: list[float] = []
    domain_scores: list[float] = []
    series_scores: list[float] = []
    data_scores: list[float] = []
    for ref_panel, gen_panel in zip(ref.semantic.panels, gen.semantic.panels):
        coord_scores.append(1.0 if ref_panel.coord is gen_panel.coord else 0.0)
        axes = []
        for ref_dom, gen_dom in (
            (ref_panel.x_domain, gen_panel.x_domain),
            (ref_panel.y_domain, gen_panel.y_domain),
        ):
            if ref_dom is not None:
                axes.append(_domain_score(ref_dom, gen_dom))
        if axes:
            domain_scores.append(sum(axes) / len(axes))
        series_scores.append(set_jaccard(ref_panel.series, gen_panel.series))
        if toggles.data:
            score = _data_score(ref_panel.data, gen_panel.data)
            if score is not None:
                data_scores.append(score)
    coord = _mean_or_none(coord_scores)
    domain = _mean_or_none(domain_scores)
    series = _mean_or_none(series_scores)
    data = _mean_or_none(data_scores)
    subtotal = cfg.gate_bonus + sum(v for v in (coord, domain, series, data) if v is not None)
    return SemanticBreakdown(
        gate_passed=True,
        gate=cfg.gate_bonus,
        coord=coord,
        domain=domain,
        series=series,
        data=data,
        subtotal=subtotal,
    )


def _section_score(name, ref_section, gen_section, scorer, diagnostics: list[str]):
    """None when the reference lacks the section, 0 when only the candidate does."""
    if ref_section is None:
        diagnostics.append(f"{name}: reference section absent, component not scored")
        return None
    if gen_section is None:
        diagnostics.append(f"{name}: missing in generated spec, scored 0")
        return 0.0
    return scorer(ref_section, gen_section)


def _relational_score(ref_rel, gen_rel, tol: float) -> float:
    if ref_rel.kind != gen_rel.kind:
        return 0.0
    if ref_rel.kind == "treemap":
        return relational_f1(ref_rel.leaves or (), gen_rel.leaves or (), tol)
    return relational_f1(ref_rel.edges or (), gen_rel.edges or ())


def _auxiliary_aggregate(ref_aux, gen_aux) -> float:
    text, position, color = auxiliary_scores(ref_aux, gen_aux)
    parts = []
    if ref_aux.texts:
        parts.extend((text, position))
    if ref_aux.colors:
        parts.append(color)
    return sum(parts) / len(parts) if parts else 1.0


def code_reward(
    ref: ChartSpec, gen: ChartSpec, cfg: RewardConfig = DEFAULT_CONFIG
) -> tuple[CodeBreakdown, list[str]]:
    """Family-dispatched code metrics plus the shared auxiliary component.

    The contour level-set score reports through the breakdown's vector slot
    (level-set recovery is the vector-structure metric for contour charts);
    if a custom config toggles both, the true vector field wins.
    """
    toggles = cfg.toggles[ref.family]
    diagnostics: list[str] = []
    statistical = relational = vector = auxiliary = None
    if toggles.statistical:
        statistical = _section_score(
            "statistical",
            ref.code.statistical,
            gen.code.statistical,
            lambda r, g: stat_l2_score(r, g),
            diagnostics,
        )
    if toggles.relational:
        relational = _section_score(
            "relational",
            ref.code.relational,
            gen.code.relational,
            lambda r, g: _relational_score(r, g, cfg.treemap_tol),
            diagnostics,
        )
    if toggles.vector:
        vector = _section_score(
            "vector", ref.code.vector, gen.code.vector, vector_cosine_score, diagnostics
        )
    if toggles.contour:
        if toggles.vector and vector is not None:
            diagnostics.append("contour: vector component already scored, level sets skipped")
        else:
            vector = _section_score(
                "contour",
                ref.code.contour_levels,
                gen.code.contour_levels,
                lambda r, g: level_set_similarity(r, g),
                diagnostics,
            )
    if toggles.auxiliary:
        auxiliary = _section_score(
            "auxiliary", ref.code.auxiliary, gen.code.auxiliary, _auxiliary_aggregate, diagnostics
        )
    subtotal = sum(v for v in (statistical, relational, vector, auxiliary) if v is not None)
    return (
        CodeBreakdown(
            statistical=statistical,
            relational=relational,
            vector=vector,
            auxiliary=auxiliary,
            subtotal=subtotal,
        ),
        diagnostics,
    )


def evaluate_candidate(
    response_text: str,
    report: ExecutionReport,
    ref: ChartSpec,
    gen: ChartSpec | None = None,
    cfg: RewardConfig = DEFAULT_CONFIG,
) -> ScoreResult:
    """Full staircase scoring; never raises on degenerate candidate input.

    ``gen`` defaults to the report's runtime spec.  Failed execution, an
    absent generated spec, or an invalid one all forfeit the semantic and
    code phases; an invalid reference zeroes them too (with a diagnostic)
    rather than raising, so batch scoring never crashes mid-stream.
    """
    diagnostics: list[str] = []
    fmt = format_reward(response_text, cfg)
    exe = execution_reward(report, cfg)
    if gen is None:
        gen = report.runtime_spec
    semantic = _ZERO_SEMANTIC
    code = _ZERO_CODE
    scoreable = report.status is ExecStatus.OK and gen is not None
    if scoreable and validate(ref):
        diagnostics.append("reference spec invalid, similarity phases skipped")
        scoreable = False
    if scoreable and validate(gen):
        diagnostics.append("generated spec invalid, treated as absent")
        scoreable = False
    if scoreable:
        semantic = semantic_reward(ref, gen, cfg)
        if semantic.gate_passed:
            code, code_diags = code_reward(ref, gen, cfg)
            diagnostics.extend(code_diags)
        else:
            diagnostics.append("topology gate failed, code phase skipped")
    total = fmt + exe + semantic.subtotal + cfg.beta * code.subtotal
    breakdown = RewardBreakdown(format=fmt, execution=exe, semantic=semantic, code=code, total=total)
    return ScoreResult(breakdown=breakdown, diagnostics=tuple(diagnostics))


def total_reward(
    response_text: str,
    report: ExecutionReport,
    ref: ChartSpec,
    gen: ChartSpec | None = None,
    cfg: RewardConfig = DEFAULT_CONFIG,
) -> RewardBreakdown:
    """The composite reward R = R_format + R_exec + R_semantic + beta * R_code."""
    return evaluate_candidate(response_text, report, ref, gen, cfg).breakdown


def max_total_reward(ref: ChartSpec, cfg: RewardConfig = DEFAULT_CONFIG) -> float:
    """The ceiling an exact reproduction of ``ref`` earns under ``cfg``.

    Counts which components the reference instantiates; each scores 1.0 on an
    identical candidate with a well-formed response and clean execution.
    """
    toggles = cfg.toggles[ref.family]
    panels = ref.semantic.panels
    n_sem = 2  # coord and series are always live
    if any(p.x_domain is not None or p.y_domain is not None for p in panels):
        n_sem += 1
    if toggles.data and any(_data_instantiable(p.data) for p in panels):
        n_sem += 1
    n_code = 0
    if toggles.statistical and ref.code.statistical is not None:
        n_code += 1
    if toggles.relational and ref.code.relational is not None:
        n_code += 1
    if toggles.vector and ref.code.vector is not None:
        n_code += 1
    elif toggles.contour and ref.code.contour_levels is not None:
        n_code += 1
    if toggles.auxiliary and ref.code.auxiliary is not None:
        n_code += 1
    return cfg.exec_success + cfg.gate_bonus + n_sem + cfg.beta * n_code


def _data_instantiable(data: DataRepr) -> bool:
    if data.kind in (DataKind.FUNCTION, DataKind.MATRIX):
        return True
    if data.kind is DataKind.EXPLICIT:
        return any(len(row) > 0 for row in (data.ys or ()))
    return False
