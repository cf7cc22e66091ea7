"""Canonical chart families and the source-label consolidation table."""

from __future__ import annotations

from enum import Enum


class CanonicalFamily(str, Enum):
    """The 20 canonical chart families."""

    MIX = "mix"
    THREE_D = "3d"
    MULTI_AXES = "multi_axes"
    RADAR = "radar"
    ROSE = "rose"
    CONTOUR = "contour"
    QUIVER = "quiver"
    BOXPLOT = "boxplot"
    PIE = "pie"
    HEATMAP = "heatmap"
    ERROR = "error"
    RING = "ring"
    VIOLIN = "violin"
    TREEMAP = "treemap"
    BAR = "bar"
    LINE = "line"
    SCATTER = "scatter"
    GRAPH = "graph"
    HISTOGRAM = "histogram"
    DENSITY = "density"

    def __str__(self) -> str:
        return self.value


class UnknownLabel(ValueError):
    """Raised when a source label has no entry in the consolidation table."""


# Source label -> canonical family. Aliases merge chart types whose structure
# is identical for scoring purposes (area is a filled line, bubble is a sized
# scatter, ring is kept distinct from pie because its code spec differs).
DEFAULT_SOURCE_MAPPING: dict[str, CanonicalFamily] = {
    "combination": CanonicalFamily.MIX,
    "inset": CanonicalFamily.MIX,
    "3d": CanonicalFamily.THREE_D,
    "multi_axes": CanonicalFamily.MULTI_AXES,
    "radar": CanonicalFamily.RADAR,
    "rose": CanonicalFamily.ROSE,
    "contour": CanonicalFamily.CONTOUR,
    "quiver": CanonicalFamily.QUIVER,
    "boxplot": CanonicalFamily.BOXPLOT,
    "pie": CanonicalFamily.PIE,
    "heatmap": CanonicalFamily.HEATMAP,
    "error bar": CanonicalFamily.ERROR,
    "ring": CanonicalFamily.RING,
    "violin": CanonicalFamily.VIOLIN,
    "treemap": CanonicalFamily.TREEMAP,
    "bar": CanonicalFamily.BAR,
    "bar_num": CanonicalFamily.BAR,
    "line": CanonicalFamily.LINE,
    "area": CanonicalFamily.LINE,
    "scatter": CanonicalFamily.SCATTER,
    "bubble": CanonicalFamily.SCATTER,
    "graph": CanonicalFamily.GRAPH,
    "histogram": CanonicalFamily.HISTOGRAM,
    "density": CanonicalFamily.DENSITY,
}


def canonical_family(
    raw_label: str, mapping: dict[str, CanonicalFamily] | None = None
) -> CanonicalFamily:
    """Map a source dataset label onto its canonical family.

    The built-in table can be extended or overridden via ``mapping`` (merged
    over the defaults), which is how config files add new source aliases.
    """
    table = DEFAULT_SOURCE_MAPPING
    if mapping:
        table = {**DEFAULT_SOURCE_MAPPING, **mapping}
    try:
        return table[raw_label]
    except KeyError:
        raise UnknownLabel(f"no canonical family for source label {raw_label!r}") from None
