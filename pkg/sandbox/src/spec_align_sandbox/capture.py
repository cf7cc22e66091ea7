"""Figure-side capture: plotting shims plus post-hoc introspection.

This module runs inside the worker process only.  ``install`` wraps the
matplotlib primitives whose numeric arguments are lost once the artists are
rasterized (wedge fractions, box statistics, vector fields, contour levels,
graph structure); ``snapshot`` then walks the finished figure and assembles
a spec document as a plain dict in the canonical schema shape.

Everything emitted here must satisfy the schema invariants: status ok
promises a valid runtime spec, so non-finite values are scrubbed, labels
are deduplicated, and text positions are clamped into the unit square.
"""

from __future__ import annotations

import math

import numpy as np

SPEC_VERSION = 1

# Candidate data can be arbitrarily large; rows are strided down to this
# many samples so a report line stays a sane size.
MAX_ROW_SAMPLES = 10_000

CANONICAL_FAMILIES = {
    "mix", "3d", "multi_axes", "radar", "rose", "contour", "quiver",
    "boxplot", "pie", "heatmap", "error", "ring", "violin", "treemap",
    "bar", "line", "scatter", "graph", "histogram", "density",
}

# Source-label aliases from the consolidation table; hints arrive either
# canonical or raw.
SOURCE_ALIASES = {
    "combination": "mix",
    "inset": "mix",
    "error bar": "error",
    "bar_num": "bar",
    "area": "line",
    "bubble": "scatter",
}


class CaptureError(RuntimeError):
    """The finished figure cannot be turned into a spec document."""


class Store:
    """Per-run capture state, keyed by the axes each call drew into."""

    def __init__(self):
        self.pies: list[tuple[int, list[str], list[float], bool]] = []
        self.boxes: list[tuple[int, list[tuple[str | None, list[float]]]]] = []
        self.violins: list[tuple[int, list[tuple[str | None, list[float]]]]] = []
        self.quivers: list[tuple[int, list, list]] = []
        self.contours: list[tuple[int, list[float]]] = []
        self.graphs: list[tuple[int, list[str], list[list[str]]]] = []


def _finite(value) -> bool:
    try:
        return math.isfinite(float(value))
    except (TypeError, ValueError):
        return False


def _clean_row(values) -> list[float]:
    row = []
    for v in np.asarray(values, dtype=float).ravel():
        if math.isfinite(v):
            row.append(float(v))
    return row


def _stride(row: list[float]) -> list[float]:
    if len(row) <= MAX_ROW_SAMPLES:
        return row
    idx = np.linspace(0, len(row) - 1, MAX_ROW_SAMPLES).round().astype(int)
    return [row[i] for i in idx]


def _groups(data) -> list[np.ndarray]:
    """Split boxplot/violin input the way matplotlib does.

    A 2D array holds one dataset per column; a sequence of iterables holds
    one dataset per element; anything else is a single dataset.
    """
    if isinstance(data, np.ndarray) and data.ndim == 2:
        arr = data.astype(float)
        return [arr[:, j] for j in range(arr.shape[1])]
    try:
        items = list(data)
    except TypeError:
        return [np.asarray([data], dtype=float)]
    if items and all(np.iterable(v) and not isinstance(v, str) for v in items):
        return [np.asarray(v, dtype=float).ravel() for v in items]
    return [np.asarray(items, dtype=float).ravel()]


def _five_number(values: np.ndarray) -> list[float] | None:
    values = values[np.isfinite(values)]
    if values.size == 0:
        return None
    # quartile convention: linear interpolation between order statistics
    return [float(v) for v in np.percentile(values, [0, 25, 50, 75, 100])]


def _summaries(data, labels) -> list[tuple[str | None, list[float]]]:
    out = []
    for i, group in enumerate(_groups(data)):
        stats = _five_number(group)
        if stats is None:
            continue
        label = None
        if labels is not None and i < len(labels):
            label = str(labels[i])
        out.append((label, stats))
    return out


# ---------------------------------------------------------------------------
# shims

def install() -> Store:
    """Wrap the capture-relevant plotting methods; returns the store."""
    from matplotlib.axes import Axes

    store = Store()

    orig_pie = Axes.pie

    def pie(self, x, *args, **kwargs):
        result = orig_pie(self, x, *args, **kwargs)
        fracs = [float(v) for v in np.asarray(x, dtype=float).ravel()]
        total = sum(fracs)
        if total > 1.0:
            fracs = [v / total for v in fracs]
        labels = kwargs.get("labels")
        if labels is None and len(args) >= 2:
            labels = args[1]
        wedgeprops = kwargs.get("wedgeprops") or {}
        width = wedgeprops.get("width")
        ring = width is not None and 0 < width < 1
        names = [str(v) for v in labels] if labels is not None else [str(i + 1) for i in range(len(fracs))]
        store.pies.append((id(self), names[: len(fracs)], fracs, ring))
        return result

    orig_boxplot = Axes.boxplot

    def boxplot(self, x, *args, **kwargs):
        result = orig_boxplot(self, x, *args, **kwargs)
        labels = kwargs.get("tick_labels") or kwargs.get("labels")
        store.boxes.append((id(self), _summaries(x, labels)))
        return result

    orig_violinplot = Axes.violinplot

    def violinplot(self, dataset, *args, **kwargs):
        result = orig_violinplot(self, dataset, *args, **kwargs)
        store.violins.append((id(self), _summaries(dataset, None)))
        return result

    orig_quiver = Axes.quiver

    def quiver(self, *args, **kwargs):
        result = orig_quiver(self, *args, **kwargs)
        parsed = _parse_quiver_args(args)
        if parsed is not None:
            store.quivers.append((id(self), parsed[0], parsed[1]))
        return result

    def _capture_contour(orig):
        def method(self, *args, **kwargs):
            cs = orig(self, *args, **kwargs)
            levels = [float(v) for v in np.asarray(cs.levels).ravel() if math.isfinite(v)]
            store.contours.append((id(self), levels))
            return cs

        return method

    Axes.pie = pie
    Axes.boxplot = boxplot
    Axes.violinplot = violinplot
    Axes.quiver = quiver
    Axes.contour = _capture_contour(Axes.contour)
    Axes.contourf = _capture_contour(Axes.contourf)

    _install_graph_hook(store)
    return store


def _parse_quiver_args(args):
    """Recover anchors and components from quiver positional forms.

    Accepted forms are (U, V), (U, V, C), (X, Y, U, V) and (X, Y, U, V, C);
    with no anchor grid matplotlib uses index coordinates, mirrored here.
    """
    try:
        if len(args) in (2, 3):
            U = np.atleast_2d(np.asarray(args[0], dtype=float))
            V = np.atleast_2d(np.asarray(args[1], dtype=float))
            rows, cols = U.shape
            X, Y = np.meshgrid(np.arange(cols, dtype=float), np.arange(rows, dtype=float))
        elif len(args) in (4, 5):
            X = np.asarray(args[0], dtype=float)
            Y = np.asarray(args[1], dtype=float)
            U = np.asarray(args[2], dtype=float)
            V = np.asarray(args[3], dtype=float)
            if X.ndim == 1 and U.ndim == 2:
                X, Y = np.meshgrid(X, Y)
        else:
            return None
    except (TypeError, ValueError):
        return None
    flat = [a.ravel() for a in (X, Y, U, V)]
    count = min(len(a) for a in flat)
    anchors, components = [], []
    for i in range(count):
        x, y, u, v = (float(a[i]) for a in flat)
        if all(math.isfinite(c) for c in (x, y, u, v)):
            anchors.append([x, y])
            components.append([u, v])
    return anchors, components


def _install_graph_hook(store: Store) -> None:
    try:
        import networkx as nx
        from networkx.drawing import nx_pylab
    except ImportError:
        return

    orig_draw = nx_pylab.draw_networkx

    def draw_networkx(G, *args, **kwargs):
        result = orig_draw(G, *args, **kwargs)
        ax = kwargs.get("ax")
        if ax is None:
            import matplotlib.pyplot as plt

            ax = plt.gca()
        nodes = [str(n) for n in G.nodes()]
        edges = [[str(u), str(v)] for u, v in G.edges()]
        store.graphs.append((id(ax), nodes, edges))
        return result

    nx_pylab.draw_networkx = draw_networkx
    nx.draw_networkx = draw_networkx


# ---------------------------------------------------------------------------
# introspection

def _pick_figure():
    import matplotlib.pyplot as plt

    nums = plt.get_fignums()
    if not nums:
        raise CaptureError("no figure produced")
    # most populated figure wins, earliest created breaks ties
    return max((plt.figure(n) for n in nums), key=lambda f: (len(f.axes), -f.number))


def _panel_axes(fig) -> list:
    axes = [ax for ax in fig.axes if ax.get_label() != "<colorbar>"]
    if not axes:
        raise CaptureError("figure has no axes")
    return axes


def _layout(fig, axes) -> list[int]:
    rows = cols = 1
    for ax in axes:
        getter = getattr(ax, "get_subplotspec", None)
        spec = getter() if getter is not None else None
        if spec is not None:
            rows, cols = spec.get_gridspec().get_geometry()[:2]
            break
    if rows * cols < len(axes):
        rows, cols = 1, len(axes)
    return [int(rows), int(cols)]


def _coord_kind(ax) -> str:
    name = getattr(ax, "name", "rectilinear")
    if name == "polar":
        return "polar"
    if name == "3d":
        return "3d"
    return "cartesian"


def _categorical_values(axis) -> list[str] | None:
    units = axis.get_units()
    mapping = getattr(units, "_mapping", None)
    if not isinstance(mapping, dict) or not mapping:
        return None
    values = [str(k) for k, _ in sorted(mapping.items(), key=lambda kv: kv[1])]
    if any(v == "" for v in values) or len(set(values)) != len(values):
        return None
    return values


def _domain(ax, which: str):
    if not ax.axison:
        return None
    axis = ax.xaxis if which == "x" else ax.yaxis
    values = _categorical_values(axis)
    if values is not None:
        return {"kind": "categorical", "values": values}
    lo, hi = ax.get_xlim() if which == "x" else ax.get_ylim()
    if not (_finite(lo) and _finite(hi)):
        return None
    if lo > hi:
        lo, hi = hi, lo
    return {"kind": "numeric", "min": float(lo), "max": float(hi)}


def _series_labels(ax) -> list[str]:
    try:
        _, labels = ax.get_legend_handles_labels()
    except Exception:
        return []
    out = []
    for label in labels:
        if label and not label.startswith("_") and label not in out:
            out.append(label)
    return out


def _line_rows(ax):
    pairs = []
    for line in ax.lines:
        try:
            xs = np.asarray(line.get_xdata(), dtype=float).ravel()
            ys = np.asarray(line.get_ydata(), dtype=float).ravel()
        except (TypeError, ValueError):
            continue
        pairs.append((xs, ys))
    return pairs


def _explicit_data(ax):
    pairs = _line_rows(ax)
    for container in getattr(ax, "containers", []):
        values = getattr(container, "datavalues", None)
        if values is not None:
            try:
                pairs.append((None, np.asarray(values, dtype=float).ravel()))
            except (TypeError, ValueError):
                continue
    from matplotlib.collections import PathCollection

    for coll in ax.collections:
        if isinstance(coll, PathCollection):
            offsets = np.asarray(coll.get_offsets(), dtype=float)
            if offsets.ndim == 2 and offsets.shape[1] == 2:
                pairs.append((offsets[:, 0], offsets[:, 1]))
    rows = []
    x_candidates = []
    for xs, ys in pairs:
        row = _stride(_clean_row(ys))
        if not row:
            continue
        rows.append(row)
        if xs is not None and len(xs) == len(ys) and np.isfinite(xs).all():
            x_candidates.append(_stride([float(v) for v in xs]))
        else:
            x_candidates.append(None)
    if not rows:
        return None
    x = x_candidates[0]
    if x is not None and all(
        c is not None and len(c) == len(x) and c == x for c in x_candidates
    ) and all(len(r) == len(x) for r in rows):
        return {"kind": "explicit", "x": x, "ys": rows}
    return {"kind": "explicit", "x": None, "ys": rows}


def _matrix_data(ax):
    for image in ax.images:
        grid = np.asarray(np.ma.filled(image.get_array(), np.nan), dtype=float)
        if grid.ndim != 2 or grid.size == 0:
            continue
        if not np.isfinite(grid).all():
            continue
        return {"kind": "matrix", "grid": [[float(v) for v in row] for row in grid]}
    return None


def _panel_data(ax, ax_id: int, store: Store):
    if any(b[0] == ax_id for b in store.boxes) or any(v[0] == ax_id for v in store.violins):
        return {"kind": "none"}, None
    for pid, names, fracs, _ in store.pies:
        if pid == ax_id:
            return {"kind": "explicit", "x": None, "ys": [fracs]}, _dedupe(names)
    matrix = _matrix_data(ax)
    if matrix is not None:
        return matrix, None
    explicit = _explicit_data(ax)
    if explicit is not None:
        return explicit, None
    return {"kind": "none"}, None


def _dedupe(labels: list[str]) -> list[str]:
    out, seen = [], set()
    for label in labels:
        name, k = label, 1
        while name in seen:
            k += 1
            name = f"{label} ({k})"
        seen.add(name)
        out.append(name)
    return out


def _axes_fraction(ax, text):
    pos = text.get_position()
    try:
        display = text.get_transform().transform(pos)
        fx, fy = ax.transAxes.inverted().transform(display)
    except Exception:
        return None
    if not (_finite(fx) and _finite(fy)):
        return None
    return min(1.0, max(0.0, float(fx))), min(1.0, max(0.0, float(fy)))


def _texts(fig, axes) -> list[list]:
    out = []

    def add(text, x, y):
        if text:
            out.append([str(text), float(x), float(y)])

    suptitle = getattr(fig, "_suptitle", None)
    if suptitle is not None and suptitle.get_text():
        sx, sy = suptitle.get_position()
        add(suptitle.get_text(), min(1.0, max(0.0, sx)), min(1.0, max(0.0, sy)))
    for ax in axes:
        add(ax.get_title(), 0.5, 1.0)
        add(ax.get_xlabel(), 0.5, 0.0)
        add(ax.get_ylabel(), 0.0, 0.5)
        for text in ax.texts:
            spot = _axes_fraction(ax, text)
            if spot is not None:
                add(text.get_text(), spot[0], spot[1])
    return out


def _colors(axes) -> list[str]:
    from matplotlib.colors import to_hex

    out: list[str] = []

    def add(value):
        try:
            color = to_hex(value).lower()[:7]
        except (TypeError, ValueError):
            return
        if len(color) == 7 and color not in out:
            out.append(color)

    def add_rows(values):
        arr = np.atleast_2d(np.asarray(values))
        if arr.size:
            add(tuple(arr[0]))

    for ax in axes:
        for line in ax.lines:
            add(line.get_color())
        for container in getattr(ax, "containers", []):
            patches = getattr(container, "patches", None)
            if patches:
                add(patches[0].get_facecolor())
        for patch in ax.patches:
            add(patch.get_facecolor())
        for coll in ax.collections:
            try:
                face = coll.get_facecolor()
            except (AttributeError, TypeError, ValueError):
                continue
            if face is not None and len(face):
                add_rows(face)
    return out


def _twin_pair(axes) -> bool:
    spots = [tuple(round(v, 6) for v in ax.get_position().bounds) for ax in axes]
    return len(spots) != len(set(spots))


def _infer_family(axes, store: Store) -> str:
    if len(axes) > 1:
        return "multi_axes" if _twin_pair(axes) else "mix"
    ax = axes[0]
    ax_id = id(ax)
    if any(g[0] == ax_id for g in store.graphs):
        return "graph"
    if any(q[0] == ax_id for q in store.quivers):
        return "quiver"
    if any(c[0] == ax_id for c in store.contours):
        return "contour"
    if any(b[0] == ax_id for b in store.boxes):
        return "boxplot"
    if any(v[0] == ax_id for v in store.violins):
        return "violin"
    for pid, _, _, ring in store.pies:
        if pid == ax_id:
            return "ring" if ring else "pie"
    coord = _coord_kind(ax)
    if coord == "3d":
        return "3d"
    if coord == "polar":
        return "rose" if getattr(ax, "containers", []) else "radar"
    if ax.images:
        return "heatmap"
    if getattr(ax, "containers", []):
        return "bar"
    from matplotlib.collections import PathCollection

    if any(isinstance(c, PathCollection) for c in ax.collections):
        return "scatter"
    return "line"


def _resolve_family(hint: str | None, axes, store: Store) -> str:
    if hint:
        label = hint.strip().lower()
        if label in CANONICAL_FAMILIES:
            return label
        if label in SOURCE_ALIASES:
            return SOURCE_ALIASES[label]
    return _infer_family(axes, store)


def _statistical(store: Store):
    entries = []
    for _, groups in (*store.boxes, *store.violins):
        for label, stats in groups:
            entries.append((label, stats))
    if not entries:
        return None
    out, seen = [], set()
    for i, (label, stats) in enumerate(entries):
        name = label if label is not None else str(i + 1)
        k = 1
        while name in seen:
            k += 1
            name = f"{label if label is not None else i + 1} ({k})"
        seen.add(name)
        out.append([name, stats])
    return out


def _relational(store: Store):
    for _, nodes, edges in store.graphs:
        if nodes and len(set(nodes)) == len(nodes) and all(n != "" for n in nodes):
            return {"kind": "graph", "nodes": nodes, "edges": edges}
    for _, names, fracs, _ in store.pies:
        if not fracs or any(not 0 <= v <= 1 for v in fracs):
            continue
        leaves = [[name, frac] for name, frac in zip(names, fracs)]
        remainder = 1.0 - sum(fracs)
        # a pie drawn with fractions below one leaves a gap wedge; the spec
        # needs ratios that sum to one, so the gap becomes its own leaf
        if remainder > 1e-9:
            leaves.append(["(gap)", remainder])
        elif abs(remainder) > 1e-6:
            continue
        return {"kind": "treemap", "leaves": leaves}
    return None


def _vector(store: Store):
    anchors, components = [], []
    for _, a, c in store.quivers:
        anchors.extend(a)
        components.extend(c)
    if not anchors:
        return None
    return {"anchors": anchors, "components": components}


def _contour_levels(store: Store):
    for _, levels in store.contours:
        if levels and all(levels[i] <= levels[i + 1] for i in range(len(levels) - 1)):
            return levels
    return None


def snapshot(store: Store, family_hint: str | None) -> dict:
    """Assemble the spec document for the figure the candidate drew.

    Raises CaptureError when there is no figure or no axes to describe.
    """
    fig = _pick_figure()
    axes = _panel_axes(fig)
    family = _resolve_family(family_hint, axes, store)

    panels = []
    for ax in axes:
        data, forced_series = _panel_data(ax, id(ax), store)
        panels.append(
            {
                "coord": _coord_kind(ax),
                "x_domain": _domain(ax, "x"),
                "y_domain": _domain(ax, "y"),
                "series": forced_series if forced_series is not None else _series_labels(ax),
                "data": data,
            }
        )

    return {
        "version": SPEC_VERSION,
        "family": family,
        "semantic": {
            "topology": {
                "chart_type": family,
                "layout": _layout(fig, axes),
                "panel_count": len(axes),
            },
            "panels": panels,
        },
        "code": {
            "statistical": _statistical(store),
            "relational": _relational(store),
            "vector": _vector(store),
            "contour_levels": _contour_levels(store),
            "auxiliary": {"texts": _texts(fig, axes), "colors": _colors(axes)},
        },
    }
