"""Shared fixtures and builders for the test suite.

Everything in here is deterministic: identity specs are built from literals,
random specs take an explicit ``random.Random``, and the synthetic curation
pool reproduces the published per-family availability figures exactly.
"""

from __future__ import annotations

import itertools
import json
import random
from pathlib import Path

from spec_align.chartspec import (
    Auxiliary,
    ChartSpec,
    CodeSpec,
    CoordKind,
    DataKind,
    DataRepr,
    Domain,
    PanelSpec,
    Relational,
    SemanticSpec,
    Topology,
    VectorField,
    serialize_spec,
)
from spec_align.curation import CorpusEntry
from spec_align.families import CanonicalFamily as F

# ---------------------------------------------------------------------------
# identity specs, one per family

_AUX = Auxiliary(
    texts=(("sample title", 0.5, 0.95), ("x label", 0.5, 0.02)),
    colors=("#1f77b4", "#ff7f0e"),
)


def _panel(
    coord: CoordKind = CoordKind.CARTESIAN,
    x: Domain | None = None,
    y: Domain | None = None,
    series: tuple[str, ...] = ("s1",),
    data: DataRepr | None = None,
) -> PanelSpec:
    return PanelSpec(
        coord=coord,
        x_domain=x,
        y_domain=y,
        series=series,
        data=data if data is not None else DataRepr.none(),
    )


def _num(lo: float, hi: float) -> Domain:
    return Domain.numeric(lo, hi)


def _cat(*labels: str) -> Domain:
    return Domain.categorical(list(labels))


def _single(family: F, panel: PanelSpec, code: CodeSpec | None = None) -> ChartSpec:
    return ChartSpec(
        family=family,
        semantic=SemanticSpec(
            topology=Topology(chart_type=family, layout=(1, 1), panel_count=1),
            panels=(panel,),
        ),
        code=code if code is not None else CodeSpec(auxiliary=_AUX),
    )


def identity_spec(family: F) -> ChartSpec:
    """A full-featured valid spec for ``family``, stable across runs."""

    if family is F.LINE:
        return _single(
            family,
            _panel(
                x=_num(0.0, 10.0),
                y=_num(0.0, 1.0),
                series=("decay", "ripple"),
                data=DataRepr.function("exp(-x) * cos(3 * x)"),
            ),
        )
    if family is F.BAR:
        return _single(
            family,
            _panel(
                x=_cat("Q1", "Q2", "Q3", "Q4"),
                y=_num(0.0, 50.0),
                series=("revenue",),
                data=DataRepr.explicit([[12.0, 18.5, 22.0, 31.0]]),
            ),
        )
    if family is F.SCATTER:
        return _single(
            family,
            _panel(
                x=_num(-1.0, 1.0),
                y=_num(-2.0, 2.0),
                series=("cluster a", "cluster b"),
                data=DataRepr.explicit(
                    [[0.1, 0.4, 0.9], [-0.3, -0.8, -1.2]],
                    x=[-0.5, 0.0, 0.5],
                ),
            ),
        )
    if family is F.HISTOGRAM:
        return _single(
            family,
            _panel(
                x=_num(0.0, 8.0),
                y=_num(0.0, 40.0),
                series=("counts",),
                data=DataRepr.explicit([[3.0, 11.0, 27.0, 35.0, 20.0, 6.0]]),
            ),
        )
    if family is F.DENSITY:
        return _single(
            family,
            _panel(
                x=_num(-4.0, 4.0),
                y=_num(0.0, 0.5),
                series=("kde",),
                data=DataRepr.function("exp(-x**2 / 2) / 2.5066282746310002"),
            ),
        )
    if family is F.HEATMAP:
        return _single(
            family,
            _panel(
                x=_cat("mon", "tue", "wed", "thu"),
                y=_cat("am", "pm", "night"),
                series=(),
                data=DataRepr.matrix(
                    [[1.0, 2.0, 3.0, 4.0], [4.0, 3.0, 2.0, 1.0], [0.5, 1.5, 2.5, 3.5]]
                ),
            ),
        )
    if family is F.ERROR:
        return _single(
            family,
            _panel(
                x=_cat("trial 1", "trial 2", "trial 3"),
                y=_num(0.0, 12.0),
                series=("mean",),
                data=DataRepr.explicit([[4.2, 7.8, 9.1]]),
            ),
        )
    if family is F.PIE:
        return _single(
            family,
            _panel(
                series=("apples", "pears", "plums"),
                data=DataRepr.explicit([[0.45, 0.35, 0.2]]),
            ),
        )
    if family is F.RING:
        return _single(
            family,
            _panel(
                series=("north", "south", "east", "west"),
                data=DataRepr.explicit([[0.25, 0.2, 0.3, 0.25]]),
            ),
        )
    if family is F.MIX:
        return ChartSpec(
            family=family,
            semantic=SemanticSpec(
                topology=Topology(chart_type=F.MIX, layout=(1, 2), panel_count=2),
                panels=(
                    _panel(
                        x=_num(0.0, 6.0),
                        y=_num(-1.0, 1.0),
                        series=("signal",),
                        data=DataRepr.function("sin(x)"),
                    ),
                    _panel(
                        x=_cat("a", "b", "c"),
                        y=_num(0.0, 9.0),
                        series=("level",),
                        data=DataRepr.explicit([[2.0, 5.0, 8.0]]),
                    ),
                ),
            ),
            code=CodeSpec(auxiliary=_AUX),
        )
    if family is F.THREE_D:
        return _single(
            family,
            _panel(
                coord=CoordKind.THREE_D,
                x=_num(-5.0, 5.0),
                y=_num(-5.0, 5.0),
                series=("surface",),
                data=DataRepr.function("sin(sqrt(x**2 + y**2))"),
            ),
        )
    if family is F.MULTI_AXES:
        return _single(
            family,
            _panel(
                x=_num(2000.0, 2020.0),
                y=_num(0.0, 100.0),
                series=("temperature", "rainfall"),
                data=DataRepr.explicit(
                    [[55.0, 61.0, 58.0], [20.0, 35.0, 28.0]],
                    x=[2000.0, 2010.0, 2020.0],
                ),
            ),
        )
    if family is F.RADAR:
        return _single(
            family,
            _panel(
                coord=CoordKind.POLAR,
                x=_cat("speed", "power", "range", "agility"),
                y=_num(0.0, 5.0),
                series=("model x", "model y"),
                data=DataRepr.explicit(
                    [[3.0, 4.0, 2.0, 5.0], [4.0, 2.0, 5.0, 3.0]]
                ),
            ),
        )
    if family is F.ROSE:
        return _single(
            family,
            _panel(
                coord=CoordKind.POLAR,
                x=_num(0.0, 6.283185307179586),
                y=_num(0.0, 10.0),
                series=("wind",),
                data=DataRepr.explicit([[2.0, 6.0, 9.0, 4.0, 1.0, 3.0]]),
            ),
        )
    if family is F.BOXPLOT:
        return _single(
            family,
            _panel(x=_cat("A", "B", "C"), y=_num(0.0, 15.0), series=()),
            code=CodeSpec(
                statistical=(
                    ("A", (2.0, 4.0, 7.0, 9.0, 12.0)),
                    ("B", (1.0, 3.0, 5.0, 8.0, 11.0)),
                    ("C", (3.0, 5.0, 6.0, 9.0, 14.0)),
                ),
                auxiliary=_AUX,
            ),
        )
    if family is F.VIOLIN:
        return _single(
            family,
            _panel(x=_cat("ctrl", "test"), y=_num(-3.0, 3.0), series=()),
            code=CodeSpec(
                statistical=(
                    ("ctrl", (-2.5, -1.0, 0.0, 1.0, 2.5)),
                    ("test", (-1.5, -0.5, 0.5, 1.5, 2.8)),
                ),
                auxiliary=_AUX,
            ),
        )
    if family is F.TREEMAP:
        return _single(
            family,
            _panel(series=()),
            code=CodeSpec(
                relational=Relational.treemap(
                    [("alpha", 0.4), ("beta", 0.35), ("gamma", 0.25)]
                ),
                auxiliary=_AUX,
            ),
        )
    if family is F.GRAPH:
        return _single(
            family,
            _panel(series=()),
            code=CodeSpec(
                relational=Relational.graph(
                    nodes=["hub", "n1", "n2", "n3"],
                    edges=[("hub", "n1"), ("hub", "n2"), ("n2", "n3")],
                ),
                auxiliary=_AUX,
            ),
        )
    if family is F.QUIVER:
        return _single(
            family,
            _panel(x=_num(0.0, 2.0), y=_num(0.0, 2.0), series=()),
            code=CodeSpec(
                vector=VectorField(
                    anchors=((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)),
                    components=((1.0, 0.0), (0.5, 0.5), (0.0, 1.0), (-0.5, 0.5)),
                ),
                auxiliary=_AUX,
            ),
        )
    if family is F.CONTOUR:
        return _single(
            family,
            _panel(x=_num(-3.0, 3.0), y=_num(-3.0, 3.0), series=()),
            code=CodeSpec(
                contour_levels=(-0.5, 0.0, 0.5, 1.0),
                auxiliary=_AUX,
            ),
        )
    raise AssertionError(f"no identity spec for {family}")


# Totals under DEFAULT_CONFIG for a well-formed response, successful
# execution, and gen == ref.  Derived by hand from the component count:
# 0.5 + 3.0 + n_semantic + 0.5 * n_code.
IDENTITY_TOTALS = {
    F.LINE: 8.0,
    F.BAR: 8.0,
    F.SCATTER: 8.0,
    F.HISTOGRAM: 8.0,
    F.DENSITY: 8.0,
    F.HEATMAP: 8.0,
    F.ERROR: 8.0,
    F.MIX: 8.0,
    F.THREE_D: 8.0,
    F.MULTI_AXES: 8.0,
    F.RADAR: 8.0,
    F.ROSE: 8.0,
    F.PIE: 7.0,
    F.RING: 7.0,
    F.BOXPLOT: 7.5,
    F.VIOLIN: 7.5,
    F.TREEMAP: 6.5,
    F.GRAPH: 6.5,
    F.QUIVER: 7.5,
    F.CONTOUR: 7.5,
}


WELL_FORMED_RESPONSE = (
    "<think>plot y = exp(-x) over the requested range</think>\n"
    "Here is the code:\n"
    "```python\n"
    "import numpy as np\n"
    "import matplotlib.pyplot as plt\n"
    "x = np.linspace(0, 10, 100)\n"
    "plt.plot(x, np.exp(-x))\n"
    "plt.show()\n"
    "```\n"
)

MALFORMED_RESPONSE = "just some code:\n```python\nprint('hi')\n```\n"


# ---------------------------------------------------------------------------
# random valid specs

_FAMILIES = list(F)

_EXPRS = ("sin(x)", "exp(-x)", "x**2", "log(x + 1)", "cos(2 * x)")


def random_spec(rng: random.Random, family: F | None = None) -> ChartSpec:
    """A small valid spec with randomized topology, domains, and data."""

    if family is None:
        family = rng.choice(_FAMILIES)
    rows = rng.randint(1, 2)
    cols = rng.randint(1, 2)
    pc = rng.randint(1, rows * cols)
    panels = tuple(_random_panel(rng) for _ in range(pc))
    code = _random_code(rng, family)
    return ChartSpec(
        family=family,
        semantic=SemanticSpec(
            topology=Topology(chart_type=family, layout=(rows, cols), panel_count=pc),
            panels=panels,
        ),
        code=code,
    )


def _random_panel(rng: random.Random) -> PanelSpec:
    coord = rng.choice(list(CoordKind))
    x: Domain | None = None
    y: Domain | None = None
    if rng.random() < 0.8:
        if rng.random() < 0.5:
            lo = rng.uniform(-10, 5)
            x = _num(lo, lo + rng.uniform(0.5, 10))
        else:
            x = _cat(*(f"c{i}" for i in range(rng.randint(1, 4))))
    if rng.random() < 0.8:
        lo = rng.uniform(-5, 5)
        y = _num(lo, lo + rng.uniform(0.5, 10))
    n_series = rng.randint(0, 3)
    series = tuple(f"s{i}" for i in range(n_series))
    kind = rng.choice([DataKind.NONE, DataKind.FUNCTION, DataKind.EXPLICIT, DataKind.MATRIX])
    if kind is DataKind.FUNCTION:
        data = DataRepr.function(rng.choice(_EXPRS))
    elif kind is DataKind.EXPLICIT:
        npts = rng.randint(1, 5)
        ys = [[rng.uniform(-10, 10) for _ in range(npts)] for _ in range(max(1, n_series))]
        data = DataRepr.explicit(ys)
    elif kind is DataKind.MATRIX:
        ncols = rng.randint(1, 4)
        grid = [[rng.uniform(0, 1) for _ in range(ncols)] for _ in range(rng.randint(1, 3))]
        data = DataRepr.matrix(grid)
    else:
        data = DataRepr.none()
    return PanelSpec(coord=coord, x_domain=x, y_domain=y, series=series, data=data)


def _random_code(rng: random.Random, family: F) -> CodeSpec:
    statistical = None
    relational = None
    vector = None
    levels = None
    if family in (F.BOXPLOT, F.VIOLIN):
        statistical = tuple(
            (f"g{i}", tuple(sorted(rng.uniform(-5, 5) for _ in range(5))))
            for i in range(rng.randint(1, 3))
        )
    elif family is F.TREEMAP:
        n = rng.randint(2, 4)
        raw = [rng.uniform(0.1, 1.0) for _ in range(n)]
        total = sum(raw)
        relational = Relational.treemap(
            [(f"leaf{i}", raw[i] / total) for i in range(n)]
        )
    elif family is F.GRAPH:
        n = rng.randint(2, 5)
        nodes = [f"n{i}" for i in range(n)]
        edges = [(nodes[i], nodes[i + 1]) for i in range(n - 1)]
        relational = Relational.graph(nodes=nodes, edges=edges)
    elif family is F.QUIVER:
        k = rng.randint(1, 4)
        vector = VectorField(
            anchors=tuple((float(i), float(i % 2)) for i in range(k)),
            components=tuple((rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(k)),
        )
    elif family is F.CONTOUR:
        levels = tuple(sorted(rng.uniform(-2, 2) for _ in range(rng.randint(2, 5))))
    aux = None
    if rng.random() < 0.5:
        aux = Auxiliary(
            texts=(("label", rng.random(), rng.random()),),
            colors=("#1f77b4",),
        )
    return CodeSpec(
        statistical=statistical,
        relational=relational,
        vector=vector,
        contour_levels=levels,
        auxiliary=aux,
    )


def mismatched_pair(rng: random.Random) -> tuple[ChartSpec, ChartSpec]:
    """Two valid specs guaranteed to disagree on topology."""

    ref = random_spec(rng)
    gen = random_spec(rng)
    rt = ref.semantic.topology
    gt = gen.semantic.topology
    if (rt.chart_type, rt.layout, rt.panel_count) == (gt.chart_type, gt.layout, gt.panel_count):
        bumped = Topology(
            chart_type=gt.chart_type,
            layout=(gt.layout[0], gt.layout[1] + 1),
            panel_count=gt.panel_count,
        )
        gen = ChartSpec(
            family=gen.family,
            semantic=SemanticSpec(topology=bumped, panels=gen.semantic.panels),
            code=gen.code,
        )
    return ref, gen


# ---------------------------------------------------------------------------
# synthetic curation pool mirroring the published corpus shape

# family -> (tier, signature count, pool availability, expected selection,
#            published share in percent)
TABLE2 = {
    F.MIX: (1, 7, 2878, 630, 15.8),
    F.THREE_D: (1, 4, 3045, 360, 9.0),
    F.MULTI_AXES: (1, 3, 1507, 270, 6.8),
    F.RADAR: (1, 2, 2270, 180, 4.5),
    F.ROSE: (1, 2, 1245, 180, 4.5),
    F.CONTOUR: (1, 2, 246, 180, 4.5),
    F.QUIVER: (1, 2, 846, 180, 4.5),
    F.BOXPLOT: (2, 3, 2525, 216, 5.4),
    F.PIE: (2, 2, 2678, 144, 3.6),
    F.HEATMAP: (2, 2, 2040, 144, 3.6),
    F.ERROR: (2, 2, 922, 144, 3.6),
    F.RING: (2, 2, 1549, 144, 3.6),
    F.VIOLIN: (2, 1, 1627, 72, 1.8),
    F.TREEMAP: (2, 1, 1358, 72, 1.8),
    F.BAR: (3, 7, 10931, 378, 9.5),
    F.LINE: (3, 6, 7838, 324, 8.1),
    F.SCATTER: (3, 4, 3967, 216, 5.4),
    F.GRAPH: (3, 1, 124, 54, 1.4),
    F.HISTOGRAM: (3, 1, 651, 54, 1.4),
    F.DENSITY: (3, 1, 95, 54, 1.4),
}

EXPECTED_TOTAL = 3996
EXPECTED_SIGNATURES = 55

_SIG_ORDER = list(
    itertools.product(
        [CoordKind.CARTESIAN, CoordKind.POLAR, CoordKind.THREE_D],
        [DataKind.EXPLICIT, DataKind.FUNCTION, DataKind.MATRIX],
        ["single", "multi_series", "subplots"],
    )
)


def _pool_spec(family: F, coord: CoordKind, mode: DataKind, comp: str) -> ChartSpec:
    pc = 2 if comp == "subplots" else 1
    n_series = 2 if comp == "multi_series" else 1

    def data() -> DataRepr:
        if mode is DataKind.FUNCTION:
            return DataRepr.function("exp(-x)")
        if mode is DataKind.MATRIX:
            return DataRepr.matrix([[1.0, 2.0], [3.0, 4.0]])
        return DataRepr.explicit([[1.0, 2.0, 3.0]] * n_series)

    def panel() -> PanelSpec:
        return PanelSpec(
            coord=coord,
            x_domain=_num(0.0, 10.0),
            y_domain=_num(0.0, 1.0),
            series=tuple(f"s{i}" for i in range(n_series)),
            data=data(),
        )

    return ChartSpec(
        family=family,
        semantic=SemanticSpec(
            topology=Topology(
                chart_type=family, layout=(1, pc), panel_count=pc
            ),
            panels=tuple(panel() for _ in range(pc)),
        ),
        code=CodeSpec(),
    )


def make_table2_pool() -> list[CorpusEntry]:
    """A pool whose per-signature availability matches the published table."""

    entries: list[CorpusEntry] = []
    for family in F:
        tier, n_sigs, avail, _count, _ratio = TABLE2[family]
        base, extra = divmod(avail, n_sigs)
        for si, (coord, mode, comp) in enumerate(_SIG_ORDER[:n_sigs]):
            spec = _pool_spec(family, coord, mode, comp)
            bucket = base + (1 if si < extra else 0)
            for idx in range(bucket):
                eid = f"{family.value}-{si:02d}-{idx:05d}"
                entries.append(
                    CorpusEntry.from_spec(
                        id=eid,
                        spec=spec,
                        image_path=f"images/{eid}.png",
                        code_path=f"code/{eid}.py",
                        spec_path=f"specs/{family.value}-{si:02d}.chartspec.json",
                    )
                )
    return entries


def write_table2_pool(root: Path) -> Path:
    """Materialize the synthetic pool on disk for CLI runs."""

    root.mkdir(parents=True, exist_ok=True)
    specs_dir = root / "specs"
    specs_dir.mkdir(exist_ok=True)
    pool_path = root / "pool.jsonl"
    written: set[str] = set()
    with pool_path.open("w", encoding="utf-8") as fh:
        for entry in make_table2_pool():
            rel = entry.spec_path
            if rel not in written:
                (root / rel).write_bytes(serialize_spec(entry.spec))
                written.add(rel)
            fh.write(json.dumps(entry.to_record(), ensure_ascii=False) + "\n")
    return pool_path
