"""Figure and table rendering for the report paths of the CLI."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .curation import FAMILY_TIER, CorpusManifest
from .families import CanonicalFamily
from .reward import RewardBreakdown

_TIER_COLORS = {1: "#d62728", 2: "#ff7f0e", 3: "#1f77b4"}


def render_curation_report(manifest: CorpusManifest, outdir: str | Path) -> list[Path]:
    """Write distribution figures and a TSV next to the manifest output."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    total = manifest.total or 1
    rows = []
    for family in CanonicalFamily:
        count = manifest.families.get(family.value, 0)
        rows.append((FAMILY_TIER[family], family.value, count))
    rows.sort(key=lambda r: (r[0], -r[2], r[1]))

    written = []
    tsv_path = outdir / "family_counts.tsv"
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write("family\ttier\tcount\tshare\n")
        for tier, name, count in rows:
            fh.write(f"{name}\t{tier}\t{count}\t{100.0 * count / total:.1f}%\n")
    written.append(tsv_path)

    fig, ax = plt.subplots(figsize=(8, 6))
    names = [name for _, name, _ in rows]
    counts = [count for _, _, count in rows]
    colors = [_TIER_COLORS[tier] for tier, _, _ in rows]
    ax.barh(range(len(rows)), counts, color=colors)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlabel("curated count")
    ax.set_title(f"Curated corpus by family (total {manifest.total})")
    handles = [plt.Rectangle((0, 0), 1, 1, color=_TIER_COLORS[t]) for t in (1, 2, 3)]
    ax.legend(handles, ["tier 1", "tier 2", "tier 3"], loc="lower right")
    fig.tight_layout()
    counts_path = outdir / "family_counts.png"
    fig.savefig(counts_path, dpi=120)
    plt.close(fig)
    written.append(counts_path)

    tier_totals = {1: 0, 2: 0, 3: 0}
    for tier, _, count in rows:
        tier_totals[tier] += count
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.pie(
        [tier_totals[t] for t in (1, 2, 3)],
        labels=[f"tier {t} ({tier_totals[t]})" for t in (1, 2, 3)],
        colors=[_TIER_COLORS[t] for t in (1, 2, 3)],
        autopct="%.1f%%",
    )
    ax.set_title("Curated share by tier")
    fig.tight_layout()
    shares_path = outdir / "tier_shares.png"
    fig.savefig(shares_path, dpi=120)
    plt.close(fig)
    written.append(shares_path)
    return written


def render_score_report(breakdown: RewardBreakdown, outdir: str | Path) -> list[Path]:
    """Write the breakdown JSON and a component bar figure."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    json_path = outdir / "breakdown.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(breakdown.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(json_path)

    labels = ["format", "execution", "gate"]
    values = [breakdown.format, breakdown.execution, breakdown.semantic.gate]
    for name in ("coord", "domain", "series", "data"):
        value = getattr(breakdown.semantic, name)
        if value is not None:
            labels.append(name)
            values.append(value)
    for name in ("statistical", "relational", "vector", "auxiliary"):
        value = getattr(breakdown.code, name)
        if value is not None:
            labels.append(f"code:{name}")
            values.append(value)
    labels.append("total")
    values.append(breakdown.total)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    colors = ["#2ca02c" if v >= 0 else "#d62728" for v in values]
    ax.bar(range(len(values)), values, color=colors)
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylabel("reward")
    ax.set_title(f"Reward breakdown (total {breakdown.total:.3f})")
    fig.tight_layout()
    fig_path = outdir / "reward_breakdown.png"
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    written.append(fig_path)
    return written
