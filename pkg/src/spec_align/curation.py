"""Structure-balanced corpus curation.

Entries are bucketed by (family, structural signature); each bucket
contributes at most its family tier's quota, sampled uniformly without
replacement under a fixed seed, so rare structures survive and dominant
families stop swamping the mix.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .chartspec import ChartSpec, CoordKind, DataKind, InvariantError, canonical_dumps, parse_spec, validate
from .families import CanonicalFamily


class EmptyPool(ValueError):
    """Curation was handed an empty candidate pool."""


class CompositionKind(str, Enum):
    SINGLE = "single"
    MULTI_SERIES = "multi_series"
    SUBPLOTS = "subplots"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class StructuralSignature:
    """Coordinate space, data mode, and composition of one chart."""

    coord_space: CoordKind
    data_mode: DataKind
    composition: CompositionKind

    @property
    def key(self) -> str:
        return f"{self.coord_space.value}|{self.data_mode.value}|{self.composition.value}"

    def to_dict(self) -> dict:
        return {
            "coord_space": self.coord_space.value,
            "data_mode": self.data_mode.value,
            "composition": self.composition.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StructuralSignature":
        return cls(
            coord_space=CoordKind(data["coord_space"]),
            data_mode=DataKind(data["data_mode"]),
            composition=CompositionKind(data["composition"]),
        )


def signature_of(spec: ChartSpec) -> StructuralSignature:
    """Project a spec onto its structural signature.

    Precedence across panels: 3d > polar > cartesian for coordinate space,
    matrix > function > explicit for data mode (panels without data do not
    vote; a chart with none anywhere counts as explicit).
    """
    panels = spec.semantic.panels
    coords = {p.coord for p in panels}
    if CoordKind.THREE_D in coords:
        coord_space = CoordKind.THREE_D
    elif CoordKind.POLAR in coords:
        coord_space = CoordKind.POLAR
    else:
        coord_space = CoordKind.CARTESIAN
    kinds = {p.data.kind for p in panels} - {DataKind.NONE}
    if DataKind.MATRIX in kinds:
        data_mode = DataKind.MATRIX
    elif DataKind.FUNCTION in kinds:
        data_mode = DataKind.FUNCTION
    else:
        data_mode = DataKind.EXPLICIT
    if spec.semantic.topology.panel_count > 1:
        composition = CompositionKind.SUBPLOTS
    elif any(len(p.series) >= 2 for p in panels):
        composition = CompositionKind.MULTI_SERIES
    else:
        composition = CompositionKind.SINGLE
    return StructuralSignature(coord_space=coord_space, data_mode=data_mode, composition=composition)


@dataclass(frozen=True)
class TierConfig:
    tier: int
    rho: int


DEFAULT_TIERS: dict[int, TierConfig] = {
    1: TierConfig(tier=1, rho=90),
    2: TierConfig(tier=2, rho=72),
    3: TierConfig(tier=3, rho=54),
}

# Tier 1: structurally rare or composite; Tier 2: mid-frequency specialized;
# Tier 3: dominant everyday families.
FAMILY_TIER: dict[CanonicalFamily, int] = {
    CanonicalFamily.MIX: 1,
    CanonicalFamily.THREE_D: 1,
    CanonicalFamily.MULTI_AXES: 1,
    CanonicalFamily.RADAR: 1,
    CanonicalFamily.ROSE: 1,
    CanonicalFamily.CONTOUR: 1,
    CanonicalFamily.QUIVER: 1,
    CanonicalFamily.BOXPLOT: 2,
    CanonicalFamily.PIE: 2,
    CanonicalFamily.HEATMAP: 2,
    CanonicalFamily.ERROR: 2,
    CanonicalFamily.RING: 2,
    CanonicalFamily.VIOLIN: 2,
    CanonicalFamily.TREEMAP: 2,
    CanonicalFamily.BAR: 3,
    CanonicalFamily.LINE: 3,
    CanonicalFamily.SCATTER: 3,
    CanonicalFamily.GRAPH: 3,
    CanonicalFamily.HISTOGRAM: 3,
    CanonicalFamily.DENSITY: 3,
}


def tier_of(family: CanonicalFamily, tiers: dict[int, TierConfig] | None = None) -> TierConfig:
    """The tier config (and so the per-signature quota) for a family."""
    table = tiers or DEFAULT_TIERS
    return table[FAMILY_TIER[family]]


def tiers_from_dict(data: dict | None) -> dict[int, TierConfig]:
    """Tier quotas from a config document, e.g. {"1": 68, "2": 54, "3": 41}."""
    tiers = dict(DEFAULT_TIERS)
    for key, rho in (data or {}).items():
        tier = int(key)
        if tier not in tiers:
            raise ValueError(f"unknown tier {tier}")
        tiers[tier] = TierConfig(tier=tier, rho=int(rho))
    return tiers


@dataclass(frozen=True)
class CorpusEntry:
    """One curated chart: artifact paths plus its parsed spec and signature."""

    id: str
    image_path: str
    code_path: str
    spec: ChartSpec
    family: CanonicalFamily
    signature: StructuralSignature
    spec_path: str = ""

    @classmethod
    def from_spec(
        cls, id: str, spec: ChartSpec, image_path: str = "", code_path: str = "", spec_path: str = ""
    ) -> "CorpusEntry":
        return cls(
            id=id,
            image_path=image_path,
            code_path=code_path,
            spec=spec,
            family=spec.family,
            signature=signature_of(spec),
            spec_path=spec_path,
        )

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "image_path": self.image_path,
            "code_path": self.code_path,
            "spec_path": self.spec_path,
            "family": self.family.value,
            "signature": self.signature.to_dict(),
        }


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[CorpusEntry, ...]
    seed: int
    families: dict[str, int] = field(default_factory=dict)
    signatures: dict[str, int] = field(default_factory=dict)
    trimmed: dict[str, int] = field(default_factory=dict)
    budget: int | None = None

    @property
    def total(self) -> int:
        return len(self.entries)

    def header(self) -> dict:
        return {
            "seed": self.seed,
            "total": self.total,
            "budget": self.budget,
            "families": dict(sorted(self.families.items())),
            "signatures": dict(sorted(self.signatures.items())),
            "trimmed": dict(sorted(self.trimmed.items())),
        }


def _bucket_key(entry: CorpusEntry) -> tuple[str, str]:
    return (entry.family.value, entry.signature.key)


def curate(
    pool: list[CorpusEntry],
    tiers: dict[int, TierConfig] | None = None,
    seed: int = 0,
    budget: int | None = None,
) -> CorpusManifest:
    """Select a structure-balanced subset of the pool.

    Each (family, signature) bucket is cut to its tier quota by seeded
    uniform sampling without replacement over the id-sorted bucket, so the
    same pool and seed always yield the same manifest.  A budget below the
    quota total trims Tier 3 proportionally first, then Tier 2; Tier 1 is
    never trimmed.
    """
    if not pool:
        raise EmptyPool("candidate pool is empty")
    tiers = tiers or DEFAULT_TIERS
    buckets: dict[tuple[str, str], list[CorpusEntry]] = {}
    for entry in pool:
        buckets.setdefault(_bucket_key(entry), []).append(entry)

    selected: dict[tuple[str, str], list[CorpusEntry]] = {}
    for key in sorted(buckets):
        bucket = sorted(buckets[key], key=lambda e: e.id)
        family = CanonicalFamily(key[0])
        quota = tier_of(family, tiers).rho
        take = min(quota, len(bucket))
        rng = random.Random(f"{seed}|{key[0]}|{key[1]}")
        selected[key] = rng.sample(bucket, take)

    trimmed: dict[str, int] = {}
    if budget is not None:
        total = sum(len(v) for v in selected.values())
        for tier in (3, 2):
            excess = total - budget
            if excess <= 0:
                break
            tier_keys = [k for k in sorted(selected) if FAMILY_TIER[CanonicalFamily(k[0])] == tier]
            tier_total = sum(len(selected[k]) for k in tier_keys)
            if tier_total == 0:
                continue
            cut = min(excess, tier_total)
            keep_total = tier_total - cut
            keeps = {k: math.floor(len(selected[k]) * keep_total / tier_total) for k in tier_keys}
            remainder = keep_total - sum(keeps.values())
            for k in sorted(tier_keys, key=lambda k: (-len(selected[k]), k)):
                if remainder <= 0:
                    break
                keeps[k] += 1
                remainder -= 1
            for k in tier_keys:
                selected[k] = selected[k][: keeps[k]]
            trimmed[str(tier)] = cut
            total -= cut

    entries: list[CorpusEntry] = []
    families: dict[str, int] = {}
    signatures: dict[str, int] = {}
    for key in sorted(selected):
        chosen = sorted(selected[key], key=lambda e: e.id)
        for entry in chosen:
            violations = validate(entry.spec)
            if violations:
                raise InvariantError(violations)
        entries.extend(chosen)
        if chosen:
            families[key[0]] = families.get(key[0], 0) + len(chosen)
            signatures[f"{key[0]}|{key[1]}"] = len(chosen)
    return CorpusManifest(
        entries=tuple(entries),
        seed=seed,
        families=families,
        signatures=signatures,
        trimmed=trimmed,
        budget=budget,
    )


# ---------------------------------------------------------------------------
# Line-delimited pool and manifest files

def load_pool(path: str | Path) -> list[CorpusEntry]:
    """Read a line-delimited pool file; spec paths resolve against its parent."""
    path = Path(path)
    base = path.parent
    cache: dict[str, ChartSpec] = {}
    entries: list[CorpusEntry] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            spec_path = record["spec_path"]
            resolved = str(spec_path) if Path(spec_path).is_absolute() else str(base / spec_path)
            if resolved not in cache:
                cache[resolved] = parse_spec(Path(resolved).read_bytes())
            spec = cache[resolved]
            entry = CorpusEntry(
                id=str(record["id"]),
                image_path=str(record["image_path"]),
                code_path=str(record["code_path"]),
                spec=spec,
                family=CanonicalFamily(record["family"]),
                signature=StructuralSignature.from_dict(record["signature"]),
                spec_path=str(spec_path),
            )
            entries.append(entry)
    return entries


def write_manifest(manifest: CorpusManifest, path: str | Path) -> None:
    """Header line with seed and counts, then one entry record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(manifest.header()) + "\n")
        for entry in manifest.entries:
            fh.write(canonical_dumps(entry.to_record()) + "\n")


def write_pool(entries: list[CorpusEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(canonical_dumps(entry.to_record()) + "\n")
