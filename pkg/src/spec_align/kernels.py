"""Metric kernels: bounded [0, 1] similarity scores shared by the reward tree.

Every kernel is a pure function, symmetric in spirit but anchored on the
reference side: unmatched reference structure is penalized, surplus generated
structure is ignored (stat categories, vector anchors, auxiliary items), so a
candidate cannot buy score by emitting extra elements.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Sequence

import numpy as np


class EmptyReference(ValueError):
    """Raised when a kernel needs a non-empty reference vector."""


def range_iou(a: Sequence[float], b: Sequence[float]) -> float:
    """Interval intersection-over-union for two (lo, hi) ranges.

    Degenerate case: two zero-length ranges score 1.0 at the same point and
    0.0 at distinct points.
    """
    alo, ahi = float(a[0]), float(a[1])
    blo, bhi = float(b[0]), float(b[1])
    inter = max(0.0, min(ahi, bhi) - max(alo, blo))
    union = (ahi - alo) + (bhi - blo) - inter
    if union <= 0.0:
        return 1.0 if alo == blo else 0.0
    return inter / union


def set_jaccard(a: Iterable, b: Iterable) -> float:
    """|A ∩ B| / |A ∪ B|; two empty sets count as a perfect match."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def levenshtein(s: str, t: str) -> int:
    """Edit distance with unit insert/delete/substitute costs (two-row DP)."""
    if len(s) < len(t):
        s, t = t, s
    if not t:
        return len(s)
    previous = list(range(len(t) + 1))
    for i, cs in enumerate(s, start=1):
        current = [i]
        for j, ct in enumerate(t, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (cs != ct),
                )
            )
        previous = current
    return previous[-1]


def _normalize_text(s: str) -> str:
    return "".join(s.split()).lower()


def norm_edit_similarity(s: str, t: str) -> float:
    """1 - normalized edit distance after stripping whitespace and lowercasing."""
    s = _normalize_text(s)
    t = _normalize_text(t)
    if not s and not t:
        return 1.0
    return 1.0 - levenshtein(s, t) / max(len(s), len(t))


def numeric_alignment(ref: Sequence[float], gen: Sequence[float]) -> float:
    """Variance-scaled MSE score between a reference vector and a candidate.

    The candidate is resampled to the reference length by linear
    interpolation over its index.  Score is 1 / (1 + MSE / var(ref)) with
    population variance; a constant reference falls back to 1 / (1 + MSE)
    (exactly 1.0 only on an exact match).
    """
    ref_arr = np.asarray(ref, dtype=float)
    if ref_arr.size == 0:
        raise EmptyReference("reference vector is empty")
    gen_arr = np.asarray(gen, dtype=float)
    if gen_arr.size == 0:
        return 0.0
    if gen_arr.size != ref_arr.size:
        positions = np.linspace(0.0, gen_arr.size - 1.0, ref_arr.size)
        gen_arr = np.interp(positions, np.arange(gen_arr.size), gen_arr)
    mse = float(np.mean((ref_arr - gen_arr) ** 2))
    var = float(np.var(ref_arr))
    if var > 0.0:
        return 1.0 / (1.0 + mse / var)
    return 1.0 if mse == 0.0 else 1.0 / (1.0 + mse)


def _stat_map(items) -> dict[str, np.ndarray]:
    pairs = items.items() if hasattr(items, "items") else items
    return {str(label): np.asarray(vec, dtype=float) for label, vec in pairs}


def stat_l2_score(ref, gen) -> float:
    """Distance-based score over per-category summary vectors.

    Categories matched by label; an unmatched reference category is penalized
    by its own vector norm, surplus generated categories are ignored.  Score
    is 1 / (1 + d / ||ref||) with d the combined L2 distance.
    """
    ref_map = _stat_map(ref)
    gen_map = _stat_map(gen)
    total = 0.0
    for label, rvec in ref_map.items():
        gvec = gen_map.get(label)
        if gvec is not None and gvec.shape == rvec.shape:
            total += float(np.sum((rvec - gvec) ** 2))
        else:
            total += float(np.sum(rvec**2))
    d = math.sqrt(total)
    ref_norm = math.sqrt(sum(float(np.sum(v**2)) for v in ref_map.values()))
    if ref_norm > 0.0:
        return 1.0 / (1.0 + d / ref_norm)
    return 1.0 if d == 0.0 else 1.0 / (1.0 + d)


def _leaf_f1(ref: list, gen: list, tol: float) -> float:
    ref_used = [False] * len(ref)
    gen_used = [False] * len(gen)
    matched = 0
    # label pass: identical labels pair up first
    for i, (rlabel, rratio) in enumerate(ref):
        for j, (glabel, gratio) in enumerate(gen):
            if gen_used[j] or glabel != rlabel:
                continue
            ref_used[i] = gen_used[j] = True
            if abs(rratio - gratio) <= tol:
                matched += 1
            break
    # ratio pass: leftovers pair by nearest ratio
    candidates = sorted(
        (abs(ref[i][1] - gen[j][1]), i, j)
        for i in range(len(ref))
        if not ref_used[i]
        for j in range(len(gen))
        if not gen_used[j]
    )
    for delta, i, j in candidates:
        if ref_used[i] or gen_used[j]:
            continue
        ref_used[i] = gen_used[j] = True
        if delta <= tol:
            matched += 1
    precision = matched / len(gen)
    recall = matched / len(ref)
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _edge_f1(ref: list, gen: list) -> float:
    ref_set = {tuple(sorted((str(a), str(b)))) for a, b in ref}
    gen_set = {tuple(sorted((str(a), str(b)))) for a, b in gen}
    matched = len(ref_set & gen_set)
    precision = matched / len(gen_set)
    recall = matched / len(ref_set)
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def relational_f1(ref_items, gen_items, tol: float = 0.0) -> float:
    """F1 over relational structure.

    Items are either part-whole leaves (label, ratio), matched greedily by
    label then nearest ratio with ``tol`` applied to the ratio difference, or
    graph edges (a, b), matched exactly as canonical unordered pairs.  Two
    empty structures score 1.0.
    """
    ref = list(ref_items)
    gen = list(gen_items)
    if not ref and not gen:
        return 1.0
    if not ref or not gen:
        return 0.0
    probe = ref[0]
    if isinstance(probe[1], str):
        return _edge_f1(ref, gen)
    return _leaf_f1(ref, gen, tol)


def level_set_similarity(ref_levels, gen_levels, rel_tol: float = 1e-3) -> float:
    """Jaccard over contour levels matched within a relative tolerance."""
    ref = [float(v) for v in ref_levels]
    gen = [float(v) for v in gen_levels]
    if not ref and not gen:
        return 1.0
    if not ref or not gen:
        return 0.0
    gen_used = [False] * len(gen)
    matched = 0
    candidates = sorted((abs(a - b), i, j) for i, a in enumerate(ref) for j, b in enumerate(gen))
    ref_used = [False] * len(ref)
    for delta, i, j in candidates:
        if ref_used[i] or gen_used[j]:
            continue
        scale = max(abs(ref[i]), abs(gen[j]))
        if delta <= rel_tol * scale or delta == 0.0:
            ref_used[i] = gen_used[j] = True
            matched += 1
    return matched / (len(ref) + len(gen) - matched)


def _field(obj) -> tuple[list, list]:
    if hasattr(obj, "anchors"):
        return list(obj.anchors), list(obj.components)
    anchors, components = obj
    return list(anchors), list(components)


def vector_cosine_score(ref, gen, tol: float = 1e-6) -> float:
    """Mean cosine agreement over anchor-matched vectors.

    Each reference anchor takes the nearest unused generated anchor within
    ``tol``; a matched pair scores (1 + cos θ) / 2, with two zero vectors a
    perfect 1.0 and a zero against a non-zero 0.0.  Unmatched reference
    anchors score 0.
    """
    ref_anchors, ref_vecs = _field(ref)
    gen_anchors, gen_vecs = _field(gen)
    if not ref_anchors:
        return 1.0
    gen_used = [False] * len(gen_anchors)
    total = 0.0
    for i, anchor in enumerate(ref_anchors):
        best = None
        best_dist = None
        for j, other in enumerate(gen_anchors):
            if gen_used[j]:
                continue
            dist = math.hypot(anchor[0] - other[0], anchor[1] - other[1])
            if best_dist is None or dist < best_dist:
                best, best_dist = j, dist
        if best is None or best_dist > tol:
            continue
        gen_used[best] = True
        u = ref_vecs[i]
        v = gen_vecs[best]
        nu = math.hypot(u[0], u[1])
        nv = math.hypot(v[0], v[1])
        if u[0] == v[0] and u[1] == v[1]:
            total += 1.0
        elif u[0] == -v[0] and u[1] == -v[1]:
            total += 0.0
        elif nu == 0.0 or nv == 0.0:
            total += 0.0
        else:
            # normalize before the dot product so subnormal components
            # cannot underflow the denominator
            cos = (u[0] / nu) * (v[0] / nv) + (u[1] / nu) * (v[1] / nv)
            total += (1.0 + max(-1.0, min(1.0, cos))) / 2.0
    return total / len(ref_anchors)


def auxiliary_scores(ref_aux, gen_aux) -> tuple[float, float, float]:
    """(text, position, color) agreement between two annotation layers.

    Texts pair greedily by highest edit similarity; the text score averages
    pair similarities over all reference texts (unmatched ones score 0) and
    the position score averages max(0, 1 - d / sqrt(2)) over matched pairs.
    The color score is an F1-style multiset overlap of canonical hex values.
    Empty reference sides are vacuously perfect.
    """
    ref_texts = list(ref_aux.texts or ())
    gen_texts = list(gen_aux.texts or ())
    if not ref_texts:
        text_score = 1.0
        position_score = 1.0
    else:
        pairs = sorted(
            (-norm_edit_similarity(rt[0], gt[0]), i, j)
            for i, rt in enumerate(ref_texts)
            for j, gt in enumerate(gen_texts)
        )
        ref_used = [False] * len(ref_texts)
        gen_used = [False] * len(gen_texts)
        sim_total = 0.0
        pos_scores = []
        for neg_sim, i, j in pairs:
            if ref_used[i] or gen_used[j]:
                continue
            ref_used[i] = gen_used[j] = True
            sim_total += -neg_sim
            d = math.hypot(ref_texts[i][1] - gen_texts[j][1], ref_texts[i][2] - gen_texts[j][2])
            pos_scores.append(max(0.0, 1.0 - d / math.sqrt(2.0)))
        text_score = sim_total / len(ref_texts)
        position_score = sum(pos_scores) / len(pos_scores) if pos_scores else 0.0

    ref_colors = Counter(ref_aux.colors or ())
    gen_colors = Counter(gen_aux.colors or ())
    ref_n = sum(ref_colors.values())
    gen_n = sum(gen_colors.values())
    if ref_n == 0:
        color_score = 1.0
    elif gen_n == 0:
        color_score = 0.0
    else:
        overlap = sum((ref_colors & gen_colors).values())
        color_score = 2.0 * overlap / (ref_n + gen_n)
    return text_score, position_score, color_score
