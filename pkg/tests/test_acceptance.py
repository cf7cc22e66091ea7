"""Acceptance suite: the binding end-to-end claims, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
pass lines; each test also enforces its stated runtime bound where one
exists.
"""

import itertools
import json
import random
import subprocess
import time
from pathlib import Path

import numpy as np
import pytest

from spec_align.curation import curate
from spec_align.execution import ExecStatus, ExecutionReport
from spec_align.families import CanonicalFamily as F
from spec_align.grpo import group_advantages
from spec_align.kernels import norm_edit_similarity, range_iou
from spec_align.reward import DEFAULT_CONFIG, RewardConfig, evaluate_candidate, format_reward, max_total_reward

from oracles import edit_similarity_oracle, interval_iou_mc
from support import (
    EXPECTED_SIGNATURES,
    EXPECTED_TOTAL,
    IDENTITY_TOTALS,
    MALFORMED_RESPONSE,
    TABLE2,
    WELL_FORMED_RESPONSE,
    identity_spec,
    make_table2_pool,
    mismatched_pair,
    write_table2_pool,
)

FIXTURES = Path(__file__).parent / "fixtures"


def _report(status=ExecStatus.OK, spec=None):
    return ExecutionReport(status=status, wall_time=0.1, runtime_spec=spec)


def test_criterion_1_curation_counts_and_ratios():
    """Curating the published pool shape reproduces its counts exactly and
    its percentage shares within 0.05 points, in under five seconds."""
    pool = make_table2_pool()
    start = time.perf_counter()
    manifest = curate(pool, seed=0)
    elapsed = time.perf_counter() - start

    assert manifest.total == EXPECTED_TOTAL
    assert len(manifest.signatures) == EXPECTED_SIGNATURES
    for family in F:
        _tier, n_sigs, _avail, count, ratio = TABLE2[family]
        got = manifest.families[family.value]
        assert got == count, f"{family.value}: {got} != {count}"
        per_sig = [
            v for k, v in manifest.signatures.items() if k.split("|", 1)[0] == family.value
        ]
        assert len(per_sig) == n_sigs
        share = 100.0 * got / manifest.total
        assert abs(share - ratio) <= 0.05, f"{family.value}: {share:.3f}% vs {ratio}%"
    assert elapsed < 5.0
    print(f"\n[PASS] criterion 1: curation counts and ratios match ({elapsed:.2f}s)")


def test_criterion_2_identity_scores_hit_ceiling():
    """An exact reproduction of each family's reference earns exactly the
    configured maximum, across all twenty families, in under one second."""
    specs = {family: identity_spec(family) for family in F}
    start = time.perf_counter()
    for family, spec in specs.items():
        result = evaluate_candidate(WELL_FORMED_RESPONSE, _report(spec=spec), spec)
        ceiling = max_total_reward(spec)
        assert result.breakdown.total == ceiling == IDENTITY_TOTALS[family], family.value
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"[PASS] criterion 2: 20 identity scores equal their ceilings ({elapsed:.2f}s)")


def test_criterion_3_gate_and_staircase_hard_zeroes():
    """Mismatched topology zeroes both similarity subtotals on 10,000 random
    pairs, and 10,000 failed executions earn exactly the format reward minus
    one, all inside thirty seconds."""
    rng = random.Random(1009)
    start = time.perf_counter()
    for _ in range(10_000):
        ref, gen = mismatched_pair(rng)
        result = evaluate_candidate(WELL_FORMED_RESPONSE, _report(spec=gen), ref)
        assert result.breakdown.semantic.subtotal == 0.0
        assert result.breakdown.code.subtotal == 0.0
        assert result.breakdown.total == 0.5

    statuses = (ExecStatus.SYNTAX_ERROR, ExecStatus.RUNTIME_ERROR, ExecStatus.TIMEOUT)
    for i in range(10_000):
        ref, _ = mismatched_pair(rng)
        text = WELL_FORMED_RESPONSE if i % 2 == 0 else MALFORMED_RESPONSE
        report = _report(status=statuses[i % 3])
        result = evaluate_candidate(text, report, ref)
        assert result.breakdown.total == format_reward(text) - 1.0
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    print(f"[PASS] criterion 3: topology gate and execution staircase hard-zero ({elapsed:.2f}s)")


def test_criterion_4_group_normalization_moments():
    """1,000 random groups of 2 to 16 rewards normalize to mean 0 and
    standard deviation 1 within 1e-9; zero-variance groups collapse to
    zeros."""
    rng = random.Random(77)
    for i in range(1_000):
        n = rng.randint(2, 16)
        if i % 10 == 0:
            rewards = [rng.uniform(-5, 5)] * n
        else:
            rewards = [rng.uniform(-5, 5) for _ in range(n)]
        adv = group_advantages(rewards)
        if float(np.std(rewards)) < 1e-8:
            assert np.array_equal(adv, np.zeros(n))
        else:
            assert abs(float(np.mean(adv))) < 1e-9
            assert abs(float(np.std(adv)) - 1.0) < 1e-9
    print("[PASS] criterion 4: group advantages normalize to unit moments")


def test_criterion_5_kernel_oracles():
    """Edit similarity equals a brute-force recursive oracle on every pair
    with combined length up to 6 over a four-symbol alphabet, on all pairs of
    strings up to length 4, on a dense deterministic slice of the length-5/6
    region, and on 10,000 random pairs with strings up to length 12; interval
    overlap agrees with a Monte Carlo oracle within 1e-3 on 1,000 pairs."""
    alphabet = "abcd"
    by_len = [[""]]
    for n in range(1, 7):
        by_len.append(["".join(p) for p in itertools.product(alphabet, repeat=n)])

    checked = 0
    for la in range(7):
        for lb in range(7 - la):
            for s in by_len[la]:
                for t in by_len[lb]:
                    assert norm_edit_similarity(s, t) == edit_similarity_oracle(s, t)
                    checked += 1
    assert checked == 36_409

    short = [s for n in range(5) for s in by_len[n]]
    assert len(short) == 341
    for s in short:
        for t in short:
            assert norm_edit_similarity(s, t) == edit_similarity_oracle(s, t)

    rng = random.Random(4242)
    long_slice = [rng.choice(by_len[rng.choice((5, 6))]) for _ in range(400)]
    for s in long_slice:
        for t in long_slice:
            assert norm_edit_similarity(s, t) == edit_similarity_oracle(s, t)

    for _ in range(10_000):
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
        t = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
        assert norm_edit_similarity(s, t) == edit_similarity_oracle(s, t)

    worst = 0.0
    for i in range(1_000):
        lo_a = rng.uniform(-20, 20)
        lo_b = rng.uniform(-20, 20)
        a = (lo_a, lo_a + rng.uniform(2, 20))
        b = (lo_b, lo_b + rng.uniform(2, 20))
        exact = range_iou(a, b)
        estimate = interval_iou_mc(a, b, seed=i)
        worst = max(worst, abs(exact - estimate))
    assert worst < 1e-3
    print(f"[PASS] criterion 5: kernels match brute-force oracles (iou worst err {worst:.1e})")


def test_criterion_6_composite_worked_values():
    """The composite reward reproduces the published worked values exactly:
    -1.0 for a well-formed response that fails execution, -1.5 for a
    malformed response whose code runs but misses the topology, and the
    configured ceiling for exact reproductions."""
    line = identity_spec(F.LINE)
    bar = identity_spec(F.BAR)

    failed = evaluate_candidate(WELL_FORMED_RESPONSE, _report(status=ExecStatus.RUNTIME_ERROR), line)
    assert failed.breakdown.total == -1.0

    gated = evaluate_candidate(MALFORMED_RESPONSE, _report(spec=bar), line)
    assert gated.breakdown.total == -1.5

    assert evaluate_candidate(WELL_FORMED_RESPONSE, _report(spec=line), line).breakdown.total == 8.0
    box = identity_spec(F.BOXPLOT)
    assert evaluate_candidate(WELL_FORMED_RESPONSE, _report(spec=box), box).breakdown.total == 7.5

    cfg = RewardConfig.from_dict({"beta": 1.0, "gate_bonus": 2.0})
    custom = evaluate_candidate(WELL_FORMED_RESPONSE, _report(spec=box), box, cfg=cfg)
    assert custom.breakdown.total == max_total_reward(box, cfg) == 0.5 + 2.0 + 3.0 + 2.0
    print("[PASS] criterion 6: composite worked values exact")


def test_criterion_7_byte_identical_runs(tmp_path):
    """Two independent curate runs over freshly built pools and two score
    runs over the same inputs produce byte-identical outputs."""
    outputs = []
    for name in ("one", "two"):
        root = tmp_path / name
        pool_path = write_table2_pool(root / "pool")
        manifest_path = root / "manifest.jsonl"
        result = subprocess.run(
            [
                "spec-align", "curate", str(pool_path),
                "--out", str(manifest_path), "--seed", "0", "--budget", "3008",
            ],
            capture_output=True,
            timeout=300,
        )
        assert result.returncode == 0, result.stderr.decode()
        outputs.append((manifest_path.read_bytes(), result.stdout))
    assert outputs[0] == outputs[1]

    scores = []
    for _ in range(2):
        result = subprocess.run(
            [
                "spec-align", "score",
                str(FIXTURES / "response.txt"),
                str(FIXTURES / "line.chartspec.json"),
                "--no-exec", str(FIXTURES / "report_ok.json"),
            ],
            capture_output=True,
            timeout=120,
        )
        assert result.returncode == 0, result.stderr.decode()
        scores.append(result.stdout)
    assert scores[0] == scores[1]
    assert json.loads(scores[0])["total"] == 8.0
    print("[PASS] criterion 7: curate and score runs byte-identical")
