"""Rendered report files for the curate and score paths."""

from spec_align.curation import curate
from spec_align.execution import ExecStatus, ExecutionReport
from spec_align.families import CanonicalFamily as F
from spec_align.reporting import render_curation_report, render_score_report
from spec_align.reward import evaluate_candidate

from support import WELL_FORMED_RESPONSE, identity_spec, make_table2_pool


def test_curation_report_files(tmp_path):
    manifest = curate(make_table2_pool(), seed=0)
    written = render_curation_report(manifest, tmp_path)
    assert [p.name for p in written] == [
        "family_counts.tsv",
        "family_counts.png",
        "tier_shares.png",
    ]
    lines = (tmp_path / "family_counts.tsv").read_text().splitlines()
    assert lines[0] == "family\ttier\tcount\tshare"
    assert len(lines) == 1 + len(F)
    assert lines[1].startswith("mix\t1\t630\t")
    for path in written[1:]:
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_score_report_files(tmp_path):
    ref = identity_spec(F.BOXPLOT)
    report = ExecutionReport(status=ExecStatus.OK, wall_time=0.1, runtime_spec=ref)
    result = evaluate_candidate(WELL_FORMED_RESPONSE, report, ref)
    written = render_score_report(result.breakdown, tmp_path)
    assert [p.name for p in written] == ["breakdown.json", "reward_breakdown.png"]
    text = (tmp_path / "breakdown.json").read_text()
    assert '"total": 7.5' in text
    assert (tmp_path / "reward_breakdown.png").stat().st_size > 1000


def test_reports_are_reproducible(tmp_path):
    manifest = curate(make_table2_pool(), seed=0)
    render_curation_report(manifest, tmp_path / "a")
    render_curation_report(manifest, tmp_path / "b")
    assert (tmp_path / "a" / "family_counts.tsv").read_bytes() == (
        tmp_path / "b" / "family_counts.tsv"
    ).read_bytes()
