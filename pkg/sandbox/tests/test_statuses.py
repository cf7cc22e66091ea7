"""Status classification and the isolation/determinism/cap promises."""

import json

import pytest

from spec_align_sandbox import run_candidate

PLOT = "import matplotlib.pyplot as plt\nplt.plot([1, 2, 3])\n"


def test_syntax_error_never_executes(tmp_path):
    marker = tmp_path / "ran"
    code = f"open({str(marker)!r}, 'w').close()\nx = (\n"
    report = run_candidate(code, timeout=10)
    assert report["status"] == "syntax_error"
    assert report["runtime_spec"] is None
    assert "SyntaxError" in report["stderr_excerpt"]
    assert not marker.exists()
    assert report["wall_time"] < 0.5


def test_empty_code_is_a_syntax_error():
    for code in ("", "   \n\t  ", "\n\n"):
        report = run_candidate(code, timeout=10)
        assert report["status"] == "syntax_error"
        assert report["stderr_excerpt"] == "empty candidate"


def test_non_string_code_is_a_syntax_error():
    report = run_candidate(None, timeout=10)
    assert report["status"] == "syntax_error"


def test_runtime_error_carries_the_traceback():
    report = run_candidate("raise RuntimeError('kaboom')", timeout=20)
    assert report["status"] == "runtime_error"
    assert report["runtime_spec"] is None
    assert "RuntimeError" in report["stderr_excerpt"]
    assert "kaboom" in report["stderr_excerpt"]


def test_no_figure_is_a_runtime_error():
    report = run_candidate("x = 1 + 1", timeout=20)
    assert report["status"] == "runtime_error"
    assert "no figure produced" in report["stderr_excerpt"]


def test_figure_without_axes_is_a_runtime_error():
    report = run_candidate("import matplotlib.pyplot as plt\nplt.figure()", timeout=20)
    assert report["status"] == "runtime_error"
    assert "no axes" in report["stderr_excerpt"]


def test_clean_run_reports_ok_with_a_spec():
    report = run_candidate(PLOT, timeout=20)
    assert report["status"] == "ok"
    assert isinstance(report["runtime_spec"], dict)
    assert report["wall_time"] > 0


def test_timeout_kills_within_grace():
    report = run_candidate("while True:\n    pass", timeout=2)
    assert report["status"] == "timeout"
    assert report["runtime_spec"] is None
    assert 2.0 <= report["wall_time"] <= 3.0


def test_exit_zero_after_plotting_still_ok():
    report = run_candidate(PLOT + "import sys\nsys.exit(0)\n", timeout=20)
    assert report["status"] == "ok"


def test_nonzero_exit_is_a_runtime_error():
    report = run_candidate("import sys\nsys.exit(3)", timeout=20)
    assert report["status"] == "runtime_error"
    assert "SystemExit: 3" in report["stderr_excerpt"]


def test_stderr_excerpt_is_bounded():
    code = "import sys\nsys.stderr.write('y' * 100_000)\nraise ValueError('tail')\n"
    report = run_candidate(code, timeout=20)
    assert report["status"] == "runtime_error"
    assert len(report["stderr_excerpt"]) <= 4096


def test_same_code_same_spec():
    code = "import numpy as np\nimport matplotlib.pyplot as plt\nplt.plot(np.random.normal(size=16))\n"
    first = run_candidate(code, timeout=20)
    second = run_candidate(code, timeout=20)
    assert first["status"] == second["status"] == "ok"
    assert json.dumps(first["runtime_spec"]) == json.dumps(second["runtime_spec"])


def test_unseeded_generator_is_pinned_too():
    code = (
        "import numpy as np\nimport matplotlib.pyplot as plt\n"
        "plt.plot(np.random.default_rng().normal(size=8))\n"
    )
    first = run_candidate(code, timeout=20)
    second = run_candidate(code, timeout=20)
    assert first["status"] == "ok"
    assert json.dumps(first["runtime_spec"]) == json.dumps(second["runtime_spec"])


def test_requests_cannot_poison_each_other():
    sabotage = (
        "import numpy as np\nimport matplotlib.pyplot as plt\n"
        "np.percentile = None\nplt.rcParams['lines.linewidth'] = 40\nplt.plot([1, 2])\n"
    )
    assert run_candidate(sabotage, timeout=20)["status"] == "ok"
    report = run_candidate("import matplotlib.pyplot as plt\nplt.boxplot([1, 2, 3, 4])", timeout=20)
    assert report["status"] == "ok"
    assert report["runtime_spec"]["code"]["statistical"] == [["1", [1.0, 1.75, 2.5, 3.25, 4.0]]]


def test_memory_ceiling_stops_huge_allocations():
    code = "import numpy as np\na = np.zeros(400_000_000)\n"
    report = run_candidate(code, timeout=30)
    assert report["status"] == "runtime_error"
    assert "MemoryError" in report["stderr_excerpt"]


def test_subprocess_spawning_is_blocked():
    report = run_candidate("import subprocess\nsubprocess.run(['true'])", timeout=20)
    assert report["status"] == "runtime_error"
    assert "PermissionError" in report["stderr_excerpt"]


def test_network_is_blocked():
    report = run_candidate("import socket\nsocket.socket()", timeout=20)
    assert report["status"] == "runtime_error"
    assert "network access is disabled" in report["stderr_excerpt"]


def test_lingering_candidate_threads_do_not_stall_the_verdict():
    code = (
        "import threading, time\nimport matplotlib.pyplot as plt\n"
        "threading.Thread(target=lambda: time.sleep(600)).start()\nplt.plot([1, 2])\n"
    )
    report = run_candidate(code, timeout=10)
    assert report["status"] == "ok"
    assert report["wall_time"] < 5.0


def test_reading_stdin_hits_eof():
    report = run_candidate("input()", timeout=20)
    assert report["status"] == "runtime_error"
    assert "EOFError" in report["stderr_excerpt"]
