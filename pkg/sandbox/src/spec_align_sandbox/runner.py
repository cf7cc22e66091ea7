"""One candidate, one report: compile gate, capped subprocess, verdict.

``run_candidate`` never raises; every outcome folds into a report dict in
the wire shape with one of four statuses.  A syntax error is decided by a
compile check in this process, so broken code is never executed at all.
Each accepted candidate gets a fresh worker subprocess and a throwaway
working directory, which is what makes requests independent of each other.
"""

from __future__ import annotations

import os
import subprocess
import sys
import tempfile
import time
import traceback

STDERR_EXCERPT_LIMIT = 4096
DEFAULT_TIMEOUT = 30.0

_WORKER_ENV = {
    "MPLBACKEND": "Agg",
    "PYTHONHASHSEED": "0",
    "OMP_NUM_THREADS": "1",
    "OPENBLAS_NUM_THREADS": "1",
    "MKL_NUM_THREADS": "1",
}


def _report(status: str, started: float, stderr: str = "", spec: dict | None = None) -> dict:
    return {
        "status": status,
        "wall_time": round(time.monotonic() - started, 6),
        "runtime_spec": spec,
        "stderr_excerpt": stderr[:STDERR_EXCERPT_LIMIT],
    }


def _read_result(path: str) -> dict | None:
    import json

    try:
        with open(path, "r", encoding="utf-8") as fh:
            outcome = json.load(fh)
    except (OSError, ValueError):
        return None
    return outcome if isinstance(outcome, dict) else None


def run_candidate(code_text: str, timeout: float = DEFAULT_TIMEOUT, family_hint: str | None = None) -> dict:
    """Execute one candidate script and describe what happened.

    Returns a report dict: status, wall_time, runtime_spec (present exactly
    when status is ok) and a bounded stderr excerpt.
    """
    started = time.monotonic()
    if not isinstance(code_text, str):
        return _report("syntax_error", started, "candidate code must be a string")
    if not code_text.strip():
        return _report("syntax_error", started, "empty candidate")
    try:
        compile(code_text, "candidate.py", "exec")
    except SyntaxError as exc:
        detail = "".join(traceback.format_exception_only(exc)).strip()
        return _report("syntax_error", started, detail)
    except (ValueError, RecursionError, MemoryError) as exc:
        return _report("syntax_error", started, f"compile failed: {exc!r}")

    with tempfile.TemporaryDirectory(prefix="spec-align-sandbox-") as tmp:
        result_path = os.path.join(tmp, "result.json")
        workdir = os.path.join(tmp, "work")
        os.mkdir(workdir)
        argv = [sys.executable, "-m", "spec_align_sandbox.worker", result_path, family_hint or ""]
        try:
            proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.DEVNULL,
                stderr=subprocess.PIPE,
                cwd=workdir,
                env={**os.environ, **_WORKER_ENV},
            )
        except OSError as exc:
            return _report("runtime_error", started, f"cannot spawn worker: {exc}")
        try:
            _, stderr_bytes = proc.communicate(code_text.encode("utf-8"), timeout=timeout)
        except subprocess.TimeoutExpired:
            proc.kill()
            _, stderr_bytes = proc.communicate()
            stderr = (stderr_bytes or b"").decode("utf-8", errors="replace")
            return _report("timeout", started, stderr)
        stderr = (stderr_bytes or b"").decode("utf-8", errors="replace")
        outcome = _read_result(result_path)

    if proc.returncode == 0 and outcome is not None and outcome.get("ok") and isinstance(outcome.get("spec"), dict):
        return _report("ok", started, stderr, outcome["spec"])
    if outcome is not None and not outcome.get("ok"):
        message = str(outcome.get("error") or "candidate failed")
        detail = stderr if message in stderr else f"{message}\n{stderr}".strip()
        return _report("runtime_error", started, detail)
    if proc.returncode and proc.returncode < 0:
        return _report("runtime_error", started, f"worker killed by signal {-proc.returncode}\n{stderr}".strip())
    return _report("runtime_error", started, f"worker exited with {proc.returncode}\n{stderr}".strip())
