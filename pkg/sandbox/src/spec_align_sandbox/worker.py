"""Worker child: executes exactly one candidate script and exits.

Invoked as ``python -m spec_align_sandbox.worker RESULT_PATH [FAMILY_HINT]``
with the candidate source on stdin.  The heavy imports happen first, then
the resource caps come down, the RNGs are pinned, and the code runs under
the capture shims.  The outcome lands in RESULT_PATH as a one-object JSON
file: ``{"ok": true, "spec": ...}`` or ``{"ok": false, "error": ...}``.

The process always leaves through ``os._exit`` so candidate threads that
refuse to die cannot hold the exit hostage.
"""

from __future__ import annotations

import json
import os
import sys
import traceback

# Allocation budget for the candidate itself.  RLIMIT_AS counts virtual
# size including the interpreter and library mappings, so the cap is
# applied relative to the post-import baseline.
MEMORY_BUDGET_BYTES = 1 << 30

CANDIDATE_FILENAME = "candidate.py"


def _baseline_vm_bytes() -> int:
    try:
        with open("/proc/self/statm", "r", encoding="ascii") as fh:
            pages = int(fh.read().split()[0])
        return pages * os.sysconf("SC_PAGE_SIZE")
    except (OSError, ValueError, IndexError):
        return 0


def _apply_limits() -> None:
    import resource

    cap = _baseline_vm_bytes() + MEMORY_BUDGET_BYTES
    for limit, value in (
        (resource.RLIMIT_AS, cap),
        (resource.RLIMIT_CORE, 0),
    ):
        try:
            resource.setrlimit(limit, (value, value))
        except (ValueError, OSError):
            pass
    # not enforced for root, hence the interpreter-level spawn block below
    try:
        _, hard = resource.getrlimit(resource.RLIMIT_NPROC)
        resource.setrlimit(resource.RLIMIT_NPROC, (1, hard))
    except (ValueError, OSError):
        pass


def _block_spawn() -> None:
    import subprocess

    def denied(*args, **kwargs):
        raise PermissionError("process spawning is disabled in the sandbox")

    for name in dir(os):
        if name.startswith(("exec", "spawn", "fork", "posix_spawn")):
            setattr(os, name, denied)
    os.system = denied
    subprocess.Popen = denied
    subprocess.run = denied
    subprocess.call = denied
    subprocess.check_call = denied
    subprocess.check_output = denied


def _block_network() -> None:
    import socket

    def denied(*args, **kwargs):
        raise OSError("network access is disabled in the sandbox")

    socket.socket = denied
    socket.socketpair = denied
    socket.create_connection = denied
    socket.create_server = denied


def _pin_seeds() -> None:
    import random

    import numpy as np

    random.seed(0)
    np.random.seed(0)
    unseeded_rng = np.random.default_rng

    def default_rng(seed=None):
        return unseeded_rng(0 if seed is None else seed)

    np.random.default_rng = default_rng


def main() -> None:
    result_path = sys.argv[1]
    family_hint = sys.argv[2] if len(sys.argv) > 2 and sys.argv[2] else None
    code = sys.stdin.buffer.read().decode("utf-8", errors="replace")

    def finish(payload: dict, exit_code: int) -> None:
        try:
            blob = json.dumps(payload, allow_nan=False)
        except ValueError:
            blob = json.dumps({"ok": False, "error": "runtime spec not serializable"})
            exit_code = 1
        with open(result_path, "w", encoding="utf-8") as fh:
            fh.write(blob)
        sys.stderr.flush()
        os._exit(exit_code)

    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.show = lambda *args, **kwargs: None
    matplotlib.figure.Figure.show = lambda *args, **kwargs: None

    from . import capture

    store = capture.install()
    _pin_seeds()
    _apply_limits()
    _block_spawn()
    _block_network()

    namespace = {
        "__name__": "__main__",
        "__file__": os.path.abspath(CANDIDATE_FILENAME),
    }
    try:
        exec(compile(code, CANDIDATE_FILENAME, "exec"), namespace)
    except SystemExit as exc:
        if exc.code not in (None, 0):
            finish({"ok": False, "error": f"SystemExit: {exc.code}"}, 1)
    except BaseException as exc:
        traceback.print_exc()
        finish({"ok": False, "error": f"{type(exc).__name__}: {exc}"}, 1)

    try:
        spec = capture.snapshot(store, family_hint)
    except capture.CaptureError as exc:
        finish({"ok": False, "error": str(exc)}, 1)
    except BaseException as exc:
        traceback.print_exc()
        finish({"ok": False, "error": f"introspection failed: {type(exc).__name__}: {exc}"}, 1)
    finish({"ok": True, "spec": spec}, 0)


if __name__ == "__main__":
    main()
