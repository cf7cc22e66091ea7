"""Line-delimited JSON loop: one request in, one report out, flushed.

Requests carry ``{id, code, timeout, family_hint}``.  A malformed line
still gets exactly one report (status runtime_error with the complaint in
the stderr excerpt) and the loop keeps going; end of input is a clean
exit.  Responses echo the request id when one was readable.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .runner import DEFAULT_TIMEOUT, STDERR_EXCERPT_LIMIT, run_candidate


class BadRequest(ValueError):
    pass


def _parse_request(raw: str) -> tuple[object, str, float, str | None]:
    try:
        request = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise BadRequest(f"invalid JSON: {exc}") from None
    if not isinstance(request, dict):
        raise BadRequest(f"expected object, got {type(request).__name__}")
    rid = request.get("id")
    code = request.get("code")
    if not isinstance(code, str):
        raise BadRequest("code must be a string", rid)
    timeout = request.get("timeout", DEFAULT_TIMEOUT)
    if isinstance(timeout, bool) or not isinstance(timeout, (int, float)) or not math.isfinite(timeout) or timeout <= 0:
        raise BadRequest("timeout must be a positive number", rid)
    hint = request.get("family_hint")
    if hint is not None and not isinstance(hint, str):
        raise BadRequest("family_hint must be a string or null", rid)
    return rid, code, float(timeout), hint


def _emit(out_stream, report: dict) -> None:
    try:
        line = json.dumps(report, allow_nan=False)
    except ValueError:
        fallback = {
            "status": "runtime_error",
            "wall_time": 0.0,
            "runtime_spec": None,
            "stderr_excerpt": "report not serializable",
        }
        if "id" in report:
            fallback["id"] = report["id"]
        line = json.dumps(fallback)
    out_stream.write(line + "\n")
    out_stream.flush()


def serve(in_stream=None, out_stream=None) -> int:
    """Answer request lines until EOF; always returns 0."""
    fin = sys.stdin if in_stream is None else in_stream
    fout = sys.stdout if out_stream is None else out_stream
    try:
        for raw in fin:
            if not raw.strip():
                continue
            try:
                rid, code, timeout, hint = _parse_request(raw)
            except BadRequest as exc:
                report = {
                    "status": "runtime_error",
                    "wall_time": 0.0,
                    "runtime_spec": None,
                    "stderr_excerpt": f"bad request: {exc.args[0]}"[:STDERR_EXCERPT_LIMIT],
                }
                if len(exc.args) > 1 and exc.args[1] is not None:
                    report["id"] = exc.args[1]
                _emit(fout, report)
                continue
            report = run_candidate(code, timeout=timeout, family_hint=hint)
            if rid is not None:
                report["id"] = rid
            _emit(fout, report)
    except BrokenPipeError:
        pass
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spec-align-sandbox",
        description="serve the sandbox wire protocol over stdio",
    )
    parser.parse_args(argv)
    return serve()


if __name__ == "__main__":
    sys.exit(main())
