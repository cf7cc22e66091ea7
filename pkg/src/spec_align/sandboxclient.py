"""Client side of the sandbox wire protocol.

The sandbox is a separate executable speaking line-delimited JSON: one
request object in, one execution report out, flushed per line.  The client
keeps the process alive across requests and enforces a read deadline so a
wedged sandbox surfaces as SandboxUnreachable instead of a hang.
"""

from __future__ import annotations

import json
import select
import shlex
import subprocess

from .execution import ExecutionReport, parse_report

READ_GRACE_SECONDS = 10.0


class SandboxUnreachable(RuntimeError):
    """The sandbox executable could not be started or stopped responding."""


class SandboxClient:
    def __init__(self, command: str):
        self.command = command
        argv = shlex.split(command)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise SandboxUnreachable(f"cannot start sandbox {command!r}: {exc}") from None
        self._counter = 0

    def run(
        self,
        code: str,
        timeout: float = 30.0,
        family_hint: str | None = None,
        request_id: str | None = None,
    ) -> ExecutionReport:
        """Execute one candidate script and return its report."""
        if self._proc.poll() is not None:
            raise SandboxUnreachable(f"sandbox {self.command!r} exited with {self._proc.returncode}")
        self._counter += 1
        rid = request_id if request_id is not None else f"req-{self._counter}"
        request = {"id": rid, "code": code, "timeout": timeout, "family_hint": family_hint}
        try:
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise SandboxUnreachable(f"sandbox {self.command!r} pipe broke: {exc}") from None
        line = self._read_line(deadline=timeout + READ_GRACE_SECONDS)
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SandboxUnreachable(f"sandbox sent invalid JSON: {exc}") from None
        if payload.get("id") not in (None, rid):
            raise SandboxUnreachable(f"sandbox answered request {payload.get('id')!r}, expected {rid!r}")
        return parse_report(payload)

    def _read_line(self, deadline: float) -> str:
        ready, _, _ = select.select([self._proc.stdout], [], [], deadline)
        if not ready:
            self._proc.kill()
            raise SandboxUnreachable(f"sandbox {self.command!r} did not answer within {deadline:.0f}s")
        line = self._proc.stdout.readline()
        if not line:
            raise SandboxUnreachable(f"sandbox {self.command!r} closed its output")
        return line

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5.0)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()

    def __enter__(self) -> "SandboxClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
