"""Execution reports: the outcome of running candidate plotting code."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .chartspec import ChartSpec, SchemaError, parse_spec, to_dict

STDERR_EXCERPT_LIMIT = 4096


class ExecStatus(str, Enum):
    OK = "ok"
    SYNTAX_ERROR = "syntax_error"
    RUNTIME_ERROR = "runtime_error"
    TIMEOUT = "timeout"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ExecutionReport:
    """What happened when a candidate script ran.

    ``runtime_spec`` is the chart spec recovered from the live figure and is
    present exactly when status is ok.
    """

    status: ExecStatus
    wall_time: float = 0.0
    runtime_spec: ChartSpec | None = None
    stderr_excerpt: str = ""

    @property
    def ok(self) -> bool:
        return self.status is ExecStatus.OK


def parse_report(data: dict) -> ExecutionReport:
    """Build a report from its wire/file dict form."""
    if not isinstance(data, dict):
        raise SchemaError("$", f"expected object, got {type(data).__name__}")
    try:
        status = ExecStatus(data["status"])
    except KeyError:
        raise SchemaError("status", "missing field") from None
    except ValueError:
        allowed = ", ".join(s.value for s in ExecStatus)
        raise SchemaError("status", f"expected one of [{allowed}], got {data['status']!r}") from None
    runtime_spec = data.get("runtime_spec")
    spec = None if runtime_spec is None else parse_spec(runtime_spec)
    wall_time = data.get("wall_time", 0.0)
    if isinstance(wall_time, bool) or not isinstance(wall_time, (int, float)):
        raise SchemaError("wall_time", f"expected number, got {type(wall_time).__name__}")
    excerpt = data.get("stderr_excerpt", "")
    if not isinstance(excerpt, str):
        raise SchemaError("stderr_excerpt", f"expected string, got {type(excerpt).__name__}")
    return ExecutionReport(
        status=status,
        wall_time=float(wall_time),
        runtime_spec=spec,
        stderr_excerpt=excerpt[:STDERR_EXCERPT_LIMIT],
    )


def report_to_dict(report: ExecutionReport) -> dict:
    return {
        "status": report.status.value,
        "wall_time": float(report.wall_time),
        "runtime_spec": None if report.runtime_spec is None else to_dict(report.runtime_spec),
        "stderr_excerpt": report.stderr_excerpt[:STDERR_EXCERPT_LIMIT],
    }
