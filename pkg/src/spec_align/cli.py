"""Command line entry points: validate, score, serve, curate, advantage."""

from __future__ import annotations

import argparse
import json
import os
import queue
import socketserver
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .chartspec import InvariantError, SchemaError, canonical_dumps, parse_spec
from .curation import (
    DEFAULT_TIERS,
    FAMILY_TIER,
    EmptyPool,
    curate,
    load_pool,
    tiers_from_dict,
    write_manifest,
)
from .execution import parse_report
from .families import CanonicalFamily, UnknownLabel
from .grpo import group_advantages
from .reward import DEFAULT_CONFIG, InvalidSpec, RewardConfig, evaluate_candidate, extract_code_block
from .sandboxclient import SandboxClient, SandboxUnreachable

SANDBOX_ENV = "SPEC_ALIGN_SANDBOX"


def _load_config(path: str | None) -> tuple[RewardConfig, dict]:
    if path is None:
        return DEFAULT_CONFIG, dict(DEFAULT_TIERS)
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return RewardConfig.from_dict(data), tiers_from_dict(data.get("tiers"))


def _info(message: str) -> None:
    print(f"[INFO] {message}", file=sys.stderr)


# ---------------------------------------------------------------------------
# validate

def cmd_validate(args) -> int:
    failures = 0
    for path in args.specs:
        data = Path(path).read_bytes()
        try:
            parse_spec(data)
        except SchemaError as exc:
            print(f"{path}: schema error: {exc}")
            failures += 1
            continue
        except InvariantError as exc:
            print(f"{path}: {len(exc.violations)} violation(s)")
            for violation in exc.violations:
                print(f"  {violation}")
            failures += 1
            continue
        print(f"{path}: ok")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# score

def _resolve_sandbox(args) -> str | None:
    return getattr(args, "sandbox", None) or os.environ.get(SANDBOX_ENV)


def cmd_score(args) -> int:
    cfg, _ = _load_config(args.config)
    response_text = Path(args.response).read_text(encoding="utf-8")
    ref = parse_spec(Path(args.ref_spec).read_bytes())
    if args.no_exec:
        with open(args.no_exec, "r", encoding="utf-8") as fh:
            report = parse_report(json.load(fh))
    else:
        command = _resolve_sandbox(args)
        if not command:
            raise SandboxUnreachable(
                f"no sandbox configured: pass --sandbox, set {SANDBOX_ENV}, or use --no-exec REPORT"
            )
        code = extract_code_block(response_text, cfg)
        with SandboxClient(command) as client:
            report = client.run(code, timeout=args.timeout, family_hint=ref.family.value)
    result = evaluate_candidate(response_text, report, ref, cfg=cfg)
    print(canonical_dumps(result.breakdown.to_dict()))
    for diagnostic in result.diagnostics:
        _info(diagnostic)
    if args.report_dir:
        from .reporting import render_score_report

        for path in render_score_report(result.breakdown, args.report_dir):
            _info(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# serve

class _Session:
    """One serve connection: ordered responses, remembered totals for groups."""

    def __init__(self, cfg: RewardConfig, sandbox_command: str | None, workers: int, inline_only: bool):
        self.cfg = cfg
        self.sandbox_command = sandbox_command
        self.workers = max(1, workers)
        self.inline_only = inline_only
        self._local = threading.local()
        self._clients: list[SandboxClient] = []
        self._clients_lock = threading.Lock()

    def _client(self) -> SandboxClient:
        client = getattr(self._local, "client", None)
        if client is None:
            client = SandboxClient(self.sandbox_command)
            self._local.client = client
            with self._clients_lock:
                self._clients.append(client)
        return client

    def _score_one(self, request: dict, line_no: int):
        rid = request.get("id")
        try:
            if rid is None:
                raise KeyError("id")
            response_text = request["response_text"]
            if "ref_spec" in request and request["ref_spec"] is not None:
                ref = parse_spec(request["ref_spec"])
            else:
                ref = parse_spec(Path(request["ref_spec_path"]).read_bytes())
            cfg = RewardConfig.from_dict(request["config"]) if request.get("config") else self.cfg
            if request.get("report") is not None:
                report = parse_report(request["report"])
            elif self.inline_only or not self.sandbox_command:
                raise SandboxUnreachable("request carries no report and no sandbox is configured")
            else:
                code = extract_code_block(response_text, cfg)
                report = self._client().run(
                    code,
                    timeout=float(request.get("timeout", 30.0)),
                    family_hint=request.get("family_hint") or ref.family.value,
                )
            result = evaluate_candidate(response_text, report, ref, cfg=cfg)
            response = {
                "id": rid,
                "breakdown": result.breakdown.to_dict(),
                "execution_status": report.status.value,
                "diagnostics": list(result.diagnostics),
            }
            return rid, result.breakdown.total, response
        except KeyError as exc:
            return None, None, {"error": f"missing field {exc}", "id": rid, "line": line_no}
        except (SchemaError, InvariantError, InvalidSpec, SandboxUnreachable, OSError, ValueError) as exc:
            return None, None, {"error": str(exc), "id": rid, "line": line_no}

    def serve(self, in_fh, out_fh) -> int:
        totals: dict[str, float] = {}
        out_queue: queue.Queue = queue.Queue()
        write_lock = threading.Lock()

        def emit(obj: dict) -> None:
            with write_lock:
                out_fh.write(canonical_dumps(obj) + "\n")
                out_fh.flush()

        def emitter() -> None:
            while True:
                item = out_queue.get()
                if item is None:
                    return
                kind, payload = item
                if kind == "future":
                    rid, total, response = payload.result()
                    if rid is not None:
                        totals[rid] = total
                    emit(response)
                elif kind == "group":
                    ids, line_no = payload
                    missing = [i for i in ids if i not in totals]
                    if missing:
                        emit({"error": f"unknown ids in group: {missing}", "line": line_no})
                    else:
                        advantages = group_advantages([totals[i] for i in ids])
                        emit({"group": ids, "advantages": [float(a) for a in advantages]})
                else:
                    emit(payload)

        emitter_thread = threading.Thread(target=emitter, daemon=True)
        emitter_thread.start()
        executor = ThreadPoolExecutor(max_workers=self.workers)
        try:
            for line_no, line in enumerate(in_fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    message = json.loads(line)
                    if not isinstance(message, dict):
                        raise ValueError(f"expected object, got {type(message).__name__}")
                except ValueError as exc:
                    out_queue.put(("raw", {"error": f"malformed request: {exc}", "line": line_no}))
                    continue
                if "group" in message:
                    ids = message["group"]
                    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
                        out_queue.put(("raw", {"error": "group must be a list of ids", "line": line_no}))
                        continue
                    out_queue.put(("group", (ids, line_no)))
                else:
                    out_queue.put(("future", executor.submit(self._score_one, message, line_no)))
        finally:
            out_queue.put(None)
            emitter_thread.join()
            executor.shutdown(wait=True)
            with self._clients_lock:
                for client in self._clients:
                    client.close()
                self._clients.clear()
        return 0


def _parse_listen(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    return host or "127.0.0.1", int(port)


def cmd_serve(args) -> int:
    cfg, _ = _load_config(args.config)
    session_args = dict(
        cfg=cfg,
        sandbox_command=None if args.no_exec else _resolve_sandbox(args),
        workers=args.workers,
        inline_only=bool(args.no_exec),
    )
    if args.listen:
        host, port = _parse_listen(args.listen)

        class Handler(socketserver.StreamRequestHandler):
            def handle(self) -> None:
                session = _Session(**session_args)
                reader = (raw.decode("utf-8") for raw in self.rfile)
                session.serve(reader, _TextSocketWriter(self.wfile))

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        with Server((host, port), Handler) as server:
            _info(f"listening on {host}:{server.server_address[1]}")
            try:
                server.serve_forever()
            except KeyboardInterrupt:
                pass
        return 0
    return _Session(**session_args).serve(sys.stdin, sys.stdout)


class _TextSocketWriter:
    def __init__(self, wfile):
        self._wfile = wfile

    def write(self, text: str) -> None:
        self._wfile.write(text.encode("utf-8"))

    def flush(self) -> None:
        self._wfile.flush()


# ---------------------------------------------------------------------------
# curate

def _print_curation_table(manifest, pool, tiers) -> None:
    available: dict[str, int] = {}
    for entry in pool:
        available[entry.family.value] = available.get(entry.family.value, 0) + 1
    sig_counts: dict[str, int] = {}
    for key in manifest.signatures:
        family = key.split("|", 1)[0]
        sig_counts[family] = sig_counts.get(family, 0) + 1
    total = manifest.total or 1
    header = f"{'family':<12}{'signatures':>11}{'available':>11}{'selected':>10}{'share':>8}"
    for tier in (1, 2, 3):
        print(f"Tier {tier} (quota {tiers[tier].rho} per signature)")
        print(header)
        for family in CanonicalFamily:
            if FAMILY_TIER[family] != tier:
                continue
            name = family.value
            count = manifest.families.get(name, 0)
            print(
                f"{name:<12}{sig_counts.get(name, 0):>11}{available.get(name, 0):>11}"
                f"{count:>10}{100.0 * count / total:>7.1f}%"
            )
        print()
    print(
        f"{'Total':<12}{len(manifest.signatures):>11}{len(pool):>11}{manifest.total:>10}{100.0:>7.1f}%"
    )


def cmd_curate(args) -> int:
    _, tiers = _load_config(args.config)
    pool = load_pool(args.pool)
    manifest = curate(pool, tiers=tiers, seed=args.seed, budget=args.budget)
    write_manifest(manifest, args.out)
    _print_curation_table(manifest, pool, tiers)
    for tier, removed in sorted(manifest.trimmed.items()):
        print(f"Budget {args.budget}: trimmed {removed} entries from tier {tier}")
    if args.budget is not None and manifest.total > args.budget:
        _info(f"tier 1 quotas alone exceed the budget ({manifest.total} > {args.budget})")
    _info(f"wrote {manifest.total} entries to {args.out}")
    if args.report_dir:
        from .reporting import render_curation_report

        for path in render_curation_report(manifest, args.report_dir):
            _info(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# advantage

def cmd_advantage(args) -> int:
    if args.rewards and args.rewards != "-":
        raw = Path(args.rewards).read_text(encoding="utf-8")
    else:
        raw = sys.stdin.read()
    data = json.loads(raw)
    rewards = data["rewards"] if isinstance(data, dict) else data
    advantages = group_advantages(rewards)
    print(canonical_dumps({"advantages": [float(a) for a in advantages]}))
    return 0


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spec-align", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check spec files against the schema and invariants")
    p_validate.add_argument("specs", nargs="+", help="spec document paths")
    p_validate.set_defaults(func=cmd_validate)

    p_score = sub.add_parser("score", help="score one response against a reference spec")
    p_score.add_argument("response", help="model response text file")
    p_score.add_argument("ref_spec", help="reference spec document")
    p_score.add_argument("--config", help="config file (JSON)")
    p_score.add_argument("--sandbox", help="sandbox executable command")
    p_score.add_argument("--no-exec", metavar="REPORT", help="use this execution report file instead of running code")
    p_score.add_argument("--timeout", type=float, default=30.0, help="sandbox timeout in seconds")
    p_score.add_argument("--report-dir", help="also render breakdown figures into this directory")
    p_score.set_defaults(func=cmd_score)

    p_serve = sub.add_parser("serve", help="score request lines from stdin (or a TCP socket)")
    p_serve.add_argument("--config", help="config file (JSON)")
    p_serve.add_argument("--sandbox", help="sandbox executable command")
    p_serve.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="sandbox worker pool size")
    p_serve.add_argument("--no-exec", action="store_true", help="require inline execution reports")
    p_serve.add_argument("--listen", metavar="HOST:PORT", help="serve over TCP instead of stdio")
    p_serve.set_defaults(func=cmd_serve)

    p_curate = sub.add_parser("curate", help="select a structure-balanced subset of a pool")
    p_curate.add_argument("pool", help="line-delimited pool file")
    p_curate.add_argument("--out", default="manifest.jsonl", help="manifest output path")
    p_curate.add_argument("--config", help="config file (JSON)")
    p_curate.add_argument("--seed", type=int, default=0, help="sampling seed")
    p_curate.add_argument("--budget", type=int, help="total sample budget")
    p_curate.add_argument("--report-dir", help="also render distribution figures into this directory")
    p_curate.set_defaults(func=cmd_curate)

    p_adv = sub.add_parser("advantage", help="group-normalize a reward list")
    p_adv.add_argument("rewards", nargs="?", default="-", help="JSON file with a reward array (default stdin)")
    p_adv.set_defaults(func=cmd_advantage)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SandboxUnreachable as exc:
        _info(f"sandbox error: {exc}")
        return 3
    except (OSError, json.JSONDecodeError) as exc:
        _info(f"i/o error: {exc}")
        return 2
    except (SchemaError, InvariantError, InvalidSpec, EmptyPool, UnknownLabel, ValueError) as exc:
        _info(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
