"""Append-only, per-line-checksummed event log.

Line 1 is a header carrying the config snapshot and corpus digest; line
``i + 1`` is the record for step ``i``. Each line is a JSON object whose
``sha256`` field hashes the canonical encoding of the remaining fields.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from filelock import FileLock, Timeout

from memcluster.errors import CorruptLog, MemClusterError
from memcluster.memory import StepOutcome
from memcluster.model import Label, Mode, MergeSuggestion, ParsedResponse, ResponseKind

FORMAT_VERSION = 1


class RunLocked(MemClusterError):
    pass


def _canonical(obj: dict[str, Any]) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def seal(record: dict[str, Any]) -> str:
    body = {k: v for k, v in record.items() if k != "sha256"}
    digest = hashlib.sha256(_canonical(body).encode("utf-8")).hexdigest()
    return _canonical({**body, "sha256": digest})


def unseal(line: str, step: int) -> dict[str, Any]:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptLog(step, f"unreadable line: {exc.msg}") from exc
    if not isinstance(record, dict) or "sha256" not in record:
        raise CorruptLog(step, "missing checksum")
    if seal(record) != line:
        raise CorruptLog(step, "checksum mismatch")
    return record


def response_to_record(p: ParsedResponse) -> dict[str, Any]:
    merge = None
    if p.merge is not None:
        merge = {"old": [lab.value for lab in p.merge.order], "into": p.merge.new_label.value}
    return {
        "kind": p.kind.value,
        "label": p.label.value,
        "merge": merge,
        "fallback": p.fallback,
        "warnings": list(p.warnings),
    }


def response_from_record(rec: dict[str, Any], raw: str = "", retries: int = 0) -> ParsedResponse:
    merge = None
    if rec.get("merge"):
        merge = MergeSuggestion.of([Label(v) for v in rec["merge"]["old"]], Label(rec["merge"]["into"]))
    return ParsedResponse(
        ResponseKind(rec["kind"]),
        Label(rec["label"]),
        merge,
        raw=raw,
        warnings=tuple(rec.get("warnings", ())),
        retries=retries,
        fallback=bool(rec.get("fallback", False)),
    )


@dataclass
class RunEvent:
    step: int
    doc_id: str
    mode: Mode
    outcome: StepOutcome
    memory_size_after: int
    retries: int
    timestamp: float
    memory_size_before: int = 0
    threshold: int = 0
    forced: bool = False
    mode_switches: int = 0
    response: ParsedResponse | None = None
    llm_calls: list[dict[str, Any]] = field(default_factory=list)

    def to_record(self) -> dict[str, Any]:
        return {
            "type": "step",
            "step": self.step,
            "doc_id": self.doc_id,
            "mode": self.mode.value,
            "forced": self.forced,
            "threshold": self.threshold,
            "memory_size_before": self.memory_size_before,
            "memory_size_after": self.memory_size_after,
            "mode_switches": self.mode_switches,
            "retries": self.retries,
            "response": response_to_record(self.response) if self.response else None,
            "raw": self.response.raw if self.response else "",
            "outcome": self.outcome.to_dict(),
            "llm_calls": self.llm_calls,
            "timestamp": self.timestamp,
        }


def header_record(config_snapshot: dict[str, Any], corpus_sha256: str, n_docs: int) -> dict[str, Any]:
    return {
        "type": "header",
        "format": FORMAT_VERSION,
        "config": config_snapshot,
        "corpus": {"sha256": corpus_sha256, "n": n_docs},
    }


def read_log(path: str | Path) -> tuple[dict[str, Any], list[dict[str, Any]], int]:
    """Verify and load a log.

    Returns (header, step records, byte length of the valid prefix). A final
    line without a trailing newline is treated as an interrupted write and
    excluded from the valid prefix rather than reported as corruption.
    """
    data = Path(path).read_bytes()
    lines = data.split(b"\n")
    tail = lines.pop()  # b"" when the file ends with a newline
    if not lines:
        raise CorruptLog(0, "log has no complete header line")
    header = unseal(lines[0].decode("utf-8"), 0)
    if header.get("type") != "header":
        raise CorruptLog(0, "first line is not a header")
    steps: list[dict[str, Any]] = []
    for i, raw in enumerate(lines[1:], start=1):
        rec = unseal(raw.decode("utf-8", errors="replace"), i)
        if rec.get("type") != "step" or rec.get("step") != i:
            raise CorruptLog(i, f"expected step {i}")
        steps.append(rec)
    valid = len(data) - len(tail)
    return header, steps, valid


class EventWriter:
    """Appends sealed records; holds an exclusive lock on the log path while open."""

    def __init__(self, path: str | Path, *, fsync: bool = False, truncate_to: int | None = None):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(str(self.path) + ".lock")
        try:
            self._lock.acquire(timeout=0)
        except Timeout as exc:
            raise RunLocked(f"another run holds {self.path}") from exc
        if truncate_to is None:
            self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        else:
            with open(self.path, "r+b") as fh:
                fh.truncate(truncate_to)
            self._fh = open(self.path, "a", encoding="utf-8", newline="\n")
        self.fsync = fsync

    def write(self, record: dict[str, Any]) -> None:
        self._fh.write(seal(record) + "\n")
        self._fh.flush()
        if self.fsync:
            os.fsync(self._fh.fileno())

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()
        self._lock.release()

    def __enter__(self) -> EventWriter:
        return self

    def __exit__(self, *exc) -> None:
        self.close()
