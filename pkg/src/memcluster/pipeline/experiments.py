"""Offset sweeps and ablation variants, each run on fresh state."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from memcluster.errors import MemClusterError, MissingGold
from memcluster.gateway.client import ChatClient
from memcluster.metrics import MetricsReport, format_table
from memcluster.model import Document, Mode, RunConfig
from memcluster.pipeline.runner import run_clustering, save_artifacts

log = logging.getLogger(__name__)

DEFAULT_OFFSETS = (-10, 0, 10, 50, 100, 200)


@dataclass(frozen=True)
class ResultRow:
    key: str
    metrics: MetricsReport | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.metrics is not None


@dataclass(frozen=True)
class ExperimentReport:
    key_header: str
    rows: tuple[ResultRow, ...]

    def table(self) -> str:
        return format_table([(r.key, r.metrics) for r in self.rows], key_header=self.key_header, k_column=True)

    def to_json(self) -> dict:
        return {
            "key": self.key_header,
            "rows": [
                {"key": r.key, "metrics": r.metrics.to_dict() if r.metrics else None, "error": r.error}
                for r in self.rows
            ],
        }


def _require_gold(corpus: Sequence[Document]) -> None:
    if any(d.gold_label is None for d in corpus):
        raise MissingGold("experiments need gold labels on every document")


def _run_cell(
    key: str, corpus: Sequence[Document], make_config, client: ChatClient, out_dir: Path | None
) -> ResultRow:
    try:
        config = make_config()
        events_path = out_dir / "events.jsonl" if out_dir is not None else None
        artifacts = run_clustering(corpus, config, client, events_path=events_path)
        if out_dir is not None:
            save_artifacts(artifacts, out_dir, name=key)
        return ResultRow(key, artifacts.metrics)
    except MemClusterError as exc:
        log.error("cell %s failed: %s", key, exc)
        return ResultRow(key, None, f"{type(exc).__name__}: {exc}")


def format_offset(offset: int) -> str:
    return f"{offset:+d}" if offset else "0"


def sweep_offsets(
    corpus: Sequence[Document],
    base_config: RunConfig,
    offsets: Sequence[int],
    client: ChatClient,
    out_dir: str | Path | None = None,
) -> ExperimentReport:
    """One full run per transition offset, sequentially. Failed cells are kept as marked rows."""
    if not offsets:
        raise ValueError("offsets must be non-empty")
    _require_gold(corpus)
    rows = []
    for off in offsets:
        cell_dir = Path(out_dir) / f"offset_{format_offset(off)}" if out_dir is not None else None
        rows.append(_run_cell(format_offset(off), corpus, lambda off=off: base_config.with_(offset=off), client, cell_dir))
    return ExperimentReport("Offset", tuple(rows))


ABLATIONS: dict[str, dict] = {
    "Default": {},
    "w/o Memory": {"use_memory": False},
    "w/o Few-shot": {"use_fewshot": False},
    "w/o M+FS": {"use_memory": False, "use_fewshot": False},
    "Strict Prompt": {"forced_mode": Mode.STRICT},
    "Relaxed Prompt": {"forced_mode": Mode.RELAXED},
}


def ablate(
    corpus: Sequence[Document],
    base_config: RunConfig,
    client: ChatClient,
    out_dir: str | Path | None = None,
) -> ExperimentReport:
    _require_gold(corpus)
    rows = []
    for name, changes in ABLATIONS.items():
        slug = name.lower().replace("/", "").replace("+", "").replace(" ", "_")
        cell_dir = Path(out_dir) / slug if out_dir is not None else None
        rows.append(_run_cell(name, corpus, lambda c=changes: base_config.with_(**c), client, cell_dir))
    return ExperimentReport("Method Variant", tuple(rows))
