"""The N-step clustering loop, replay-based resume, and evaluation."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from memcluster.errors import ConfigError, ConfigMismatch, CorruptLog, MissingGold
from memcluster.gateway.client import ChatClient
from memcluster.gateway.retry import classify_with_retry
from memcluster.granularity import select_mode
from memcluster.memory import StepOutcome, core_step, derive_partition
from memcluster.metrics import LabelVectorPair, MetricsReport, format_table
from memcluster.model import AssignmentLog, Document, MemoryState, Mode, Partition, RunConfig
from memcluster.pipeline.corpus import corpus_digest, processing_order
from memcluster.pipeline.events import (
    EventWriter,
    RunEvent,
    header_record,
    read_log,
    response_from_record,
)
from memcluster.prompts import build_prompt_pair

log = logging.getLogger(__name__)

StepHook = Callable[[MemoryState, AssignmentLog, RunEvent], None]


@dataclass
class RunArtifacts:
    partition: Partition
    final_memory: MemoryState
    events: list[RunEvent]
    config_snapshot: RunConfig
    metrics: MetricsReport | None = None
    gold_labels: dict[str, str] | None = field(default=None, repr=False)
    primary_calls: int = 0

    @property
    def mode_switches(self) -> int:
        return self.events[-1].mode_switches if self.events else 0


@dataclass
class _State:
    memory: MemoryState = field(default_factory=MemoryState)
    alog: AssignmentLog = field(default_factory=AssignmentLog)
    events: list[RunEvent] = field(default_factory=list)
    primary_calls: int = 0


def _gold_map(corpus: Sequence[Document]) -> dict[str, str] | None:
    if all(d.gold_label is not None for d in corpus):
        return {d.id: d.gold_label for d in corpus}  # type: ignore[misc]
    return None


def _drain_calls(client: Any, seen: int) -> tuple[list[dict[str, Any]], int]:
    history = getattr(client, "history", None)
    if history is None:
        return [], seen
    return [rec.to_dict() for rec in history[seen:]], len(history)


def _execute(
    order: Sequence[Document],
    config: RunConfig,
    client: ChatClient,
    state: _State,
    writer: EventWriter | None,
    on_step: StepHook | None,
    clock: Callable[[], float],
) -> None:
    calls_seen = len(getattr(client, "history", []) or [])
    for idx in range(len(state.events), len(order)):
        doc = order[idx]
        step = idx + 1
        decision = select_mode(len(state.memory), config, step)
        view = state.memory.labels if config.use_memory else []
        prompt = build_prompt_pair(doc, view, decision.mode, config)
        state.primary_calls += 1
        response = classify_with_retry(doc, prompt, client, config, step)
        size_before = len(state.memory)
        state.memory, state.alog, outcome = core_step(state.memory, state.alog, doc, response, step)
        calls, calls_seen = _drain_calls(client, calls_seen)
        prev = state.events[-1] if state.events else None
        switches = (prev.mode_switches if prev else 0) + (1 if prev and prev.mode is not decision.mode else 0)
        event = RunEvent(
            step=step,
            doc_id=doc.id,
            mode=decision.mode,
            outcome=outcome,
            memory_size_after=len(state.memory),
            retries=response.retries,
            timestamp=round(clock(), 3),
            memory_size_before=size_before,
            threshold=decision.threshold,
            forced=decision.forced,
            mode_switches=switches,
            response=response,
            llm_calls=calls,
        )
        state.events.append(event)
        if writer is not None:
            writer.write(event.to_record())
        if on_step is not None:
            on_step(state.memory, state.alog, event)


def _finish(config: RunConfig, corpus: Sequence[Document], state: _State) -> RunArtifacts:
    artifacts = RunArtifacts(
        partition=derive_partition(state.alog),
        final_memory=state.memory,
        events=state.events,
        config_snapshot=config,
        gold_labels=_gold_map(corpus),
        primary_calls=state.primary_calls,
    )
    if artifacts.gold_labels is not None:
        artifacts.metrics = evaluate_run(artifacts)
    log.info(
        "run finished: %d docs, K=%d, %d mode switches",
        len(state.alog),
        artifacts.partition.k,
        artifacts.mode_switches,
    )
    return artifacts


def run_clustering(
    corpus: Sequence[Document],
    config: RunConfig,
    client: ChatClient,
    *,
    events_path: str | Path | None = None,
    on_step: StepHook | None = None,
    clock: Callable[[], float] = time.time,
    fsync: bool = False,
) -> RunArtifacts:
    """Cluster ``corpus`` in one pass: exactly one primary model call per document.

    With ``events_path`` every step is persisted as it completes, so a
    transport or auth failure leaves a log that ``resume_run`` can continue.
    """
    if not corpus:
        raise ConfigError("corpus is empty")
    order = processing_order(corpus, config)
    state = _State()
    writer = None
    if events_path is not None:
        writer = EventWriter(events_path, fsync=fsync)
    try:
        if writer is not None:
            writer.write(header_record(config.to_dict(), corpus_digest(order), len(order)))
        _execute(order, config, client, state, writer, on_step, clock)
    finally:
        if writer is not None:
            writer.close()
    return _finish(config, corpus, state)


def replay(
    steps: Sequence[dict[str, Any]], order: Sequence[Document], config: RunConfig, on_step: StepHook | None = None
) -> _State:
    """Rebuild state from step records, checking each against the engine's own result."""
    state = _State()
    if len(steps) > len(order):
        raise CorruptLog(len(order) + 1, "log has more steps than the corpus has documents")
    for rec in steps:
        step = rec["step"]
        doc = order[step - 1]
        if rec["doc_id"] != doc.id:
            raise CorruptLog(step, f"expected document {doc.id!r}, log has {rec['doc_id']!r}")
        decision = select_mode(len(state.memory), config, step)
        if rec["mode"] != decision.mode.value or rec["memory_size_before"] != len(state.memory):
            raise CorruptLog(step, "logged mode decision disagrees with replayed memory")
        if rec.get("response") is None:
            raise CorruptLog(step, "missing response")
        response = response_from_record(rec["response"], rec.get("raw", ""), rec.get("retries", 0))
        state.memory, state.alog, outcome = core_step(state.memory, state.alog, doc, response, step)
        if outcome.to_dict() != rec["outcome"] or len(state.memory) != rec["memory_size_after"]:
            raise CorruptLog(step, "replayed outcome disagrees with the log")
        event = RunEvent(
            step=step,
            doc_id=doc.id,
            mode=Mode(rec["mode"]),
            outcome=outcome,
            memory_size_after=rec["memory_size_after"],
            retries=rec.get("retries", 0),
            timestamp=rec["timestamp"],
            memory_size_before=rec["memory_size_before"],
            threshold=rec["threshold"],
            forced=rec["forced"],
            mode_switches=rec["mode_switches"],
            response=response,
            llm_calls=rec.get("llm_calls", []),
        )
        state.events.append(event)
        state.primary_calls += 1
        if on_step is not None:
            on_step(state.memory, state.alog, event)
    return state


def resume_run(
    events_path: str | Path,
    corpus: Sequence[Document],
    config: RunConfig,
    client: ChatClient,
    *,
    on_step: StepHook | None = None,
    clock: Callable[[], float] = time.time,
    fsync: bool = False,
) -> RunArtifacts:
    """Replay a partial log and continue from the first unprocessed document."""
    header, steps, valid_bytes = read_log(events_path)
    if header.get("config") != config.to_dict():
        raise ConfigMismatch("run configuration differs from the logged snapshot")
    order = processing_order(corpus, config)
    if header.get("corpus", {}).get("sha256") != corpus_digest(order):
        raise ConfigMismatch("corpus differs from the one the log was started with")
    state = replay(steps, order, config, on_step)
    log.info("resuming at step %d of %d", len(state.events) + 1, len(order))
    with EventWriter(events_path, fsync=fsync, truncate_to=valid_bytes) as writer:
        _execute(order, config, client, state, writer, on_step, clock)
    return _finish(config, corpus, state)


def evaluate_run(artifacts: RunArtifacts) -> MetricsReport:
    gold = artifacts.gold_labels
    assignment = artifacts.partition.assignment()
    if gold is None or any(doc_id not in gold for doc_id in assignment):
        raise MissingGold("every document needs a gold label for evaluation")
    ids = list(assignment)
    pair = LabelVectorPair.encode([assignment[d] for d in ids], [gold[d] for d in ids])
    return MetricsReport.compute(pair)


def save_artifacts(artifacts: RunArtifacts, out_dir: str | Path, name: str = "memcluster") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "partition.json").write_text(
        json.dumps(artifacts.partition.to_json(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    summary = {
        "n_docs": len(artifacts.events),
        "k": artifacts.partition.k,
        "final_memory": artifacts.final_memory.values(),
        "primary_calls": artifacts.primary_calls,
        "parse_retries": sum(e.retries for e in artifacts.events),
        "mode_switches": artifacts.mode_switches,
        "config": artifacts.config_snapshot.to_dict(),
    }
    (out / "run.json").write_text(json.dumps(summary, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    if artifacts.metrics is not None:
        save_metrics(artifacts.metrics, out, name)


def save_metrics(report: MetricsReport, out_dir: str | Path, name: str = "memcluster") -> None:
    out = Path(out_dir)
    (out / "metrics.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (out / "metrics.txt").write_text(format_table([(name, report)]) + "\n", encoding="utf-8")
