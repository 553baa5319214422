"""Memory engine: reuse/create, merge/refine with retroactive rewrite, partition derivation.

State objects are mutated in place and returned, so callers can chain the
results the same way whether or not they keep their own references.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from memcluster.errors import DuplicateDocument, EmptyLog
from memcluster.model import (
    AssignmentLog,
    Document,
    Label,
    MemoryState,
    MergeSuggestion,
    ParsedResponse,
    Partition,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepOutcome:
    assigned: Label
    created_new: bool
    merge_applied: MergeSuggestion | None = None
    rewrites: int = 0
    merge_skipped: bool = False

    def to_dict(self) -> dict:
        merge = None
        if self.merge_applied is not None:
            merge = {
                "old": [lab.value for lab in self.merge_applied.order],
                "new": self.merge_applied.new_label.value,
            }
        return {
            "assigned": self.assigned.value,
            "created_new": self.created_new,
            "merge_applied": merge,
            "merge_skipped": self.merge_skipped,
            "rewrites": self.rewrites,
        }


def apply_assignment(
    memory: MemoryState, alog: AssignmentLog, doc_id: str, label: Label, step: int
) -> tuple[MemoryState, AssignmentLog, bool]:
    if doc_id in alog:
        raise DuplicateDocument(f"document {doc_id!r} already assigned")
    existing = memory.canonical(label)
    created_new = existing is None
    stored = memory.add(label) if created_new else existing
    alog.append(doc_id, stored, step)
    log.debug("assignment", extra={"event": "assignment", "doc_id": doc_id, "label": stored.value, "new": created_new})
    return memory, alog, created_new


def apply_merge(
    memory: MemoryState, alog: AssignmentLog, suggestion: MergeSuggestion
) -> tuple[MemoryState, AssignmentLog, bool, int]:
    effective = {lab for lab in suggestion.old_labels if lab in memory}
    unknown = suggestion.old_labels - effective
    if unknown:
        log.warning(
            "merge references unknown labels %s",
            sorted(lab.value for lab in unknown),
            extra={"event": "merge-unknown-labels"},
        )
    if not effective:
        log.info("merge skipped: no old label is in memory", extra={"event": "merge-skipped"})
        return memory, alog, False, 0

    # keep the stored spelling (and position) when the target already exists
    target = memory.canonical(suggestion.new_label) or suggestion.new_label
    memory.remove_all(effective - {target})
    target = memory.add(target)

    rewrites = 0
    for entry in alog.entries:
        if entry.label in effective and entry.label.value != target.value:
            entry.label = target
            rewrites += 1
    alog.rewrite_count += rewrites
    log.info(
        "merge applied into %r, %d assignments rewritten",
        target.value,
        rewrites,
        extra={"event": "merge-applied", "rewrites": rewrites},
    )
    return memory, alog, True, rewrites


def core_step(
    memory: MemoryState, alog: AssignmentLog, doc: Document, response: ParsedResponse, step: int
) -> tuple[MemoryState, AssignmentLog, StepOutcome]:
    """Assign, then (optionally) merge. Assignment goes first so a merge can absorb it."""
    memory, alog, created_new = apply_assignment(memory, alog, doc.id, response.label, step)
    applied = None
    rewrites = 0
    skipped = False
    if response.merge is not None:
        memory, alog, ok, rewrites = apply_merge(memory, alog, response.merge)
        if ok:
            applied = response.merge
        else:
            skipped = True
    final = alog.label_of(doc.id)
    return memory, alog, StepOutcome(final, created_new, applied, rewrites, skipped)


def derive_partition(alog: AssignmentLog) -> Partition:
    if not alog.entries:
        raise EmptyLog("cannot derive a partition from an empty assignment log")
    groups: dict[Label, list[str]] = {}
    for e in alog.entries:
        groups.setdefault(e.label, []).append(e.doc_id)
    return Partition({lab: tuple(ids) for lab, ids in groups.items()})
