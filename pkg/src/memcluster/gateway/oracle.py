"""Deterministic scripted stand-in for the model.

Replies are grammar-conformant and derived from a per-document labeler
(usually the gold labels) plus seeded noise. Every draw comes from an RNG
seeded by ``(rng_seed, step, doc_id)``, so a reply never depends on call
history: a resumed run sees exactly the replies an uninterrupted one would.

Behaviour per call:

* the oracle "recognises" a memory label when it is the target label or one
  of its naming variants, and reuses it (``ASSIGNED_LABEL``);
* with probability ``split_bias`` (Relaxed mode only) it instead coins a fresh
  ``"<label> (variant k)"`` name;
* when nothing is recognised it creates a label, misspelled with
  probability ``naming_noise``;
* in Strict mode it proposes merging a recognised family of two or more
  labels back into the target name;
* scripted merge events are appended at their step and take precedence.

Setting ``mode_aware=False`` makes Strict behave like Relaxed.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from memcluster.errors import UnknownDocument
from memcluster.gateway.parsing import render_merge
from memcluster.model import Document, Label, MergeSuggestion, Mode
from memcluster.prompts import PromptPair


@dataclass(frozen=True)
class MergeEvent:
    step: int
    merge: MergeSuggestion

    def to_json(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "merge": [lab.value for lab in self.merge.order],
            "into": self.merge.new_label.value,
        }


@dataclass(frozen=True)
class OracleScript:
    labeler: dict[str, str] = field(default_factory=dict)
    naming_noise: float = 0.0
    merge_events: tuple[MergeEvent, ...] = ()
    split_bias: float = 0.0
    rng_seed: int = 0
    mode_aware: bool = True

    def __post_init__(self) -> None:
        for name in ("naming_noise", "split_bias"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        steps = [e.step for e in self.merge_events]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValueError("merge_events steps must be strictly increasing")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be unsigned")

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> OracleScript:
        events = tuple(
            MergeEvent(int(e["step"]), MergeSuggestion.of(e["merge"], e["into"]))
            for e in data.get("merge_events", [])
        )
        return cls(
            labeler={str(k): str(v) for k, v in data.get("labeler", {}).items()},
            naming_noise=float(data.get("naming_noise", 0.0)),
            merge_events=events,
            split_bias=float(data.get("split_bias", 0.0)),
            rng_seed=int(data.get("rng_seed", 0)),
            mode_aware=bool(data.get("mode_aware", True)),
        )

    @classmethod
    def load(cls, path: str | Path) -> OracleScript:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_json(self) -> dict[str, Any]:
        return {
            "labeler": dict(self.labeler),
            "naming_noise": self.naming_noise,
            "split_bias": self.split_bias,
            "merge_events": [e.to_json() for e in self.merge_events],
            "rng_seed": self.rng_seed,
            "mode_aware": self.mode_aware,
        }

    def merge_at(self, step: int) -> MergeSuggestion | None:
        for e in self.merge_events:
            if e.step == step:
                return e.merge
        return None


def naming_variants(target: str) -> list[str]:
    """Spellings an inconsistent namer might use; the first differs only in case."""
    casing = target.upper() if target.upper() != target else target.lower()
    spaced = target.replace("_", " ") if "_" in target else f"{target} topic"
    return [casing, f"{target}s", spaced, f"{target}-related"]


def _family_pattern(target: str) -> re.Pattern[str]:
    names = [target, *naming_variants(target)]
    alts = "|".join(re.escape(n.casefold()) for n in names)
    return re.compile(rf"(?:{alts})(?: \(variant \d+\))?")


def _quoted(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def oracle_complete(
    doc: Document | str,
    step: int,
    script: OracleScript,
    memory_view: Sequence[Label],
    mode: Mode = Mode.RELAXED,
) -> str:
    doc_id = doc.id if isinstance(doc, Document) else doc
    try:
        target = script.labeler[doc_id]
    except KeyError:
        raise UnknownDocument(doc_id) from None

    rng = random.Random(f"{script.rng_seed}:{step}:{doc_id}")
    u_noise, u_split, u_variant = rng.random(), rng.random(), rng.random()
    strict = script.mode_aware and mode is Mode.STRICT

    pattern = _family_pattern(target)
    family = [lab for lab in memory_view if pattern.fullmatch(lab.key)]
    exact = next((lab for lab in family if lab.key == target.casefold()), None)
    taken = {lab.key for lab in memory_view}

    if family and not strict and u_split < script.split_bias:
        k = 2
        while f"{target} (variant {k})".casefold() in taken:
            k += 1
        lines = [f"NEW_LABEL: {_quoted(f'{target} (variant {k})')}"]
    elif family:
        chosen = exact or family[0]
        lines = [f"ASSIGNED_LABEL: {_quoted(chosen.value)}"]
    else:
        name = target
        if u_noise < script.naming_noise:
            variants = naming_variants(target)
            name = variants[int(u_variant * len(variants))]
        lines = [f"NEW_LABEL: {_quoted(name)}"]

    scripted = script.merge_at(step)
    if scripted is not None:
        lines.append(render_merge(scripted))
    elif strict and len(family) >= 2:
        lines.append(render_merge(MergeSuggestion.of(family, target)))
    return "\n".join(lines)


class OracleClient:
    """Adapts an OracleScript to the pipeline's client interface."""

    def __init__(self, script: OracleScript):
        self.script = script
        self.calls = 0

    def complete(self, prompt: PromptPair, *, doc_id: str, step: int) -> str:
        self.calls += 1
        return oracle_complete(doc_id, step, self.script, prompt.injected_labels, prompt.mode)
