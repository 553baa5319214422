"""Render the system/user prompt pair from the bundled template files.

The files under ``templates/`` hold the listings exactly as published,
including their illustrative placeholder values (``"text_to_cluster"``,
``["label_1", "label_2", ...]`` and the two generic examples). Rendering
locates those sites and substitutes the live values; everything else is
copied through untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Sequence

from memcluster.granularity import range_description
from memcluster.model import Document, Label, MemoryState, Mode, RunConfig

SYSTEM_GUIDELINE_SITE = "[SYSTEM_GUIDELINE]"
USER_CONSTRAINT_SITE = "[USER_CONSTRAINT]"
KNOWN_LABELS_PREFIX = "Known labels: "
INPUT_SITE = '"text_to_cluster"'
EXAMPLES_HEADER = "Examples:"
TRUNCATION_MARKER = " [...]"


@dataclass(frozen=True)
class PromptPair:
    system_text: str
    user_text: str
    mode: Mode
    injected_labels: tuple[Label, ...]


@dataclass(frozen=True)
class Templates:
    system: str
    user: str
    system_guideline: dict[Mode, str]
    user_constraint: dict[Mode, str]


def _read(name: str) -> str:
    return resources.files("memcluster").joinpath("templates", name).read_text(encoding="utf-8")


def _drop_banner(text: str) -> str:
    lines = text.rstrip("\n").split("\n")
    if lines and lines[0].startswith("---") and lines[0].endswith("---"):
        lines = lines[1:]
    return "\n".join(lines)


def _mode_sections(text: str) -> dict[Mode, str]:
    sections: dict[Mode, list[str]] = {}
    current: Mode | None = None
    for line in text.rstrip("\n").split("\n"):
        if line.startswith("# Relaxed"):
            current = Mode.RELAXED
        elif line.startswith("# Strict"):
            current = Mode.STRICT
        elif current is not None and line.strip():
            sections.setdefault(current, []).append(line)
    if set(sections) != {Mode.RELAXED, Mode.STRICT}:
        raise ValueError("placeholder template must define both Relaxed and Strict sections")
    return {mode: "\n".join(lines) for mode, lines in sections.items()}


@lru_cache(maxsize=1)
def load_templates() -> Templates:
    return Templates(
        system=_drop_banner(_read("system_prompt.txt")),
        user=_drop_banner(_read("user_prompt.txt")),
        system_guideline=_mode_sections(_read("system_guideline.txt")),
        user_constraint=_mode_sections(_read("user_constraint.txt")),
    )


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def known_labels_line(labels: Sequence[Label]) -> str:
    return KNOWN_LABELS_PREFIX + "[" + ", ".join(_quote(lab.value) for lab in labels) + "]"


def _prepare_text(text: str, max_chars: int) -> str:
    if len(text) > max_chars:
        text = text[:max_chars] + TRUNCATION_MARKER
    return text.replace('"', '\\"')


def build_system_prompt(mode: Mode, config: RunConfig) -> str:
    t = load_templates()
    guideline = t.system_guideline[mode].replace(
        "{range_desc}", range_description(config.k_min, config.k_max)
    )
    return t.system.replace(SYSTEM_GUIDELINE_SITE, guideline, 1)


def build_user_prompt(doc: Document, memory: MemoryState | Sequence[Label], mode: Mode, config: RunConfig) -> str:
    t = load_templates()
    labels = list(memory)
    constraint = t.user_constraint[mode].replace("{target_max_clusters}", str(config.k_max))

    out: list[str] = []
    lines = t.user.split("\n")
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith(KNOWN_LABELS_PREFIX):
            out.append(known_labels_line(labels))
        elif line == EXAMPLES_HEADER:
            # the section runs to the next blank line
            j = i + 1
            while j < len(lines) and lines[j].strip():
                j += 1
            if config.use_fewshot:
                out.append(line)
                out.extend(f"Input: {_quote(text)} -> Output: {reply}" for text, reply in config.exemplars)
                i = j
                continue
            i = j + 1  # also swallow the blank separator
            continue
        elif INPUT_SITE in line:
            out.append(line.replace(INPUT_SITE, _quote_prepared(doc.text, config.max_text_chars), 1))
        elif USER_CONSTRAINT_SITE in line:
            out.append(line.replace(USER_CONSTRAINT_SITE, constraint, 1))
        else:
            out.append(line)
        i += 1
    return "\n".join(out)


def _quote_prepared(text: str, max_chars: int) -> str:
    return '"' + _prepare_text(text, max_chars) + '"'


def build_prompt_pair(
    doc: Document, memory: MemoryState | Sequence[Label], mode: Mode, config: RunConfig
) -> PromptPair:
    """Both prompts for one step. Pass an empty memory view for the no-memory ablation."""
    labels = tuple(memory)
    return PromptPair(
        system_text=build_system_prompt(mode, config),
        user_text=build_user_prompt(doc, labels, mode, config),
        mode=mode,
        injected_labels=labels,
    )
