"""Domain types: documents, labels, memory, assignments, partitions, run configuration."""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Iterator

from memcluster.errors import ConfigError, EmptyLabel

_WS = re.compile(r"\s+")
_QUOTES = ('"', "'")


class Mode(str, Enum):
    RELAXED = "relaxed"
    STRICT = "strict"


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    gold_label: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("document id must be a non-empty string")
        if not self.text or not self.text.strip():
            raise ValueError(f"document {self.id!r} has empty text")


def collapse_whitespace(raw: str) -> str:
    return _WS.sub(" ", raw).strip()


@dataclass(frozen=True, eq=False)
class Label:
    """A cluster label.

    Equality and hashing are case-insensitive; ``value`` keeps the casing it
    was created with so memory can display the first-seen spelling.
    """

    value: str

    def __post_init__(self) -> None:
        if not self.value or collapse_whitespace(self.value) != self.value:
            raise EmptyLabel(f"label value is not normalized: {self.value!r}")

    @property
    def key(self) -> str:
        return self.value.casefold()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Label):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __str__(self) -> str:
        return self.value


def normalize_label(raw: str) -> Label:
    """Trim, strip one layer of matching quotes, and collapse internal whitespace."""
    s = raw.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in _QUOTES:
        s = s[1:-1]
    s = collapse_whitespace(s)
    if not s:
        raise EmptyLabel(f"label is empty after normalization: {raw!r}")
    return Label(s)


def as_label(value: Label | str) -> Label:
    return value if isinstance(value, Label) else normalize_label(value)


@dataclass
class MemoryState:
    """Insertion-ordered label set. ``version`` bumps on every mutation."""

    labels: list[Label] = field(default_factory=list)
    version: int = 0
    _index: dict[str, Label] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for lab in self.labels:
            if lab.key in self._index:
                raise ValueError(f"duplicate label {lab.value!r} in memory")
            self._index[lab.key] = lab

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Label]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return isinstance(label, Label) and label.key in self._index

    def canonical(self, label: Label) -> Label | None:
        """The stored label equal to ``label`` (first-seen casing), if any."""
        return self._index.get(label.key)

    def add(self, label: Label) -> Label:
        stored = self._index.get(label.key)
        if stored is not None:
            return stored
        self.labels.append(label)
        self._index[label.key] = label
        self.version += 1
        return label

    def remove_all(self, labels: Iterable[Label]) -> None:
        keys = {lab.key for lab in labels} & self._index.keys()
        if not keys:
            return
        self.labels = [lab for lab in self.labels if lab.key not in keys]
        for k in keys:
            del self._index[k]
        self.version += 1

    def values(self) -> list[str]:
        return [lab.value for lab in self.labels]

    def copy(self) -> MemoryState:
        return MemoryState(list(self.labels), self.version)


@dataclass(frozen=True, eq=False)
class MergeSuggestion:
    old_labels: frozenset[Label]
    new_label: Label
    # display order of old labels as proposed; equality ignores it
    order: tuple[Label, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if not self.old_labels:
            raise ValueError("merge suggestion needs at least one old label")
        if not self.order:
            object.__setattr__(self, "order", tuple(sorted(self.old_labels, key=lambda lab: lab.key)))

    @classmethod
    def of(cls, old: Iterable[Label | str], new: Label | str) -> MergeSuggestion:
        ordered: list[Label] = []
        for item in old:
            lab = as_label(item)
            if lab not in ordered:
                ordered.append(lab)
        return cls(frozenset(ordered), as_label(new), tuple(ordered))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MergeSuggestion):
            return NotImplemented
        return self.old_labels == other.old_labels and self.new_label == other.new_label

    def __hash__(self) -> int:
        return hash((self.old_labels, self.new_label))


@dataclass
class LogEntry:
    doc_id: str
    label: Label
    step: int


@dataclass
class AssignmentLog:
    """Ordered (document, label, step) records; labels are rewritten in place on merges."""

    entries: list[LogEntry] = field(default_factory=list)
    rewrite_count: int = 0
    _pos: dict[str, int] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        last = None
        for i, e in enumerate(self.entries):
            if e.doc_id in self._pos:
                raise ValueError(f"document {e.doc_id!r} assigned twice")
            if last is not None and e.step <= last:
                raise ValueError("step indices must be strictly increasing")
            self._pos[e.doc_id] = i
            last = e.step

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, doc_id: object) -> bool:
        return doc_id in self._pos

    def label_of(self, doc_id: str) -> Label:
        return self.entries[self._pos[doc_id]].label

    def append(self, doc_id: str, label: Label, step: int) -> None:
        if self.entries and step <= self.entries[-1].step:
            raise ValueError(f"step {step} does not follow {self.entries[-1].step}")
        self._pos[doc_id] = len(self.entries)
        self.entries.append(LogEntry(doc_id, label, step))

    def live_labels(self) -> set[Label]:
        return {e.label for e in self.entries}

    def copy(self) -> AssignmentLog:
        return AssignmentLog([LogEntry(e.doc_id, e.label, e.step) for e in self.entries], self.rewrite_count)


@dataclass(frozen=True)
class Partition:
    clusters: dict[Label, tuple[str, ...]]

    @property
    def k(self) -> int:
        return len(self.clusters)

    def doc_ids(self) -> list[str]:
        return [d for ids in self.clusters.values() for d in ids]

    def assignment(self) -> dict[str, Label]:
        return {d: lab for lab, ids in self.clusters.items() for d in ids}

    def to_json(self) -> dict[str, list[str]]:
        return {lab.value: list(ids) for lab, ids in self.clusters.items()}


DEFAULT_EXEMPLARS: tuple[tuple[str, str], ...] = (
    ("Example text 1", 'ASSIGNED_LABEL: "label_A"'),
    ("Example text 2", 'NEW_LABEL: "label_B"'),
)


@dataclass(frozen=True)
class LLMSettings:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4.1-mini"
    temperature: float = 0.0
    timeout: float = 60.0
    api_key_env: str = "OPENAI_API_KEY"
    max_transport_retries: int = 4


@dataclass(frozen=True)
class RunConfig:
    k_min: int
    k_max: int
    offset: int = 0
    use_memory: bool = True
    use_fewshot: bool = True
    forced_mode: Mode | None = None
    exemplars: tuple[tuple[str, str], ...] = DEFAULT_EXEMPLARS
    max_parse_retries: int = 2
    llm: LLMSettings = field(default_factory=LLMSettings)
    seed: int = 0
    shuffle: bool = False
    max_text_chars: int = 4000

    def __post_init__(self) -> None:
        if self.k_min < 1:
            raise ConfigError(f"k_min must be >= 1, got {self.k_min}")
        if self.k_max < self.k_min:
            raise ConfigError(f"k_max ({self.k_max}) must be >= k_min ({self.k_min})")
        if self.threshold < 1:
            raise ConfigError(f"effective threshold k_max + offset = {self.threshold} must be >= 1")
        if self.max_parse_retries < 0:
            raise ConfigError("max_parse_retries must be >= 0")
        if self.seed < 0:
            raise ConfigError("seed must be unsigned")
        if self.max_text_chars < 1:
            raise ConfigError("max_text_chars must be positive")
        if self.forced_mode is not None and not isinstance(self.forced_mode, Mode):
            object.__setattr__(self, "forced_mode", Mode(self.forced_mode))
        object.__setattr__(self, "exemplars", tuple((str(t), str(r)) for t, r in self.exemplars))

    @property
    def threshold(self) -> int:
        return self.k_max + self.offset

    def with_(self, **changes: Any) -> RunConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["forced_mode"] = self.forced_mode.value if self.forced_mode else None
        d["exemplars"] = [list(e) for e in self.exemplars]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RunConfig:
        d = dict(d)
        d["llm"] = LLMSettings(**d.get("llm", {}))
        if d.get("forced_mode") is not None:
            d["forced_mode"] = Mode(d["forced_mode"])
        if "exemplars" in d:
            d["exemplars"] = tuple(tuple(e) for e in d["exemplars"])
        return cls(**d)


class ResponseKind(str, Enum):
    ASSIGNED = "assigned"
    NEW_LABEL = "new_label"


@dataclass(frozen=True)
class ParsedResponse:
    """Decoded reply: one primary label plus an optional merge suggestion."""

    kind: ResponseKind
    label: Label
    merge: MergeSuggestion | None = None
    raw: str = field(default="", compare=False, repr=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)
    retries: int = field(default=0, compare=False)
    fallback: bool = field(default=False, compare=False)
