"""Decode and render the line-oriented reply grammar.

Accepted reply::

    ASSIGNED_LABEL: <label>        (or NEW_LABEL: <label>)  -- exactly one
    MERGE_SUGGESTION: MERGE: ["a", "b"] INTO: ["c"]         -- optional

Prose lines and markdown fences around these are ignored.
"""

from __future__ import annotations

import logging
import re

from memcluster.errors import EmptyLabel, MalformedMerge, MultiplePrimaryLines, NoPrimaryLine
from memcluster.model import (
    Label,
    MergeSuggestion,
    ParsedResponse,
    ResponseKind,
    collapse_whitespace,
    normalize_label,
)

log = logging.getLogger(__name__)

_PRIMARY = re.compile(r"\b(ASSIGNED_LABEL|NEW_LABEL)\s*\**\s*:\s*\**")
_MERGE_TAG = re.compile(r"\bMERGE_SUGGESTION\s*\**\s*:\s*\**")
_MERGE_BODY = re.compile(r"^\s*MERGE\s*:\s*\[(?P<old>.*)\]\s*INTO\s*:\s*\[(?P<new>.*)\]\s*$", re.S)
_DQ_STRING = re.compile(r'"((?:[^"\\]|\\.)*)"')
_SQ_STRING = re.compile(r"'([^']*)'")
_NO_MERGE = {"", "none", "n/a", "na", "null", "no", "-"}

_KIND = {"ASSIGNED_LABEL": ResponseKind.ASSIGNED, "NEW_LABEL": ResponseKind.NEW_LABEL}
_TAG = {v: k for k, v in _KIND.items()}


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s)


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def read_label(token: str) -> Label:
    """One label token: a double-quoted literal (with escapes) or bare text."""
    token = token.strip().strip("*`").strip()
    m = _DQ_STRING.fullmatch(token)
    if m:
        value = collapse_whitespace(_unescape(m.group(1)))
        if not value:
            raise EmptyLabel(f"empty quoted label in {token!r}")
        return Label(value)
    return normalize_label(token)


def _read_list(body: str) -> list[Label]:
    body = body.strip()
    if not body:
        return []
    items = [m.group(1) for m in _DQ_STRING.finditer(body)]
    if items:
        return [Label(v) for v in (collapse_whitespace(_unescape(i)) for i in items) if v]
    items = [m.group(1) for m in _SQ_STRING.finditer(body)] or body.split(",")
    out = []
    for item in items:
        try:
            out.append(normalize_label(item))
        except EmptyLabel:
            continue
    return out


def parse_merge(body: str) -> MergeSuggestion:
    m = _MERGE_BODY.match(body)
    if not m:
        raise MalformedMerge(f"unrecognised merge syntax: {body!r}")
    old = _read_list(m.group("old"))
    new = _read_list(m.group("new"))
    if not old:
        raise MalformedMerge("merge has no old labels")
    if len(new) != 1:
        raise MalformedMerge(f"merge must name exactly one target, got {len(new)}")
    return MergeSuggestion.of(old, new[0])


def parse_response(raw: str) -> ParsedResponse:
    if not raw or not raw.strip():
        raise NoPrimaryLine("empty reply")
    primaries: list[tuple[str, str]] = []
    merge_bodies: list[str] = []
    for line in raw.splitlines():
        stripped = line.strip()
        if stripped.startswith("```"):
            continue
        tag = _MERGE_TAG.search(stripped)
        if tag:
            merge_bodies.append(stripped[tag.end():])
            stripped = stripped[: tag.start()]
        hits = list(_PRIMARY.finditer(stripped))
        for n, hit in enumerate(hits):
            end = hits[n + 1].start() if n + 1 < len(hits) else len(stripped)
            primaries.append((hit.group(1), stripped[hit.end():end]))

    if not primaries:
        raise NoPrimaryLine("reply has no ASSIGNED_LABEL or NEW_LABEL line")
    if len(primaries) > 1:
        raise MultiplePrimaryLines(f"reply has {len(primaries)} primary lines")

    tag, token = primaries[0]
    label = read_label(token)

    warnings: list[str] = []
    merge = None
    if merge_bodies:
        if len(merge_bodies) > 1:
            warnings.append(f"{len(merge_bodies) - 1} extra MERGE_SUGGESTION line(s) ignored")
        body = merge_bodies[0]
        if body.strip().strip("*`").lower() not in _NO_MERGE:
            try:
                merge = parse_merge(body)
            except (MalformedMerge, EmptyLabel) as exc:
                warnings.append(f"merge dropped: {exc}")
    for w in warnings:
        log.warning(w, extra={"event": "parse-warning"})
    return ParsedResponse(_KIND[tag], label, merge, raw=raw, warnings=tuple(warnings))


def render_response(p: ParsedResponse) -> str:
    """Canonical reply text for ``p``; ``parse_response`` inverts it."""
    lines = [f'{_TAG[p.kind]}: "{_escape(p.label.value)}"']
    if p.merge is not None:
        lines.append(render_merge(p.merge))
    return "\n".join(lines)


def render_merge(merge: MergeSuggestion) -> str:
    old = ", ".join(f'"{_escape(lab.value)}"' for lab in merge.order)
    return f'MERGE_SUGGESTION: MERGE: [{old}] INTO: ["{_escape(merge.new_label.value)}"]'
