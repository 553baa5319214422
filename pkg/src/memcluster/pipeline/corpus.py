from __future__ import annotations

import hashlib
import json
import random
from pathlib import Path
from typing import Iterable, Sequence

from memcluster.errors import DuplicateId, MissingText, ParseError
from memcluster.model import Document, RunConfig


def ingest_corpus(path: str | Path) -> list[Document]:
    """Read newline-delimited JSON objects with ``text`` and optional ``id`` / ``label``.

    Missing ids become the zero-padded 0-based line ordinal (``"000000"``).
    Blank lines are skipped but still count toward line numbers in errors.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    ordinal = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(lineno, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise ParseError(lineno, "expected a JSON object")
            text = obj.get("text")
            if not isinstance(text, str) or not text.strip():
                raise MissingText(f"line {lineno}: missing or empty 'text'")
            doc_id = obj.get("id")
            doc_id = f"{ordinal:06d}" if doc_id is None else str(doc_id)
            if doc_id in seen:
                raise DuplicateId(f"line {lineno}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            gold = obj.get("label")
            docs.append(Document(doc_id, text, None if gold is None else str(gold)))
            ordinal += 1
    return docs


def write_corpus(docs: Iterable[Document], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in docs:
            rec = {"id": d.id, "text": d.text}
            if d.gold_label is not None:
                rec["label"] = d.gold_label
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def corpus_digest(docs: Sequence[Document]) -> str:
    """Hash of ids and texts only; gold labels do not affect a run."""
    h = hashlib.sha256()
    for d in docs:
        h.update(json.dumps([d.id, d.text], ensure_ascii=False).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def processing_order(docs: Sequence[Document], config: RunConfig) -> list[Document]:
    order = list(docs)
    if config.shuffle:
        random.Random(config.seed).shuffle(order)
    return order
