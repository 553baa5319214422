from __future__ import annotations

import logging
import re
from dataclasses import replace

from memcluster.errors import EmptyLabel, ResponseParseError
from memcluster.gateway.client import ChatClient
from memcluster.gateway.parsing import parse_response
from memcluster.model import Document, ParsedResponse, ResponseKind, RunConfig, normalize_label
from memcluster.prompts import PromptPair

log = logging.getLogger(__name__)

FORMAT_REMINDER = (
    "REMINDER: Reply with exactly ONE 'ASSIGNED_LABEL:' or 'NEW_LABEL:' line "
    "and at most ONE 'MERGE_SUGGESTION:' line."
)
FALLBACK_PREFIX = "auto:"
FALLBACK_TOKENS = 6


def fallback_label_text(doc: Document) -> str:
    tokens = re.findall(r"\w+", doc.text.casefold())[:FALLBACK_TOKENS]
    return f"{FALLBACK_PREFIX} {' '.join(tokens or [doc.id])}"


def classify_with_retry(
    doc: Document, prompt: PromptPair, client: ChatClient, config: RunConfig, step: int = 0
) -> ParsedResponse:
    """Call the model and parse; re-ask with a format reminder on unparseable replies.

    After ``max_parse_retries`` failed re-asks the document gets a
    deterministic ``auto:`` label so that every document is assigned.
    Transport and auth errors propagate.
    """
    current = prompt
    last_error: Exception | None = None
    for attempt in range(config.max_parse_retries + 1):
        raw = client.complete(current, doc_id=doc.id, step=step)
        try:
            parsed = parse_response(raw)
        except (ResponseParseError, EmptyLabel) as exc:
            last_error = exc
            log.warning("unparseable reply for %s (attempt %d): %s", doc.id, attempt + 1, exc)
            if attempt == 0:
                current = replace(prompt, user_text=f"{prompt.user_text}\n\n{FORMAT_REMINDER}")
            continue
        if attempt:
            log.info("reply for %s parsed after %d retries", doc.id, attempt, extra={"event": "parse-retry"})
        return replace(parsed, retries=attempt)

    log.warning("falling back to auto label for %s: %s", doc.id, last_error, extra={"event": "fallback"})
    return ParsedResponse(
        ResponseKind.NEW_LABEL,
        normalize_label(fallback_label_text(doc)),
        raw="",
        warnings=(f"fallback after {config.max_parse_retries} retries: {last_error}",),
        retries=config.max_parse_retries,
        fallback=True,
    )
