"""Chat-completions wire client for OpenAI-compatible providers."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import asdict, dataclass
from typing import Callable, Protocol

import httpx

from memcluster.errors import AuthError, ProviderError, TransportError
from memcluster.model import LLMSettings
from memcluster.prompts import PromptPair

log = logging.getLogger(__name__)

RETRY_STATUS = frozenset({408, 409, 429, 500, 502, 503, 504})
BASE_URL_ENV = "MEMCLUSTER_BASE_URL"


class ChatClient(Protocol):
    """What the pipeline needs from a model backend."""

    def complete(self, prompt: PromptPair, *, doc_id: str, step: int) -> str: ...


@dataclass(frozen=True)
class CallRecord:
    request_sha256: str
    response_sha256: str
    status: int
    retries: int
    prompt_tokens: int | None = None
    completion_tokens: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _digest(payload: str | bytes) -> str:
    if isinstance(payload, str):
        payload = payload.encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class ChatCompletionsClient:
    """Synchronous client with timeout and bounded exponential backoff.

    Retries transport failures and HTTP 408/409/429/5xx. 401/403 raise
    AuthError immediately; other non-2xx statuses raise ProviderError.
    """

    def __init__(
        self,
        settings: LLMSettings,
        api_key: str | None = None,
        *,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        backoff_base: float = 1.0,
        backoff_cap: float = 30.0,
    ):
        self.settings = settings
        self.api_key = api_key if api_key is not None else os.environ.get(settings.api_key_env)
        base = os.environ.get(BASE_URL_ENV) or settings.base_url
        self.url = base.rstrip("/") + "/chat/completions"
        self._http = httpx.Client(timeout=settings.timeout, transport=transport)
        self._sleep = sleep
        self.backoff_base = backoff_base
        self.backoff_cap = backoff_cap
        self.history: list[CallRecord] = []

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> ChatCompletionsClient:
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _delay(self, attempt: int, response: httpx.Response | None) -> float:
        if response is not None:
            retry_after = response.headers.get("retry-after")
            if retry_after:
                try:
                    return min(float(retry_after), self.backoff_cap)
                except ValueError:
                    pass
        return min(self.backoff_base * 2**attempt, self.backoff_cap)

    def chat(self, system_text: str, user_text: str) -> str:
        if not self.api_key:
            raise AuthError(f"no API key: set ${self.settings.api_key_env}")
        body = {
            "model": self.settings.model,
            "messages": [
                {"role": "system", "content": system_text},
                {"role": "user", "content": user_text},
            ],
            "temperature": self.settings.temperature,
        }
        encoded = json.dumps(body, sort_keys=True)
        headers = {"Authorization": f"Bearer {self.api_key}", "Content-Type": "application/json"}
        max_retries = self.settings.max_transport_retries

        attempt = 0
        while True:
            response = None
            try:
                response = self._http.post(self.url, content=encoded, headers=headers)
            except httpx.TimeoutException as exc:
                failure: Exception = TransportError(f"request timed out after {self.settings.timeout}s")
                failure.__cause__ = exc
            except httpx.TransportError as exc:
                failure = TransportError(f"transport failure: {exc}")
                failure.__cause__ = exc
            else:
                status = response.status_code
                if status in (401, 403):
                    raise AuthError(f"provider rejected credentials (HTTP {status})")
                if 200 <= status < 300:
                    break
                failure = ProviderError(status, response.text)
                if status not in RETRY_STATUS:
                    raise failure
            if attempt >= max_retries:
                raise failure
            delay = self._delay(attempt, response)
            log.warning("request failed (%s); retry %d in %.2fs", failure, attempt + 1, delay)
            self._sleep(delay)
            attempt += 1

        try:
            data = response.json()
            content = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(response.status_code, f"unexpected response body: {response.text}") from exc
        usage = data.get("usage") or {}
        record = CallRecord(
            request_sha256=_digest(encoded),
            response_sha256=_digest(response.content),
            status=response.status_code,
            retries=attempt,
            prompt_tokens=usage.get("prompt_tokens"),
            completion_tokens=usage.get("completion_tokens"),
        )
        self.history.append(record)
        log.info("chat completion ok", extra={"event": "llm-call", **record.to_dict()})
        return content or ""

    def complete(self, prompt: PromptPair, *, doc_id: str, step: int) -> str:
        return self.chat(prompt.system_text, prompt.user_text)


def complete(system_text: str, user_text: str, settings: LLMSettings, **kwargs) -> str:
    """One-shot call; opens and closes a client."""
    with ChatCompletionsClient(settings, **kwargs) as client:
        return client.chat(system_text, user_text)
