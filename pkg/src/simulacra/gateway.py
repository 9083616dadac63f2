"""Completion backends: a live HTTP client and a deterministic mock.

Both run through the same front door (`complete`), which validates the
request, scrubs stop sequences out of the returned text, and appends one
audit record per successful backend call.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field

import requests

from .errors import BackendConfigError, BackendUnavailableError, EmptyGenerationError, SimulacraError
from .model import (
    FINISH_LENGTH,
    FINISH_OTHER,
    FINISH_STOP,
    CompletionRequest,
    CompletionResult,
)
from . import mock_corpus
from .rng import RngStream, stable_text_seed

ENV_API_KEY = "SIMULACRA_API_KEY"
ENV_API_URL = "SIMULACRA_API_URL"
ENV_MODEL = "SIMULACRA_MODEL"

MAX_TOKENS_CONTENT = 256
MAX_TOKENS_PERSONAS = 1024


@dataclass(frozen=True)
class BackendConfig:
    endpoint_url: str = ""
    api_key: str = ""
    model_name: str = "davinci"
    max_retries: int = 3
    request_timeout: float = 60.0
    min_request_interval: float = 0.0

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")

    @classmethod
    def from_env(cls) -> "BackendConfig":
        return cls(
            endpoint_url=os.environ.get(ENV_API_URL, ""),
            api_key=os.environ.get(ENV_API_KEY, ""),
            model_name=os.environ.get(ENV_MODEL, "davinci"),
        )


@dataclass(frozen=True)
class AuditRecord:
    timestamp: float
    prompt_hash: str
    prompt: str
    completion: str
    temperature: float
    op: str

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "prompt_hash": self.prompt_hash,
            "prompt": self.prompt,
            "completion": self.completion,
            "temperature": self.temperature,
            "op": self.op,
        }


class AuditLog:
    """Append-only record of every completion; optionally mirrored to NDJSON."""

    def __init__(self, path=None):
        self.path = path
        self._records: list[AuditRecord] = []
        self._lock = threading.Lock()

    def append(self, record: AuditRecord) -> None:
        with self._lock:
            self._records.append(record)
            if self.path is not None:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")

    def records(self) -> list[AuditRecord]:
        with self._lock:
            return list(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)


def scrub_stops(text: str, stop: tuple[str, ...], finish_reason: str) -> tuple[str, str]:
    """Truncate at the first stop occurrence; report how generation halted."""
    cut = None
    for s in stop:
        pos = text.find(s)
        if pos != -1 and (cut is None or pos < cut):
            cut = pos
    if cut is not None:
        return text[:cut], FINISH_STOP
    return text, finish_reason


class CompletionBackend:
    """Common front door: validation, stop scrubbing, audit."""

    deterministic = False

    def __init__(self, audit_log: AuditLog | None = None):
        self.audit_log = audit_log if audit_log is not None else AuditLog()

    def complete(self, request: CompletionRequest) -> CompletionResult:
        if not request.prompt:
            raise SimulacraError("completion request has an empty prompt")
        if not request.stop:
            raise SimulacraError("completion request has an empty stop list")
        raw, finish = self._raw_complete(request)
        text, finish = scrub_stops(raw, request.stop, finish)
        self.audit_log.append(AuditRecord(
            timestamp=time.time(),
            prompt_hash=hashlib.sha256(request.prompt.encode("utf-8")).hexdigest()[:16],
            prompt=request.prompt,
            completion=text,
            temperature=request.temperature,
            op=request.op,
        ))
        if not text.strip():
            raise EmptyGenerationError("backend returned an empty completion")
        return CompletionResult(text=text, finish_reason=finish)

    def _raw_complete(self, request: CompletionRequest) -> tuple[str, str]:
        raise NotImplementedError


class LiveBackend(CompletionBackend):
    """HTTP client for any completion-style API.

    Wire shape: POST JSON {model, prompt, temperature, max_tokens, stop}
    -> {choices: [{text, finish_reason}]}.  Transport failures and 5xx are
    retried with exponential backoff (1s, 2s, 4s, ...); 4xx are not.
    """

    def __init__(self, config: BackendConfig, audit_log: AuditLog | None = None,
                 session: requests.Session | None = None, sleep=time.sleep):
        super().__init__(audit_log)
        if not config.endpoint_url:
            raise BackendConfigError("no endpoint URL configured (set %s)" % ENV_API_URL)
        self.config = config
        self._session = session or requests.Session()
        self._sleep = sleep
        self._dispatch_lock = threading.Lock()
        self._last_dispatch = 0.0

    def _throttle(self):
        if self.config.min_request_interval <= 0:
            return
        with self._dispatch_lock:
            wait = self._last_dispatch + self.config.min_request_interval - time.monotonic()
            if wait > 0:
                self._sleep(wait)
            self._last_dispatch = time.monotonic()

    def _raw_complete(self, request: CompletionRequest) -> tuple[str, str]:
        payload = {
            "model": self.config.model_name,
            "prompt": request.prompt,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "stop": list(request.stop),
        }
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"

        last_error = None
        for attempt in range(self.config.max_retries + 1):
            if attempt > 0:
                self._sleep(2 ** (attempt - 1))
            self._throttle()
            try:
                resp = self._session.post(
                    self.config.endpoint_url, json=payload, headers=headers,
                    timeout=self.config.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if 400 <= resp.status_code < 500:
                raise BackendConfigError(
                    f"backend rejected the request: HTTP {resp.status_code}: {resp.text[:500]}")
            if resp.status_code >= 500:
                last_error = SimulacraError(f"HTTP {resp.status_code}")
                continue
            try:
                body = resp.json()
                choice = body["choices"][0]
                text = choice.get("text", "")
                finish = choice.get("finish_reason", "")
            except (ValueError, KeyError, IndexError) as exc:
                raise BackendConfigError(f"malformed backend response: {exc}") from exc
            finish_map = {"stop": FINISH_STOP, "stop_sequence": FINISH_STOP, "length": FINISH_LENGTH}
            return text, finish_map.get(finish, FINISH_OTHER)
        raise BackendUnavailableError(
            f"backend unreachable after {self.config.max_retries + 1} attempts: {last_error}")


class MockBackend(CompletionBackend):
    """Deterministic stand-in for a completion API.

    The prompt is classified by its template markers (persona expansion,
    headline, or reply), a PRNG is seeded from a stable hash of the request,
    and a response is assembled from a bundled corpus of template sentences,
    terminated with the closing tokens the real templates elicit.
    """

    deterministic = True

    def _raw_complete(self, request: CompletionRequest) -> tuple[str, str]:
        rng = RngStream(stable_text_seed(
            request.prompt,
            repr(request.temperature),
            repr(request.stop),
            repr(request.seed),
        ))
        kind = mock_corpus.classify_prompt(request.prompt)
        if kind == "persona_expansion":
            text = mock_corpus.persona_batch(rng) + "\n\n more"
        elif kind == "headline":
            topic = mock_corpus.extract_topic(request.prompt)
            text = mock_corpus.headline_sentence(rng, topic) + "</span> trailing tokens"
        elif kind == "reply":
            topic = mock_corpus.extract_topic(request.prompt)
            text = mock_corpus.reply_sentence(rng, topic, request.prompt) + '"</span> trailing tokens'
        else:
            text = mock_corpus.GENERIC_SENTENCE + "</span>"
        return text, FINISH_OTHER


def backend_from_env(audit_log: AuditLog | None = None, kind: str | None = None) -> CompletionBackend:
    """Pick mock vs live from an explicit kind or the environment."""
    if kind is None:
        kind = "live" if os.environ.get(ENV_API_URL) else "mock"
    if kind == "mock":
        return MockBackend(audit_log)
    return LiveBackend(BackendConfig.from_env(), audit_log)
