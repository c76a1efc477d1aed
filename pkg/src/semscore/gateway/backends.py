"""Chat-completion transports: a deterministic mock and an HTTP backend."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, runtime_checkable

from ..errors import BackendTimeout, MockScriptMiss, RateLimited, TransportError

log = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.2


@dataclass
class ChatRequest:
    model: str
    messages: list[dict[str, str]]  # {"role": system|user|assistant, "content": ...}
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int | None = None

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0].get("role") != "system":
            raise ValueError("first message must have role 'system'")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")

    def to_dict(self) -> dict:
        payload: dict = {
            "model": self.model,
            "messages": self.messages,
            "temperature": self.temperature,
        }
        if self.max_tokens is not None:
            payload["max_tokens"] = self.max_tokens
        return payload


@dataclass
class ChatResponse:
    content: str
    usage: dict[str, int] = field(default_factory=dict)
    cached: bool = False
    backend_id: str = ""
    retries: int = 0


@runtime_checkable
class Backend(Protocol):
    backend_id: str

    def complete(self, request: ChatRequest) -> ChatResponse: ...


def request_digest(request: ChatRequest) -> str:
    """Stable digest of (model, temperature, messages) for scripting fixtures."""
    canonical = json.dumps(
        {
            "model": request.model,
            "temperature": request.temperature,
            "messages": request.messages,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class MockBackend:
    """Scripted stand-in for an LLM endpoint.

    Responses resolve, in order: exact request digest, first matching
    substring pattern over the concatenated message contents, then the
    default. Records every request so tests can assert on the call trace.
    """

    def __init__(
        self,
        script: dict[str, str] | None = None,
        patterns: list[tuple[str, str]] | None = None,
        default: str | None = None,
        backend_id: str = "mock",
    ):
        self.script = dict(script or {})
        self.patterns = list(patterns or [])
        self.default = default
        self.backend_id = backend_id
        self.calls: list[ChatRequest] = []
        self._lock = threading.Lock()

    @classmethod
    def from_json(cls, path: str | Path, backend_id: str = "mock") -> "MockBackend":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            script=data.get("responses", {}),
            patterns=[tuple(p) for p in data.get("patterns", [])],
            default=data.get("default"),
            backend_id=backend_id,
        )

    @property
    def call_count(self) -> int:
        return len(self.calls)

    def complete(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            self.calls.append(request)
        text = self._resolve(request)
        prompt_chars = sum(len(m["content"]) for m in request.messages)
        return ChatResponse(
            content=text,
            usage={"prompt_tokens": prompt_chars // 4, "completion_tokens": len(text) // 4},
            backend_id=self.backend_id,
        )

    def _resolve(self, request: ChatRequest) -> str:
        digest = request_digest(request)
        if digest in self.script:
            return self.script[digest]
        haystack = "\n".join(m["content"] for m in request.messages)
        for needle, response in self.patterns:
            if needle in haystack:
                return response
        if self.default is not None:
            return self.default
        raise MockScriptMiss(
            f"no scripted response for digest {digest[:12]}…; prompt starts: {haystack[:120]!r}"
        )


class _Limiter:
    """Caps in-flight requests and enforces a minimum spacing between starts."""

    def __init__(self, max_in_flight: int, requests_per_minute: float | None):
        self._semaphore = threading.Semaphore(max_in_flight)
        self._interval = 60.0 / requests_per_minute if requests_per_minute else 0.0
        self._gate = threading.Lock()
        self._next_start = 0.0

    def __enter__(self) -> "_Limiter":
        self._semaphore.acquire()
        if self._interval:
            with self._gate:
                now = time.monotonic()
                wait = self._next_start - now
                self._next_start = max(now, self._next_start) + self._interval
            if wait > 0:
                time.sleep(wait)
        return self

    def __exit__(self, *exc) -> None:
        self._semaphore.release()


class HTTPBackend:
    """Chat-completions-style JSON POST transport with retries and rate limiting.

    The API key is read from the environment (``api_key_env``); the poster is
    injectable so transport behavior is testable without a server.
    """

    def __init__(
        self,
        endpoint: str,
        api_key_env: str = "SEMSCORE_API_KEY",
        backend_id: str = "http",
        max_attempts: int = 3,
        backoff_base: float = 0.5,
        timeout: float = 120.0,
        max_in_flight: int = 4,
        requests_per_minute: float | None = None,
        post: Callable | None = None,
    ):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.backend_id = backend_id
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._limiter = _Limiter(max_in_flight, requests_per_minute)
        if post is None:
            import requests

            post = requests.post
        self._post = post
        self.transport_calls = 0
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> ChatResponse:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        last_status, last_body, retry_after = None, "", None
        timed_out = False
        for attempt in range(self.max_attempts):
            if attempt:
                self._sleep_before_retry(attempt, retry_after)
            try:
                with self._limiter:
                    with self._lock:
                        self.transport_calls += 1
                    response = self._post(
                        self.endpoint,
                        json=request.to_dict(),
                        headers=headers,
                        timeout=self.timeout,
                    )
            except Exception as exc:  # connection errors and timeouts are retryable
                if _is_timeout(exc):
                    timed_out = True
                    last_status, last_body = None, str(exc)
                    continue
                last_status, last_body = -1, str(exc)
                continue

            status = getattr(response, "status_code", 200)
            if status == 200:
                return self._parse_body(response, retries=attempt)
            last_body = getattr(response, "text", "")
            last_status = status
            if status == 429:
                retry_after = _retry_after_seconds(response)
                continue
            if 500 <= status < 600:
                retry_after = None
                continue
            raise TransportError(status, last_body)  # other 4xx: not retryable

        if last_status == 429:
            raise RateLimited(last_body, retry_after)
        if timed_out and last_status is None:
            raise BackendTimeout(f"request timed out after {self.max_attempts} attempts")
        raise TransportError(last_status if last_status is not None else -1, last_body)

    def _sleep_before_retry(self, attempt: int, retry_after: float | None) -> None:
        if retry_after is not None:
            time.sleep(retry_after)
            return
        base = self.backoff_base * (2 ** (attempt - 1))
        time.sleep(base + random.uniform(0, self.backoff_base))

    def _parse_body(self, response, retries: int) -> ChatResponse:
        try:
            body = response.json()
        except Exception as exc:
            raise TransportError(200, f"response is not JSON: {exc}") from exc
        content = _extract_content(body)
        if content is None:
            raise TransportError(200, f"no completion content in response: {str(body)[:200]}")
        usage = body.get("usage", {}) if isinstance(body, dict) else {}
        return ChatResponse(
            content=content,
            usage={
                "prompt_tokens": int(usage.get("prompt_tokens", 0) or 0),
                "completion_tokens": int(usage.get("completion_tokens", 0) or 0),
            },
            backend_id=self.backend_id,
            retries=retries,
        )


def _extract_content(body) -> str | None:
    if not isinstance(body, dict):
        return None
    for key in ("candidates", "choices"):
        entries = body.get(key)
        if isinstance(entries, list) and entries:
            first = entries[0]
            if isinstance(first, dict):
                message = first.get("message")
                if isinstance(message, dict) and isinstance(message.get("content"), str):
                    return message["content"]
                if isinstance(first.get("content"), str):
                    return first["content"]
    return None


def _retry_after_seconds(response) -> float | None:
    headers = getattr(response, "headers", {}) or {}
    value = headers.get("Retry-After")
    try:
        return float(value) if value is not None else None
    except (TypeError, ValueError):
        return None


def _is_timeout(exc: Exception) -> bool:
    if isinstance(exc, TimeoutError):
        return True
    try:
        import requests

        return isinstance(exc, requests.Timeout)
    except ImportError:  # pragma: no cover
        return False
