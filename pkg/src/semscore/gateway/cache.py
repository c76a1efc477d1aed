"""Disk cache for chat completions: one JSON file per request key."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from .backends import Backend, ChatRequest, ChatResponse

log = logging.getLogger(__name__)


def cache_key(backend_id: str, request: ChatRequest) -> str:
    canonical = json.dumps(
        [backend_id, request.model, request.temperature, request.messages],
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ResponseCache:
    """Concurrent-reader, atomic-writer cache keyed by request digest.

    Any I/O or decode problem degrades to a miss (with a warning); caching is
    an optimization, never a correctness dependency.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> dict | None:
        path = self._path(key)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
            log.warning("cache entry %s unreadable (%s); treating as miss", key[:12], exc)
            return None
        if not isinstance(payload, dict) or "response" not in payload:
            log.warning("cache entry %s malformed; treating as miss", key[:12])
            return None
        return payload

    def put(self, key: str, payload: dict) -> None:
        try:
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, ensure_ascii=False, indent=2)
            os.replace(tmp, self._path(key))
        except OSError as exc:
            log.warning("cache write for %s failed (%s); continuing uncached", key[:12], exc)


def cached_complete(
    backend: Backend, cache: ResponseCache | None, request: ChatRequest
) -> ChatResponse:
    """Serve from cache when possible; otherwise call the backend and store."""
    if cache is None:
        return backend.complete(request)
    key = cache_key(backend.backend_id, request)
    stored = cache.get(key)
    if stored is not None:
        recorded = stored["response"]
        return ChatResponse(
            content=recorded.get("content", ""),
            usage=recorded.get("usage", {}),
            cached=True,
            backend_id=backend.backend_id,
        )
    response = backend.complete(request)
    cache.put(
        key,
        {
            "request": request.to_dict(),
            "response": {
                "content": response.content,
                "usage": response.usage,
                "backend_id": response.backend_id,
            },
        },
    )
    return response
