"""Backend-agnostic LLM access: templates, transports, caching, output parsing."""

from .backends import (
    Backend,
    ChatRequest,
    ChatResponse,
    HTTPBackend,
    MockBackend,
    request_digest,
)
from .cache import ResponseCache, cache_key, cached_complete
from .parsing import ScoreOutput, parse_score_output, parse_update_output
from .templates import PromptTemplate, TEMPLATE_IDS, load_template, load_templates, render

__all__ = [
    "Backend",
    "ChatRequest",
    "ChatResponse",
    "HTTPBackend",
    "MockBackend",
    "PromptTemplate",
    "ResponseCache",
    "ScoreOutput",
    "TEMPLATE_IDS",
    "cache_key",
    "cached_complete",
    "load_template",
    "load_templates",
    "parse_score_output",
    "parse_update_output",
    "render",
    "request_digest",
]
