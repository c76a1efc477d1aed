"""Prompt templates: editable text assets with named placeholders."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import MissingPlaceholder

TEMPLATE_IDS = (
    "comprehend_leaf",
    "merge_internal",
    "update_dependencies",
    "summarize",
    "compare",
    "score",
)

_PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")


@dataclass
class FewShotExample:
    user: str
    assistant: str


@dataclass
class PromptTemplate:
    id: str
    body: str
    few_shot: list[FewShotExample] = field(default_factory=list)

    @property
    def placeholders(self) -> list[str]:
        seen: dict[str, None] = {}
        for match in _PLACEHOLDER.finditer(self.body):
            seen.setdefault(match.group(1))
        return list(seen)


def render(template: PromptTemplate, bindings: dict[str, str]) -> str:
    """Substitute placeholders in the body; few-shot examples come first.

    Binding values are inserted verbatim and never re-scanned, so code
    containing braces is safe.
    """
    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in bindings:
            raise MissingPlaceholder(name)
        return bindings[name]

    parts = [
        f"Example input:\n{ex.user}\nExample output:\n{ex.assistant}\n\n"
        for ex in template.few_shot
    ]
    parts.append(_PLACEHOLDER.sub(substitute, template.body))
    return "".join(parts)


def _template_from_dict(data: dict) -> PromptTemplate:
    return PromptTemplate(
        id=data["id"],
        body=data["body"],
        few_shot=[FewShotExample(ex["user"], ex["assistant"]) for ex in data.get("few_shot", [])],
    )


def load_template(template_id: str, templates_dir: str | Path | None = None) -> PromptTemplate:
    """Load one template, preferring a user-supplied directory over packaged defaults."""
    if template_id not in TEMPLATE_IDS:
        raise KeyError(f"unknown template id {template_id!r}; expected one of {TEMPLATE_IDS}")
    if templates_dir is not None:
        custom = Path(templates_dir) / f"{template_id}.json"
        if custom.exists():
            return _template_from_dict(json.loads(custom.read_text(encoding="utf-8")))
    packaged = resources.files("semscore").joinpath("data", "templates", f"{template_id}.json")
    return _template_from_dict(json.loads(packaged.read_text(encoding="utf-8")))


def load_templates(templates_dir: str | Path | None = None) -> dict[str, PromptTemplate]:
    return {tid: load_template(tid, templates_dir) for tid in TEMPLATE_IDS}
