"""Mutable map from dependency name to its current textual semantic.

One store instance accompanies one analyzed code: fragments write what they
learned about each name, later fragments read those descriptions instead of
re-deriving them.  Every write is logged so a trace can replay the store.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dependency import DependenceName, NameKind
from .errors import EmptySemantic


@dataclass
class SemanticEntry:
    text: str
    kind: NameKind = NameKind.UNKNOWN
    last_updated_by: str = ""


@dataclass
class HistoryRecord:
    name: str
    old_text: str | None  # None: the name was not in the store before
    new_text: str
    subcode_id: str
    step: int


@dataclass
class SemanticStore:
    entries: dict[str, SemanticEntry] = field(default_factory=dict)
    history: list[HistoryRecord] = field(default_factory=list)

    def retrieve(
        self, names: list[DependenceName | str]
    ) -> tuple[dict[str, str], list[str]]:
        """Current texts for the requested names, plus the missing ones in order."""
        found: dict[str, str] = {}
        missing: list[str] = []
        for name in names:
            key = name if isinstance(name, str) else name.name
            if key in self.entries:
                found[key] = self.entries[key].text
            else:
                missing.append(key)
        return found, missing

    def upsert(
        self,
        name: DependenceName | str,
        text: str,
        by: str,
        kind: NameKind | None = None,
    ) -> None:
        if not text or not text.strip():
            raise EmptySemantic(f"blank semantic for {name!s}")
        key = name if isinstance(name, str) else name.name
        old = self.entries.get(key)
        if kind is None:
            if isinstance(name, DependenceName) and name.kind is not NameKind.UNKNOWN:
                kind = name.kind
            elif old is not None:
                kind = old.kind
            else:
                kind = NameKind.UNKNOWN
        self.history.append(
            HistoryRecord(
                name=key,
                old_text=old.text if old else None,
                new_text=text,
                subcode_id=by,
                step=len(self.history),
            )
        )
        self.entries[key] = SemanticEntry(text=text, kind=kind, last_updated_by=by)

    def get(self, name: str) -> str | None:
        entry = self.entries.get(name)
        return entry.text if entry else None

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def replay(cls, history: list[HistoryRecord]) -> "SemanticStore":
        """Rebuild a store from a history log; the result has identical entries."""
        store = cls()
        for record in history:
            store.upsert(record.name, record.new_text, record.subcode_id)
        return store

    def to_dict(self) -> dict:
        return {
            "entries": {
                name: {
                    "text": entry.text,
                    "kind": entry.kind.value,
                    "last_updated_by": entry.last_updated_by,
                }
                for name, entry in self.entries.items()
            },
            "history": [
                {
                    "name": r.name,
                    "old_text": r.old_text,
                    "new_text": r.new_text,
                    "subcode_id": r.subcode_id,
                    "step": r.step,
                }
                for r in self.history
            ],
        }
