"""Parsers for structured model output: scores and dependency updates.

Both parsers are total: arbitrary text never crashes them.  The score parser
raises the declared UnparseableScore when no valid tag is present; the update
parser degrades to "nothing changed".
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from ..errors import UnparseableScore

log = logging.getLogger(__name__)

_SCORE_TAG = re.compile(r"\bscore\b[^\w]{0,10}(-?\d+)", re.IGNORECASE)
_EXPLANATION_TAG = re.compile(r"\bexplanation\b[^\w]{0,10}(.*)\Z", re.IGNORECASE | re.DOTALL)
_NAME_TRIM = "-*•`_~# \t"


@dataclass
class ScoreOutput:
    score: int  # 0..4
    explanation: str


def parse_score_output(text: str) -> ScoreOutput:
    """Extract the first in-range integer after a "Score:" tag plus the explanation."""
    match = None
    for candidate in _SCORE_TAG.finditer(text):
        try:
            value = int(candidate.group(1))
        except ValueError:  # pragma: no cover - digits always parse
            continue
        if 0 <= value <= 4:
            match = (candidate, value)
            break
    if match is None:
        raise UnparseableScore(text)
    tag, score = match

    explanation = ""
    explanation_match = _EXPLANATION_TAG.search(text)
    if explanation_match:
        explanation = explanation_match.group(1).strip()
    if not explanation:
        explanation = text[tag.end() :].strip()
    if not explanation:
        explanation = text.strip()
    return ScoreOutput(score=score, explanation=explanation)


def parse_update_output(text: str, expected: list) -> dict[str, str | None]:
    """Parse "<name>: <semantic>" lines for the expected names.

    Returns name -> new text, with None for an explicit "unchanged".  Names
    absent from the output are simply absent (callers treat them as
    unchanged).  Later occurrences of a name win; unknown names are ignored.
    """
    expected_names = {getattr(n, "name", n) for n in expected}
    result: dict[str, str | None] = {}
    for line in text.splitlines():
        head, sep, rest = line.partition(":")
        if not sep:
            continue
        name = head.strip(_NAME_TRIM)
        if not name or not name.isidentifier():
            continue
        if name not in expected_names:
            log.warning("update output mentions unknown name %r; ignored", name)
            continue
        value = rest.strip()
        if not value:
            continue
        if value.strip("*_`.()'\" ").lower() == "unchanged":
            result[name] = None
        else:
            result[name] = value
    return result
