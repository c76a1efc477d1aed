"""Exception types shared across the package."""

from __future__ import annotations


class SemScoreError(Exception):
    """Base class for all package-specific errors."""


# --- decomposition ---------------------------------------------------------

class DegenerateFragment(SemScoreError):
    """A fragment at or above the decomposition threshold cannot be split.

    Never propagated to callers of the tree builder: the fragment becomes a
    leaf with ``forced_leaf`` set instead.
    """


# --- semantic store --------------------------------------------------------

class EmptySemantic(SemScoreError):
    """Attempt to store a blank semantic description."""


# --- prompt templates and output parsing -----------------------------------

class MissingPlaceholder(SemScoreError):
    def __init__(self, name: str):
        super().__init__(f"template binding missing placeholder {name!r}")
        self.name = name


class UnparseableScore(SemScoreError):
    def __init__(self, text: str):
        super().__init__(f"no 'Score: <0-4>' tag found in output: {text[:200]!r}")
        self.text = text


# --- transport -------------------------------------------------------------

class TransportError(SemScoreError):
    def __init__(self, status: int, body: str):
        super().__init__(f"backend request failed with status {status}: {body[:200]}")
        self.status = status
        self.body = body


class RateLimited(TransportError):
    def __init__(self, body: str, retry_after: float | None = None):
        super().__init__(429, body)
        self.retry_after = retry_after


class BackendTimeout(SemScoreError):
    """Request timed out after all retries."""


class MockScriptMiss(SemScoreError):
    """The mock backend has no scripted response for a request."""


# --- pipeline --------------------------------------------------------------

class ReferenceInvalid(SemScoreError):
    """The reference code of a pair does not parse: a dataset error, not a score."""


class EmptyCode(SemScoreError):
    """Code contains no statements after comment stripping."""


class InvalidCriteria(SemScoreError):
    """Evaluation criteria do not define exactly the five levels 0-4."""


# --- metrics ---------------------------------------------------------------

class EmptyReference(SemScoreError):
    """Surface metrics are undefined for an empty reference."""


class DegenerateSeries(SemScoreError):
    """Correlation is undefined: series too short, constant, or fully tied."""


# --- dataset ---------------------------------------------------------------

class MalformedRecord(SemScoreError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class DuplicateId(SemScoreError):
    def __init__(self, pair_id: str):
        super().__init__(f"duplicate pair id {pair_id!r}")
        self.pair_id = pair_id
