"""Surface-match baselines and rank statistics.

BLEU/ROUGE/chrF operate on code tokens (or characters for chrF) and serve as
comparison baselines; the correlation functions relate any score series to
expert judgments.  Kendall's tau uses the tau-b tie correction because
0-4 expert scores are heavily tied.
"""

from __future__ import annotations

import math
import re
from collections import Counter

from .errors import DegenerateSeries, EmptyReference

# ---------------------------------------------------------------------------
# code tokenizer
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
      \#[^\n]*                                   # comment (dropped)
    | [A-Za-z_][A-Za-z0-9_]*                     # identifier / keyword
    | \d+\.\d*(?:[eE][+-]?\d+)?                  # float
    | \.\d+(?:[eE][+-]?\d+)?                     # float starting with dot
    | \d+(?:[eE][+-]?\d+)?                       # int / exponent
    | \"\"\"(?:[^\\]|\\.)*?\"\"\" | '''(?:[^\\]|\\.)*?'''   # triple strings
    | \"(?:[^\"\\\n]|\\.)*\"? | '(?:[^'\\\n]|\\.)*'?        # strings (tolerant)
    | \*\*=? | //=? | >>=? | <<=? | [-+*/%@&|^=<>!]= | ->
    | [-+*/%@&|^~=<>(){}\[\],.:;]
    """,
    re.VERBOSE,
)


def tokenize_code(source: str) -> list[str]:
    """Split code on token boundaries; whitespace and comments are dropped.

    The lexer is total: any character sequence produces a token list, with
    unknown characters kept as single-character tokens.
    """
    tokens: list[str] = []
    pos = 0
    while pos < len(source):
        ch = source[pos]
        if ch.isspace():
            pos += 1
            continue
        match = _TOKEN.match(source, pos)
        if match is None:
            tokens.append(ch)
            pos += 1
            continue
        text = match.group(0)
        pos = match.end()
        if not text.startswith("#"):
            tokens.append(text)
    return tokens


# ---------------------------------------------------------------------------
# n-gram metrics
# ---------------------------------------------------------------------------

def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: list[str], reference: list[str], max_n: int = 4) -> float:
    """Smoothed BLEU: add-one smoothing on the modified precisions for n >= 2."""
    if not reference:
        raise EmptyReference("bleu needs a non-empty reference")
    if not candidate:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand = _ngrams(candidate, n)
        ref = _ngrams(reference, n)
        matched = sum(min(count, ref[gram]) for gram, count in cand.items())
        total = max(len(candidate) - n + 1, 0)
        if n == 1:
            if matched == 0:
                return 0.0
            precision = matched / total
        else:
            precision = (matched + 1) / (total + 1)
        log_sum += math.log(precision)
    brevity = 1.0 if len(candidate) >= len(reference) else math.exp(1 - len(reference) / len(candidate))
    return brevity * math.exp(log_sum / max_n)


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def rouge_n(candidate: list[str], reference: list[str], n: int) -> dict[str, float]:
    if not reference:
        raise EmptyReference("rouge needs a non-empty reference")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    return {"precision": precision, "recall": recall, "f1": _f1(precision, recall)}


def _lcs_length(a: list[str], b: list[str]) -> int:
    # two-row dynamic program
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for item in a:
        current = [0]
        for j, other in enumerate(b, start=1):
            if item == other:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: list[str], reference: list[str]) -> dict[str, float]:
    if not reference:
        raise EmptyReference("rouge needs a non-empty reference")
    lcs = _lcs_length(candidate, reference)
    precision = lcs / len(candidate) if candidate else 0.0
    recall = lcs / len(reference)
    return {"precision": precision, "recall": recall, "f1": _f1(precision, recall)}


def chrf(candidate: str, reference: str, n: int = 6, beta: float = 2.0) -> float:
    """Character n-gram F-beta averaged over orders 1..n (whitespace removed).

    Orders where neither side has any n-gram are skipped, so short identical
    strings still score 1.0.
    """
    if not reference.strip():
        raise EmptyReference("chrf needs a non-empty reference")
    cand_chars = "".join(ch for ch in candidate if not ch.isspace())
    ref_chars = "".join(ch for ch in reference if not ch.isspace())
    scores = []
    for order in range(1, n + 1):
        cand = _ngrams(list(cand_chars), order)
        ref = _ngrams(list(ref_chars), order)
        cand_total = sum(cand.values())
        ref_total = sum(ref.values())
        if cand_total == 0 and ref_total == 0:
            continue
        overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
        precision = overlap / cand_total if cand_total else 0.0
        recall = overlap / ref_total if ref_total else 0.0
        if precision + recall == 0:
            scores.append(0.0)
        else:
            scores.append((1 + beta**2) * precision * recall / (beta**2 * precision + recall))
    return sum(scores) / len(scores) if scores else 0.0


# ---------------------------------------------------------------------------
# correlations and agreement
# ---------------------------------------------------------------------------

def _check_paired(x: list[float], y: list[float]) -> None:
    if len(x) != len(y):
        raise DegenerateSeries(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise DegenerateSeries("need at least two paired observations")


def pearson(x: list[float], y: list[float]) -> float:
    _check_paired(x, y)
    n = len(x)
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0 or var_y == 0:
        raise DegenerateSeries("zero variance")
    return sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)


def _average_ranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1  # average of 1-based positions i+1..j+1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(x: list[float], y: list[float]) -> float:
    _check_paired(x, y)
    return pearson(_average_ranks(x), _average_ranks(y))


def kendall_tau(x: list[float], y: list[float]) -> float:
    """Kendall tau-b: concordance with a correction for ties in either series."""
    _check_paired(x, y)
    n = len(x)
    concordant = discordant = 0
    ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                continue
            if dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    denom_x = concordant + discordant + ties_x
    denom_y = concordant + discordant + ties_y
    if denom_x == 0 or denom_y == 0:
        raise DegenerateSeries("a series is fully tied")
    return (concordant - discordant) / math.sqrt(denom_x * denom_y)


def cohen_kappa(a: list, b: list) -> float:
    """Chance-corrected agreement between two label lists."""
    if len(a) != len(b):
        raise DegenerateSeries(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise DegenerateSeries("empty label lists")
    n = len(a)
    observed = sum(1 for u, v in zip(a, b) if u == v) / n
    counts_a = Counter(a)
    counts_b = Counter(b)
    expected = sum(counts_a[label] * counts_b.get(label, 0) for label in counts_a) / (n * n)
    if expected == 1:
        raise DegenerateSeries("expected agreement is 1; kappa undefined")
    return (observed - expected) / (1 - expected)
