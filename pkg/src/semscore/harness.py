"""Dataset ingestion, batch evaluation, and correlation reporting."""

from __future__ import annotations

import csv
import io
import json
import logging
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import metrics
from .config import CodePair, RunConfig
from .decomposer import strip_comments
from .errors import DuplicateId, DegenerateSeries, MalformedRecord
from .gateway import Backend, ResponseCache
from .pipeline import EvaluationCriteria, evaluate_pair, load_criteria
from .gateway.templates import load_templates

log = logging.getLogger(__name__)

BASELINE_NAMES = ("bleu", "rouge1", "rouge2", "rougeL", "chrf")


# ---------------------------------------------------------------------------
# dataset I/O
# ---------------------------------------------------------------------------

def load_dataset(path: str | Path) -> list[CodePair]:
    """Read a JSONL dataset; validates required fields and id uniqueness."""
    pairs: list[CodePair] = []
    seen: set[str] = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(lineno, f"invalid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise MalformedRecord(lineno, "record is not a JSON object")
        pair_id = record.get("id")
        if not pair_id or not isinstance(pair_id, str):
            raise MalformedRecord(lineno, "id")
        if not record.get("reference_code"):
            raise MalformedRecord(lineno, "reference_code")
        if "generated_code" not in record:
            raise MalformedRecord(lineno, "generated_code")
        if pair_id in seen:
            raise DuplicateId(pair_id)
        seen.add(pair_id)
        expert = record.get("expert_score")
        pairs.append(
            CodePair(
                id=pair_id,
                problem_statement=record.get("problem_statement", "") or "",
                reference_code=record["reference_code"],
                generated_code=record["generated_code"],
                expert_score=float(expert) if expert is not None else None,
                source_tag=record.get("source_tag"),
            )
        )
    return pairs


def write_dataset(pairs: list[CodePair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            record = {k: v for k, v in pair.to_dict().items() if v is not None}
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# batch evaluation
# ---------------------------------------------------------------------------

@dataclass
class PairRow:
    id: str
    score: int | None
    explanation: str
    failed: bool
    error: str | None
    diagnostics: list[dict]
    baselines: dict[str, float | None]
    expert_score: float | None
    source_tag: str | None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "score": self.score,
            "explanation": self.explanation,
            "failed": self.failed,
            "error": self.error,
            "diagnostics": self.diagnostics,
            "baselines": self.baselines,
            "expert_score": self.expert_score,
            "source_tag": self.source_tag,
        }


@dataclass
class RunReport:
    rows: list[PairRow]
    config: dict
    aggregate: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "rows": [r.to_dict() for r in self.rows],
            "aggregate": self.aggregate,
        }

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["id", "score", "failed", "expert_score", *BASELINE_NAMES, "explanation"])
        for row in self.rows:
            writer.writerow(
                [
                    row.id,
                    row.score if row.score is not None else "",
                    row.failed,
                    row.expert_score if row.expert_score is not None else "",
                    *[
                        "" if row.baselines.get(name) is None else f"{row.baselines[name]:.6f}"
                        for name in BASELINE_NAMES
                    ],
                    row.explanation,
                ]
            )
        return buffer.getvalue()


def baseline_metrics(pair: CodePair) -> dict[str, float | None]:
    """Surface-match baselines over the comment-stripped pair."""
    reference = strip_comments(pair.reference_code)
    generated = strip_comments(pair.generated_code)
    ref_tokens = metrics.tokenize_code(reference)
    gen_tokens = metrics.tokenize_code(generated)
    values: dict[str, float | None] = {name: None for name in BASELINE_NAMES}
    if not ref_tokens:
        return values
    values["bleu"] = metrics.bleu(gen_tokens, ref_tokens)
    values["rouge1"] = metrics.rouge_n(gen_tokens, ref_tokens, 1)["f1"]
    values["rouge2"] = metrics.rouge_n(gen_tokens, ref_tokens, 2)["f1"]
    values["rougeL"] = metrics.rouge_l(gen_tokens, ref_tokens)["f1"]
    values["chrf"] = metrics.chrf(generated, reference)
    return values


def _safe_name(pair_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", pair_id)


def _evaluate_one(
    pair: CodePair,
    config: RunConfig,
    backend: Backend,
    cache: ResponseCache | None,
    templates,
    criteria: EvaluationCriteria,
) -> PairRow:
    baselines = baseline_metrics(pair)
    try:
        result = evaluate_pair(pair, config, backend, cache, templates, criteria)
    except Exception as exc:
        log.warning("pair %s failed: %s", pair.id, exc)
        return PairRow(
            id=pair.id,
            score=None,
            explanation="",
            failed=True,
            error=f"{type(exc).__name__}: {exc}",
            diagnostics=[],
            baselines=baselines,
            expert_score=pair.expert_score,
            source_tag=pair.source_tag,
        )
    if config.trace_dir:
        trace_path = Path(config.trace_dir)
        trace_path.mkdir(parents=True, exist_ok=True)
        payload = {"pair_id": pair.id, "config": config.to_dict(), **result.to_dict()}
        (trace_path / f"{_safe_name(pair.id)}.json").write_text(
            json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8"
        )
    return PairRow(
        id=pair.id,
        score=result.score,
        explanation=result.explanation,
        failed=False,
        error=None,
        diagnostics=result.diagnostics,
        baselines=baselines,
        expert_score=pair.expert_score,
        source_tag=pair.source_tag,
    )


def run_batch(
    pairs: list[CodePair],
    config: RunConfig,
    backend: Backend,
    cache: ResponseCache | None = None,
    progress_path: str | Path | None = None,
) -> RunReport:
    """Evaluate all pairs with bounded parallelism; failures never abort the batch.

    Rows come back in dataset order regardless of completion order.  When a
    cache is configured, a re-run replays entirely from disk, so interrupting
    and restarting a batch converges on the same report.
    """
    start = time.monotonic()
    if cache is None and config.cache_dir:
        cache = ResponseCache(config.cache_dir)
    templates = load_templates(config.templates_dir)
    criteria = load_criteria(config)

    rows: list[PairRow | None] = [None] * len(pairs)
    progress_lock = threading.Lock()
    progress_file = open(progress_path, "a", encoding="utf-8") if progress_path else None

    def work(index: int) -> None:
        row = _evaluate_one(pairs[index], config, backend, cache, templates, criteria)
        rows[index] = row
        if progress_file:
            with progress_lock:
                progress_file.write(json.dumps(row.to_dict(), ensure_ascii=False) + "\n")
                progress_file.flush()

    try:
        if config.parallelism == 1:
            for i in range(len(pairs)):
                work(i)
        else:
            with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
                list(pool.map(work, range(len(pairs))))
    finally:
        if progress_file:
            progress_file.close()

    done = [r for r in rows if r is not None]
    report = RunReport(rows=done, config=config.to_dict())
    report.aggregate = _aggregate(done, wall_time=time.monotonic() - start)
    return report


def _correlations(xs: list[float], ys: list[float]) -> dict[str, float | None]:
    out: dict[str, float | None] = {}
    for name, fn in (("pearson", metrics.pearson), ("spearman", metrics.spearman), ("kendall_tau", metrics.kendall_tau)):
        try:
            out[name] = fn(xs, ys)
        except DegenerateSeries:
            out[name] = None
    return out


def _aggregate(rows: list[PairRow], wall_time: float) -> dict:
    succeeded = [r for r in rows if not r.failed and r.score is not None]
    histogram = {str(k): 0 for k in range(5)}
    for row in succeeded:
        histogram[str(row.score)] += 1

    aggregate: dict = {
        "pairs": len(rows),
        "failures": sum(1 for r in rows if r.failed),
        "score_histogram": histogram,
        "wall_time_seconds": wall_time,
    }

    with_expert = [r for r in succeeded if r.expert_score is not None]
    if len(with_expert) >= 2:
        expert = [r.expert_score for r in with_expert]
        aggregate["correlations"] = {
            "framework": _correlations([float(r.score) for r in with_expert], expert)
        }
        for name in BASELINE_NAMES:
            series = [(r.baselines.get(name), r.expert_score) for r in with_expert]
            series = [(v, e) for v, e in series if v is not None]
            if len(series) >= 2:
                aggregate["correlations"][name] = _correlations(
                    [v for v, _ in series], [e for _, e in series]
                )
    return aggregate


# ---------------------------------------------------------------------------
# correlation report
# ---------------------------------------------------------------------------

@dataclass
class CorrelationReport:
    rows: list[dict]  # {method, pearson, spearman, kendall_tau}

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["method", "pearson", "spearman", "kendall_tau"])
        for row in self.rows:
            writer.writerow(
                [
                    row["method"],
                    *[
                        "n/a" if row[k] is None else f"{row[k]:.6f}"
                        for k in ("pearson", "spearman", "kendall_tau")
                    ],
                ]
            )
        return buffer.getvalue()

    def to_table(self) -> str:
        header = f"{'method':<12} {'pearson':>9} {'spearman':>9} {'kendall':>9}"
        lines = [header, "-" * len(header)]
        for row in self.rows:
            cells = [
                "n/a" if row[k] is None else f"{row[k]:+.3f}"
                for k in ("pearson", "spearman", "kendall_tau")
            ]
            lines.append(f"{row['method']:<12} {cells[0]:>9} {cells[1]:>9} {cells[2]:>9}")
        return "\n".join(lines)


def correlation_report(report: RunReport) -> CorrelationReport:
    """Correlations of the framework and every baseline against expert scores."""
    usable = [
        r for r in report.rows if not r.failed and r.score is not None and r.expert_score is not None
    ]
    if len(usable) < 2:
        raise DegenerateSeries("need at least two scored pairs with expert scores")
    expert = [r.expert_score for r in usable]
    rows = [{"method": "framework", **_correlations([float(r.score) for r in usable], expert)}]
    for name in BASELINE_NAMES:
        pairs = [(r.baselines.get(name), r.expert_score) for r in usable if r.baselines.get(name) is not None]
        if len(pairs) >= 2:
            rows.append(
                {"method": name, **_correlations([v for v, _ in pairs], [e for _, e in pairs])}
            )
        else:
            rows.append({"method": name, "pearson": None, "spearman": None, "kendall_tau": None})
    return CorrelationReport(rows=rows)
