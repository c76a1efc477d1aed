"""Command-line interface: evaluate, batch, decompose, metrics, correlate."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import CodePair, RunConfig
from .decomposer import build_decomposition_tree
from .errors import SemScoreError
from .gateway import HTTPBackend, MockBackend, ResponseCache
from .harness import (
    RunReport,
    PairRow,
    baseline_metrics,
    correlation_report,
    load_dataset,
    run_batch,
)
from .pipeline import evaluate_pair

log = logging.getLogger(__name__)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threshold", type=int, default=3, help="decomposition threshold (1-10)")
    parser.add_argument("--temperature", type=float, default=0.2)
    parser.add_argument("--policy", choices=["full", "initial", "lack"], default="initial",
                        help="how much of the problem statement reaches comprehension prompts")
    parser.add_argument("--backend", choices=["http", "mock"], default="mock")
    parser.add_argument("--model", default="gpt-3.5-turbo")
    parser.add_argument("--endpoint", default="", help="chat-completions URL for the http backend")
    parser.add_argument("--mock-script", default=None, help="JSON response script for the mock backend")
    parser.add_argument("--criteria", default=None, help="path to a criteria JSON file")
    parser.add_argument("--templates-dir", default=None, help="directory overriding packaged prompt templates")
    parser.add_argument("--cache-dir", default=None)
    parser.add_argument("--trace-dir", default=None, help="write one trace JSON per pair here")
    parser.add_argument("--parallelism", type=int, default=4)
    parser.add_argument("--max-tokens", type=int, default=None)
    parser.add_argument("--single-call", action="store_true",
                        help="fold comparison into the scoring call (one call instead of two)")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        threshold=args.threshold,
        temperature=args.temperature,
        policy=args.policy,
        model=args.model,
        backend=args.backend,
        endpoint=args.endpoint,
        mock_script=args.mock_script,
        criteria_path=args.criteria,
        templates_dir=args.templates_dir,
        cache_dir=args.cache_dir,
        trace_dir=args.trace_dir,
        parallelism=args.parallelism,
        max_tokens=args.max_tokens,
        single_call_scoring=args.single_call,
    )


def make_backend(config: RunConfig):
    if config.backend == "mock":
        if not config.mock_script:
            raise SemScoreError("the mock backend needs --mock-script (a JSON response file)")
        return MockBackend.from_json(config.mock_script)
    if not config.endpoint:
        raise SemScoreError("the http backend needs --endpoint")
    return HTTPBackend(
        endpoint=config.endpoint,
        api_key_env=config.api_key_env,
        max_in_flight=config.max_in_flight,
        requests_per_minute=config.requests_per_minute,
    )


def _cache_for(config: RunConfig) -> ResponseCache | None:
    return ResponseCache(config.cache_dir) if config.cache_dir else None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    problem = args.problem or ""
    if args.problem_file:
        problem = Path(args.problem_file).read_text(encoding="utf-8")
    pair = CodePair(
        id=args.id,
        problem_statement=problem,
        reference_code=Path(args.reference).read_text(encoding="utf-8"),
        generated_code=Path(args.generated).read_text(encoding="utf-8"),
    )
    result = evaluate_pair(pair, config, make_backend(config), _cache_for(config))
    if config.trace_dir:
        trace_dir = Path(config.trace_dir)
        trace_dir.mkdir(parents=True, exist_ok=True)
        (trace_dir / f"{pair.id}.json").write_text(
            json.dumps({"pair_id": pair.id, "config": config.to_dict(), **result.to_dict()},
                       ensure_ascii=False, indent=2),
            encoding="utf-8",
        )
    print(json.dumps(
        {"id": pair.id, "score": result.score, "explanation": result.explanation,
         "differences": result.differences, "diagnostics": result.diagnostics},
        ensure_ascii=False, indent=2,
    ))
    return 0


def cmd_batch(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    pairs = load_dataset(args.dataset)
    out = Path(args.out)
    report = run_batch(
        pairs,
        config,
        make_backend(config),
        cache=_cache_for(config),
        progress_path=out.with_suffix(out.suffix + ".rows.jsonl"),
    )
    out.write_text(json.dumps(report.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8")
    out.with_suffix(".csv").write_text(report.to_csv(), encoding="utf-8")
    agg = report.aggregate
    print(f"evaluated {agg['pairs']} pairs, {agg['failures']} failures")
    print(f"score histogram: {agg['score_histogram']}")
    if "correlations" in agg:
        framework = agg["correlations"]["framework"]
        shown = {k: (f"{v:.3f}" if v is not None else "n/a") for k, v in framework.items()}
        print(f"framework vs expert: {shown}")
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    source = Path(args.source).read_text(encoding="utf-8")
    tree = build_decomposition_tree(source, args.threshold)
    if not args.json_only:
        print(tree.render_text())
        print()
    print(json.dumps(tree.to_dict(), ensure_ascii=False, indent=2))
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    import csv as csv_module

    pairs = load_dataset(args.dataset)
    rows = [(pair, baseline_metrics(pair)) for pair in pairs]
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        writer = csv_module.writer(handle)
        writer.writerow(["id", "bleu", "rouge1", "rouge2", "rougeL", "chrf", "expert_score"])
        for pair, values in rows:
            writer.writerow(
                [
                    pair.id,
                    *["" if values[k] is None else f"{values[k]:.6f}"
                      for k in ("bleu", "rouge1", "rouge2", "rougeL", "chrf")],
                    pair.expert_score if pair.expert_score is not None else "",
                ]
            )
    print(f"wrote baseline metrics for {len(rows)} pairs to {args.out}")
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    data = json.loads(Path(args.results).read_text(encoding="utf-8"))
    rows = [
        PairRow(
            id=r["id"],
            score=r.get("score"),
            explanation=r.get("explanation", ""),
            failed=r.get("failed", False),
            error=r.get("error"),
            diagnostics=r.get("diagnostics", []),
            baselines=r.get("baselines", {}),
            expert_score=r.get("expert_score"),
            source_tag=r.get("source_tag"),
        )
        for r in data["rows"]
    ]
    report = correlation_report(RunReport(rows=rows, config=data.get("config", {})))
    print(report.to_table())
    if args.out:
        Path(args.out).write_text(report.to_csv(), encoding="utf-8")
        print(f"\nwrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semscore",
        description="Score generated code against a reference by recursive semantic comprehension.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="evaluate a single pair from files")
    p_eval.add_argument("--id", default="pair")
    p_eval.add_argument("--problem", default="", help="problem statement text")
    p_eval.add_argument("--problem-file", default=None)
    p_eval.add_argument("--reference", required=True, help="reference code file")
    p_eval.add_argument("--generated", required=True, help="generated code file")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_batch = sub.add_parser("batch", help="evaluate a JSONL dataset and write a report")
    p_batch.add_argument("--dataset", required=True)
    p_batch.add_argument("--out", required=True, help="report JSON path (CSV written alongside)")
    _add_config_flags(p_batch)
    p_batch.set_defaults(func=cmd_batch)

    p_dec = sub.add_parser("decompose", help="print the decomposition tree of a source file")
    p_dec.add_argument("--source", required=True)
    p_dec.add_argument("--threshold", type=int, default=3)
    p_dec.add_argument("--json-only", action="store_true")
    p_dec.set_defaults(func=cmd_decompose)

    p_met = sub.add_parser("metrics", help="baseline surface metrics over a JSONL dataset")
    p_met.add_argument("--dataset", required=True)
    p_met.add_argument("--out", required=True, help="CSV output path")
    p_met.set_defaults(func=cmd_metrics)

    p_cor = sub.add_parser("correlate", help="correlation report from an existing batch report")
    p_cor.add_argument("--results", required=True, help="report JSON produced by `batch`")
    p_cor.add_argument("--out", default=None, help="optional CSV output path")
    p_cor.set_defaults(func=cmd_correlate)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SemScoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SyntaxError as exc:
        print(f"error: source does not parse: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
