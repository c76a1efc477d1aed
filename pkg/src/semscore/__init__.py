"""semscore: score generated code against a reference via recursive semantic comprehension.

The pipeline decomposes both codes into fragments along eight statement
kinds, lets a language model understand each fragment in isolation (external
names resolved through a per-code semantic store), summarizes, compares the
two overall semantics, and grades the result on a 0-4 rubric.  A deterministic
mock backend makes the whole pipeline runnable and testable offline.
"""

from .config import CodePair, ProblemStatementPolicy, RunConfig
from .decomposer import (
    DecompositionTree,
    PredefinedKind,
    SubCode,
    build_decomposition_tree,
    compute_depth,
    decompose,
    parse_source,
    strip_comments,
)
from .dependency import (
    DependenceName,
    DependencyReport,
    NameKind,
    analyze_dependencies,
    defined_names,
    external_dependencies,
    has_input_statement,
)
from .gateway import (
    ChatRequest,
    ChatResponse,
    HTTPBackend,
    MockBackend,
    PromptTemplate,
    ResponseCache,
    ScoreOutput,
    cached_complete,
    parse_score_output,
    parse_update_output,
    render,
)
from .harness import (
    CorrelationReport,
    RunReport,
    baseline_metrics,
    correlation_report,
    load_dataset,
    run_batch,
    write_dataset,
)
from .pipeline import (
    CodeSemantic,
    EvaluationCriteria,
    EvaluationResult,
    compare_semantics,
    evaluate_pair,
    get_semantic,
    score,
)
from .store import SemanticStore
from . import errors, metrics

__version__ = "0.1.0"

__all__ = [
    "CodePair",
    "CodeSemantic",
    "ChatRequest",
    "ChatResponse",
    "CorrelationReport",
    "DecompositionTree",
    "DependenceName",
    "DependencyReport",
    "EvaluationCriteria",
    "EvaluationResult",
    "HTTPBackend",
    "MockBackend",
    "NameKind",
    "PredefinedKind",
    "ProblemStatementPolicy",
    "PromptTemplate",
    "ResponseCache",
    "RunConfig",
    "RunReport",
    "ScoreOutput",
    "SemanticStore",
    "SubCode",
    "analyze_dependencies",
    "baseline_metrics",
    "build_decomposition_tree",
    "cached_complete",
    "compare_semantics",
    "compute_depth",
    "correlation_report",
    "decompose",
    "defined_names",
    "errors",
    "evaluate_pair",
    "external_dependencies",
    "get_semantic",
    "has_input_statement",
    "load_dataset",
    "metrics",
    "parse_score_output",
    "parse_source",
    "parse_update_output",
    "render",
    "run_batch",
    "score",
    "strip_comments",
    "write_dataset",
]
