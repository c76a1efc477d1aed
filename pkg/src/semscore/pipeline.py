"""Orchestration: recursive comprehension, comparison, and scoring of code pairs.

Comprehension walks the decomposition tree in source order, children before
parents.  Each fragment's prompt carries the stored meaning of the external
names it reads, so the model never needs the rest of the program; after each
fragment, the store is refreshed with what the fragment changed.  The two
codes of a pair are analyzed with independent stores, their overall semantics
are compared, and the difference report is scored against a five-level rubric.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .config import CodePair, ProblemStatementPolicy, RunConfig
from .decomposer import DecompositionTree, SubCode, build_decomposition_tree, parse_source, strip_comments
from .dependency import DependenceName, DependencyReport, analyze_dependencies
from .errors import EmptyCode, InvalidCriteria, ReferenceInvalid, UnparseableScore
from .gateway import (
    Backend,
    ChatRequest,
    ResponseCache,
    ScoreOutput,
    cached_complete,
    load_templates,
    parse_score_output,
    parse_update_output,
    render,
)
from .store import SemanticStore

log = logging.getLogger(__name__)

SYSTEM_PROMPT = "You are a careful code analysis assistant. Follow the requested output format exactly."

MISSING_DEPENDENCY_SENTINEL = "undefined symbol {name}; likely defined nowhere in this code"

REFORMAT_INSTRUCTION = (
    "\n\nIMPORTANT: your previous reply could not be parsed. Answer again using exactly:\n"
    "Score: <integer 0-4>\nExplanation: <text>"
)


def problem_block(problem: str) -> str:
    """The insertable problem-statement section; empty when withheld."""
    return f"Problem statement:\n{problem}\n\n" if problem.strip() else ""


@dataclass
class CallRecord:
    template_id: str
    subcode_id: str
    cached: bool

    def to_dict(self) -> dict:
        return {"template": self.template_id, "subcode": self.subcode_id, "cached": self.cached}


@dataclass
class CodeSemantic:
    text: str
    per_node: dict[str, str]
    store_final: SemanticStore
    call_trace: list[CallRecord]
    tree: DecompositionTree
    usage: dict[str, int] = field(default_factory=lambda: {"prompt_tokens": 0, "completion_tokens": 0})

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "per_node": self.per_node,
            "store": self.store_final.to_dict(),
            "call_trace": [c.to_dict() for c in self.call_trace],
            "tree": self.tree.to_dict(),
            "usage": self.usage,
        }


@dataclass
class CriteriaLevel:
    score: int
    label: str
    description: str


@dataclass
class EvaluationCriteria:
    levels: list[CriteriaLevel]
    extra_instructions: str = ""

    def __post_init__(self) -> None:
        if sorted(level.score for level in self.levels) != [0, 1, 2, 3, 4]:
            raise InvalidCriteria(
                f"criteria must define scores 0..4 exactly once, got {[l.score for l in self.levels]}"
            )

    def render_text(self) -> str:
        lines = [f"{l.score}. {l.label}: {l.description}" for l in sorted(self.levels, key=lambda l: l.score)]
        if self.extra_instructions.strip():
            lines.append(self.extra_instructions.strip())
        return "\n".join(lines)

    @classmethod
    def from_dict(cls, data: dict) -> "EvaluationCriteria":
        return cls(
            levels=[CriteriaLevel(l["score"], l["label"], l["description"]) for l in data["levels"]],
            extra_instructions=data.get("extra_instructions", ""),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "EvaluationCriteria":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    @classmethod
    def preset(cls, name: str = "default") -> "EvaluationCriteria":
        text = resources.files("semscore").joinpath("data", "criteria", f"{name}.json").read_text(
            encoding="utf-8"
        )
        return cls.from_dict(json.loads(text))


def load_criteria(config: RunConfig) -> EvaluationCriteria:
    if config.criteria_path:
        return EvaluationCriteria.from_json(config.criteria_path)
    return EvaluationCriteria.preset("default")


@dataclass
class EvaluationResult:
    score: int
    explanation: str
    differences: str
    reference_semantic: CodeSemantic | None
    generated_semantic: CodeSemantic | None
    diagnostics: list[dict]
    comparison_trace: list[CallRecord] = field(default_factory=list)
    usage: dict[str, int] = field(default_factory=lambda: {"prompt_tokens": 0, "completion_tokens": 0})

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "explanation": self.explanation,
            "differences": self.differences,
            "reference": self.reference_semantic.to_dict() if self.reference_semantic else None,
            "generated": self.generated_semantic.to_dict() if self.generated_semantic else None,
            "diagnostics": self.diagnostics,
            "comparison_trace": [c.to_dict() for c in self.comparison_trace],
            "usage": self.usage,
        }


class _LLM:
    """Shared request plumbing: render, send (through the cache), record."""

    def __init__(self, config: RunConfig, backend: Backend, cache: ResponseCache | None, templates):
        self.config = config
        self.backend = backend
        self.cache = cache
        self.templates = templates
        self.trace: list[CallRecord] = []
        self.usage = {"prompt_tokens": 0, "completion_tokens": 0}

    def call(self, template_id: str, subcode_id: str, bindings: dict[str, str], extra: str = "") -> str:
        prompt = render(self.templates[template_id], bindings) + extra
        request = ChatRequest(
            model=self.config.model,
            messages=[
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": prompt},
            ],
            temperature=self.config.temperature,
            max_tokens=self.config.max_tokens,
        )
        response = cached_complete(self.backend, self.cache, request)
        self.trace.append(CallRecord(template_id, subcode_id, response.cached))
        for key in self.usage:
            self.usage[key] += response.usage.get(key, 0)
        if (
            self.config.max_tokens is not None
            and response.usage.get("completion_tokens", 0) >= self.config.max_tokens
        ):
            log.warning("completion for %s/%s may be truncated at max_tokens", template_id, subcode_id)
        return response.content


class _Comprehension:
    """One code's recursive semantic analysis over its decomposition tree."""

    def __init__(
        self,
        tree: DecompositionTree,
        problem: str,
        policy: ProblemStatementPolicy,
        config: RunConfig,
        llm: _LLM,
        diagnostics: list[dict],
    ):
        self.tree = tree
        self.problem = problem
        self.policy = policy
        self.config = config
        self.llm = llm
        self.diagnostics = diagnostics
        self.store = SemanticStore()
        self.per_node: dict[str, str] = {}
        self.builtins = config.builtins()
        self.input_sources = config.input_sources()

    def run(self) -> CodeSemantic:
        semantics = [self.process(child) for child in self.tree.root.children]
        overall = self.summarize(semantics, "root")
        self.per_node["root"] = overall
        return CodeSemantic(
            text=overall,
            per_node=self.per_node,
            store_final=self.store,
            call_trace=self.llm.trace,
            tree=self.tree,
            usage=self.llm.usage,
        )

    # -- per-node processing --------------------------------------------------

    def process(self, node: SubCode) -> str:
        try:
            report = analyze_dependencies(
                node.dedented_text, builtins=self.builtins, input_sources=self.input_sources
            )
        except SyntaxError:
            # a slice can fail to reparse standalone (e.g. odd multiline strings);
            # analyze it without dependency context rather than aborting the pair
            self.diagnostics.append({"kind": "fragment_analysis_failed", "subcode": node.id})
            report = DependencyReport(external=[], defined=[], has_input=False)
        found, missing = self.store.retrieve(report.external)
        for name in missing:
            self.diagnostics.append(
                {"kind": "missing_dependency", "name": name, "subcode": node.id}
            )
        if node.forced_leaf:
            self.diagnostics.append({"kind": "forced_leaf", "subcode": node.id, "depth": node.depth})
        dep_block = self._dependency_block(report.external, found)

        if node.is_leaf:
            include_problem = self.policy is ProblemStatementPolicy.FULL or (
                self.policy is ProblemStatementPolicy.INITIAL and report.has_input
            )
            semantic = self.llm.call(
                "comprehend_leaf",
                node.id,
                {
                    "problem_statement": problem_block(self.problem) if include_problem else "",
                    "dependency_semantics": dep_block,
                    "code": node.dedented_text,
                },
            )
        else:
            child_semantics = [self.process(child) for child in node.children]
            child_summary = self.summarize(child_semantics, node.id)
            semantic = self.llm.call(
                "merge_internal",
                node.id,
                {
                    "problem_statement": self._background(),
                    "dependency_semantics": dep_block,
                    "code": node.dedented_text,
                    "child_semantics": child_summary,
                },
            )
        self.per_node[node.id] = semantic
        self._update_store(node, report, found, semantic)
        return semantic

    def summarize(self, semantics: list[str], subcode_id: str) -> str:
        listing = "\n".join(f"{i}. {text}" for i, text in enumerate(semantics, start=1))
        return self.llm.call(
            "summarize",
            subcode_id,
            {"problem_statement": self._background(), "child_semantics": listing},
        )

    def _background(self) -> str:
        return problem_block(self.problem) if self.policy is ProblemStatementPolicy.FULL else ""

    def _dependency_block(self, external: list[DependenceName], found: dict[str, str]) -> str:
        lines = []
        for dep in external:
            text = found.get(dep.name) or MISSING_DEPENDENCY_SENTINEL.format(name=dep.name)
            lines.append(f"{dep.name}: {text}")
        return "\n".join(lines) if lines else "(none)"

    def _update_store(self, node: SubCode, report, found: dict[str, str], semantic: str) -> None:
        expected: list[DependenceName] = list(report.external)
        external_names = {d.name for d in report.external}
        expected.extend(d for d in report.defined if d.name not in external_names)
        if not expected:
            return

        current_lines = []
        for dep in expected:
            text = self.store.get(dep.name) or found.get(dep.name)
            if text is None:
                if dep.name in external_names:
                    text = MISSING_DEPENDENCY_SENTINEL.format(name=dep.name)
                else:
                    text = "(new symbol defined by this fragment)"
            current_lines.append(f"{dep.name}: {text}")

        output = self.llm.call(
            "update_dependencies",
            node.id,
            {
                "problem_statement": self._background(),
                "code": node.dedented_text,
                "sub_semantics": semantic,
                "dependency_semantics": "\n".join(current_lines),
            },
        )
        updates = parse_update_output(output, expected)
        defined_names = {d.name for d in report.defined}
        for dep in expected:
            new_text = updates.get(dep.name)
            if isinstance(new_text, str):
                self.store.upsert(dep.name, new_text, by=node.id, kind=dep.kind)
            elif dep.name in self.store:
                # unchanged (explicit or absent): refresh as a no-op-valued update
                self.store.upsert(dep.name, self.store.get(dep.name), by=node.id)
            elif dep.name in defined_names:
                # defined here but the model omitted it: fall back to the
                # fragment's own semantic so later fragments can resolve it
                self.store.upsert(dep.name, semantic, by=node.id, kind=dep.kind)
            # a missing external never materializes an entry


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def get_semantic(
    source: str,
    problem: str | None,
    policy: ProblemStatementPolicy | None = None,
    config: RunConfig | None = None,
    backend: Backend | None = None,
    cache: ResponseCache | None = None,
    templates=None,
    diagnostics: list[dict] | None = None,
) -> CodeSemantic:
    """Analyze one code: comprehension per fragment, store updates, final summary."""
    if backend is None:
        raise ValueError("a backend is required")
    config = config or RunConfig()
    policy = policy or config.policy
    problem = problem or ""
    if not problem.strip():
        policy = ProblemStatementPolicy.LACK
    stripped = strip_comments(source)
    module = parse_source(stripped)  # SyntaxError propagates to the caller
    if not module.body:
        raise EmptyCode("no statements after comment stripping")
    tree = build_decomposition_tree(stripped, config.threshold)
    llm = _LLM(config, backend, cache, templates or load_templates(config.templates_dir))
    run_diagnostics = diagnostics if diagnostics is not None else []
    return _Comprehension(tree, problem, policy, config, llm, run_diagnostics).run()


def compare_semantics(
    reference: CodeSemantic,
    generated: CodeSemantic,
    backend: Backend,
    config: RunConfig | None = None,
    cache: ResponseCache | None = None,
    templates=None,
    trace: list[CallRecord] | None = None,
    usage: dict[str, int] | None = None,
) -> str:
    """One comparison call over the two overall semantics; returns the report verbatim."""
    config = config or RunConfig()
    llm = _LLM(config, backend, cache, templates or load_templates(config.templates_dir))
    differences = llm.call(
        "compare",
        "comparison",
        {"reference_semantic": reference.text, "generated_semantic": generated.text},
    )
    if trace is not None:
        trace.extend(llm.trace)
    if usage is not None:
        for key in llm.usage:
            usage[key] = usage.get(key, 0) + llm.usage[key]
    return differences


def score(
    differences: str,
    problem: str,
    criteria: EvaluationCriteria,
    backend: Backend,
    config: RunConfig | None = None,
    cache: ResponseCache | None = None,
    templates=None,
    diagnostics: list[dict] | None = None,
    trace: list[CallRecord] | None = None,
    usage: dict[str, int] | None = None,
) -> ScoreOutput:
    """Score the difference report against the criteria; retries once on bad format."""
    config = config or RunConfig()
    llm = _LLM(config, backend, cache, templates or load_templates(config.templates_dir))
    bindings = {
        "problem_statement": problem_block(problem),
        "differences": differences,
        "criteria": criteria.render_text(),
    }
    output = llm.call("score", "scoring", bindings)
    try:
        result = parse_score_output(output)
    except UnparseableScore:
        if diagnostics is not None:
            diagnostics.append({"kind": "score_retry", "raw": output[:500]})
        output = llm.call("score", "scoring", bindings, extra=REFORMAT_INSTRUCTION)
        result = parse_score_output(output)  # second failure propagates
    if trace is not None:
        trace.extend(llm.trace)
    if usage is not None:
        for key in llm.usage:
            usage[key] = usage.get(key, 0) + llm.usage[key]
    return result


def evaluate_pair(
    pair: CodePair,
    config: RunConfig | None = None,
    backend: Backend | None = None,
    cache: ResponseCache | None = None,
    templates=None,
    criteria: EvaluationCriteria | None = None,
) -> EvaluationResult:
    """Run the whole framework on one pair: comprehension, comparison, scoring."""
    if backend is None:
        raise ValueError("a backend is required")
    config = config or RunConfig()
    templates = templates or load_templates(config.templates_dir)
    criteria = criteria or load_criteria(config)
    diagnostics: list[dict] = []

    stripped_reference = strip_comments(pair.reference_code)
    try:
        if not parse_source(stripped_reference).body:
            raise ReferenceInvalid(f"pair {pair.id}: reference code has no statements")
    except SyntaxError as exc:
        raise ReferenceInvalid(f"pair {pair.id}: reference code does not parse: {exc}") from exc

    stripped_generated = strip_comments(pair.generated_code)
    generated_parses = True
    try:
        generated_parses = bool(parse_source(stripped_generated).body)
    except SyntaxError:
        generated_parses = False
    if not generated_parses:
        diagnostics.append({"kind": "unparseable_generated", "pair": pair.id})
        return EvaluationResult(
            score=0,
            explanation="unparseable generated code",
            differences="",
            reference_semantic=None,
            generated_semantic=None,
            diagnostics=diagnostics,
        )

    policy = config.policy
    if not pair.problem_statement.strip() and policy is not ProblemStatementPolicy.LACK:
        diagnostics.append(
            {"kind": "policy_downgraded", "from": policy.value, "to": "lack", "reason": "empty problem statement"}
        )
        policy = ProblemStatementPolicy.LACK

    reference_semantic = get_semantic(
        stripped_reference, pair.problem_statement, policy, config, backend, cache, templates, diagnostics
    )
    generated_semantic = get_semantic(
        stripped_generated, pair.problem_statement, policy, config, backend, cache, templates, diagnostics
    )

    comparison_trace: list[CallRecord] = []
    usage = {"prompt_tokens": 0, "completion_tokens": 0}
    if config.single_call_scoring:
        differences = (
            "(no separate comparison pass; judge from the two behavior descriptions below)\n"
            f"Reference code behavior:\n{reference_semantic.text}\n\n"
            f"Evaluated code behavior:\n{generated_semantic.text}"
        )
    else:
        differences = compare_semantics(
            reference_semantic, generated_semantic, backend, config, cache, templates,
            comparison_trace, usage,
        )
    score_output = score(
        differences,
        pair.problem_statement,
        criteria,
        backend,
        config,
        cache,
        templates,
        diagnostics,
        comparison_trace,
        usage,
    )

    for part in (reference_semantic.usage, generated_semantic.usage):
        for key in usage:
            usage[key] += part.get(key, 0)

    return EvaluationResult(
        score=score_output.score,
        explanation=score_output.explanation,
        differences=differences,
        reference_semantic=reference_semantic,
        generated_semantic=generated_semantic,
        diagnostics=diagnostics,
        comparison_trace=comparison_trace,
        usage=usage,
    )
