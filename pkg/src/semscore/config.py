"""Run configuration, dataset record type, and problem-statement policy."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from enum import Enum


class ProblemStatementPolicy(Enum):
    """How much of the problem statement reaches the comprehension prompts.

    FULL: every comprehension-phase prompt carries it as background.
    INITIAL: only leaf prompts for fragments that read program input.
    LACK: never.
    """

    FULL = "full"
    INITIAL = "initial"
    LACK = "lack"


@dataclass
class CodePair:
    """One dataset record: a problem, its reference solution, and a candidate."""

    id: str
    problem_statement: str
    reference_code: str
    generated_code: str
    expert_score: float | None = None
    source_tag: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunConfig:
    """Everything a run needs; the pipeline itself is free of randomness."""

    threshold: int = 3
    temperature: float = 0.2
    policy: ProblemStatementPolicy = ProblemStatementPolicy.INITIAL
    model: str = "gpt-3.5-turbo"
    backend: str = "mock"  # mock | http
    endpoint: str = ""
    api_key_env: str = "SEMSCORE_API_KEY"
    mock_script: str | None = None
    criteria_path: str | None = None
    templates_dir: str | None = None
    cache_dir: str | None = None
    trace_dir: str | None = None
    parallelism: int = 4
    max_tokens: int | None = None
    single_call_scoring: bool = False
    builtins_path: str | None = None
    input_sources_path: str | None = None
    max_in_flight: int = 4
    requests_per_minute: float | None = None

    def __post_init__(self) -> None:
        if isinstance(self.policy, str):
            self.policy = ProblemStatementPolicy(self.policy.lower())
        if self.threshold < 1 or self.threshold > 10:
            raise ValueError(f"threshold must be in 1..10, got {self.threshold}")
        if self.parallelism < 1:
            raise ValueError("parallelism must be positive")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["policy"] = self.policy.value
        return data

    def builtins(self):
        from .dependency import default_builtins, load_name_list

        if self.builtins_path:
            return default_builtins() | load_name_list(self.builtins_path)
        return default_builtins()

    def input_sources(self):
        from .dependency import default_input_sources, load_name_list

        if self.input_sources_path:
            return load_name_list(self.input_sources_path)
        return default_input_sources()
