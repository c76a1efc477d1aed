"""Static scope analysis of a code fragment.

Answers three questions about a fragment in isolation: which external names
it reads before defining them itself, which names it defines or mutates, and
whether it consumes program input.  The read-before-write analysis is
conservative: a name read in any branch before being bound on that branch
counts as external (over-reporting a dependency only adds context downstream,
under-reporting loses it).
"""

from __future__ import annotations

import ast
import textwrap
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .decomposer import SubCode


class NameKind(Enum):
    VARIABLE = "Variable"
    FUNCTION = "Function"
    CLASS = "Class"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class DependenceName:
    name: str
    kind: NameKind = NameKind.UNKNOWN

    def __str__(self) -> str:
        return self.name


@dataclass
class DependencyReport:
    external: list[DependenceName]
    defined: list[DependenceName]
    has_input: bool

    @property
    def external_names(self) -> list[str]:
        return [d.name for d in self.external]

    @property
    def defined_names(self) -> list[str]:
        return [d.name for d in self.defined]


def load_name_list(path: str | Path) -> frozenset[str]:
    """Read a plain-text config list: one identifier per line, # comments allowed."""
    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            names.append(entry)
    return frozenset(names)


def _packaged_list(filename: str) -> frozenset[str]:
    text = resources.files("semscore").joinpath("data", filename).read_text(encoding="utf-8")
    return frozenset(
        e for e in (line.split("#", 1)[0].strip() for line in text.splitlines()) if e
    )


_BUILTINS: frozenset[str] | None = None
_INPUT_SOURCES: frozenset[str] | None = None


def default_builtins() -> frozenset[str]:
    global _BUILTINS
    if _BUILTINS is None:
        _BUILTINS = _packaged_list("builtins.txt")
    return _BUILTINS


def default_input_sources() -> frozenset[str]:
    global _INPUT_SOURCES
    if _INPUT_SOURCES is None:
        _INPUT_SOURCES = _packaged_list("input_sources.txt")
    return _INPUT_SOURCES


# ---------------------------------------------------------------------------
# scope-chain analyzer
# ---------------------------------------------------------------------------

class _Scope:
    """A variable namespace; branch copies share the parent chain."""

    __slots__ = ("bound", "parent", "is_fragment")

    def __init__(self, parent: "_Scope | None" = None, is_fragment: bool = False):
        self.bound: set[str] = set()
        self.parent = parent
        self.is_fragment = is_fragment  # binds here count as fragment definitions

    def is_bound(self, name: str) -> bool:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.bound:
                return True
            scope = scope.parent
        return False

    def branch(self) -> "_Scope":
        copy = _Scope(self.parent, self.is_fragment)
        copy.bound = set(self.bound)
        return copy


class _Analyzer:
    def __init__(self, builtins: frozenset[str]):
        self.builtins = builtins
        self.external: dict[str, DependenceName] = {}
        self.defined: dict[str, DependenceName] = {}

    # -- events -------------------------------------------------------------

    def read(self, name: str, scope: _Scope) -> None:
        if name in self.builtins or scope.is_bound(name):
            return
        self.external.setdefault(name, DependenceName(name, NameKind.UNKNOWN))

    def define(self, name: str, kind: NameKind, scope: _Scope) -> None:
        scope.bound.add(name)
        if scope.is_fragment:
            self.defined.setdefault(name, DependenceName(name, kind))

    def mutate(self, name: str, scope: _Scope) -> None:
        # In-place mutation of an existing object: recorded as a definition
        # (the store must refresh it) but does not bind the name.
        if name in self.builtins:
            return
        if scope.is_fragment:
            self.defined.setdefault(name, DependenceName(name, NameKind.VARIABLE))

    def declare_outer(self, name: str, scope: _Scope) -> None:
        # global/nonlocal: the name lives outside the fragment and the
        # fragment (re)binds it -- treat as both external and defined.
        if name not in self.builtins:
            self.external.setdefault(name, DependenceName(name, NameKind.UNKNOWN))
            self.defined.setdefault(name, DependenceName(name, NameKind.VARIABLE))
        scope.bound.add(name)

    # -- statements ----------------------------------------------------------

    def visit_stmts(self, stmts: list[ast.stmt], scope: _Scope) -> None:
        for stmt in stmts:
            self.visit_stmt(stmt, scope)

    def visit_stmt(self, stmt: ast.stmt, scope: _Scope) -> None:
        if isinstance(stmt, ast.Assign):
            self.visit_expr(stmt.value, scope)
            for target in stmt.targets:
                self.bind_target(target, scope)
        elif isinstance(stmt, ast.AugAssign):
            self.visit_expr(stmt.value, scope)
            if isinstance(stmt.target, ast.Name):
                self.read(stmt.target.id, scope)  # x += 1 reads x first
            else:
                self.visit_expr_children(stmt.target, scope)
            self.bind_target(stmt.target, scope)
        elif isinstance(stmt, ast.AnnAssign):
            self.visit_expr(stmt.annotation, scope)
            if stmt.value is not None:
                self.visit_expr(stmt.value, scope)
                self.bind_target(stmt.target, scope)
            elif not isinstance(stmt.target, ast.Name):
                self.visit_expr_children(stmt.target, scope)
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            self.visit_expr(stmt.iter, scope)
            self.bind_target(stmt.target, scope, record=False)
            self.visit_stmts(stmt.body, scope.branch())  # body may run zero times
            self.visit_stmts(stmt.orelse, scope)
        elif isinstance(stmt, ast.While):
            self.visit_expr(stmt.test, scope)
            self.visit_stmts(stmt.body, scope.branch())
            self.visit_stmts(stmt.orelse, scope)
        elif isinstance(stmt, ast.If):
            self.visit_expr(stmt.test, scope)
            body_scope = scope.branch()
            else_scope = scope.branch()
            self.visit_stmts(stmt.body, body_scope)
            self.visit_stmts(stmt.orelse, else_scope)
            # Only names bound on both paths are definitely bound afterwards.
            scope.bound |= body_scope.bound & else_scope.bound
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            for dec in stmt.decorator_list:
                self.visit_expr(dec, scope)
            self.visit_arguments_defaults(stmt.args, scope)
            self.define(stmt.name, NameKind.FUNCTION, scope)
            inner = _Scope(parent=scope)
            self.bind_arguments(stmt.args, inner)
            self.visit_stmts(stmt.body, inner)
        elif isinstance(stmt, ast.ClassDef):
            for dec in stmt.decorator_list:
                self.visit_expr(dec, scope)
            for base in stmt.bases:
                self.visit_expr(base, scope)
            for kw in stmt.keywords:
                self.visit_expr(kw.value, scope)
            self.define(stmt.name, NameKind.CLASS, scope)
            self.visit_stmts(stmt.body, _Scope(parent=scope))
        elif isinstance(stmt, ast.Try):
            pre = scope.branch()
            self.visit_stmts(stmt.body, scope.branch())
            for handler in stmt.handlers:
                handler_scope = pre.branch()
                if handler.type is not None:
                    self.visit_expr(handler.type, handler_scope)
                if handler.name:
                    handler_scope.bound.add(handler.name)
                self.visit_stmts(handler.body, handler_scope)
            self.visit_stmts(stmt.orelse, scope.branch())
            self.visit_stmts(stmt.finalbody, scope)
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                self.visit_expr(item.context_expr, scope)
                if item.optional_vars is not None:
                    self.bind_target(item.optional_vars, scope, record=False)
            self.visit_stmts(stmt.body, scope)
        elif isinstance(stmt, ast.Match):
            self.visit_expr(stmt.subject, scope)
            for case in stmt.cases:
                case_scope = scope.branch()
                for name in _pattern_names(case.pattern):
                    case_scope.bound.add(name)
                self.visit_pattern_reads(case.pattern, case_scope)
                if case.guard is not None:
                    self.visit_expr(case.guard, case_scope)
                self.visit_stmts(case.body, case_scope)
        elif isinstance(stmt, (ast.Import, ast.ImportFrom)):
            for alias in stmt.names:
                if alias.name == "*":
                    continue
                bound = alias.asname or alias.name.split(".")[0]
                self.define(bound, NameKind.UNKNOWN, scope)
        elif isinstance(stmt, (ast.Global, ast.Nonlocal)):
            for name in stmt.names:
                self.declare_outer(name, scope)
        elif isinstance(stmt, ast.Delete):
            for target in stmt.targets:
                self.visit_expr(target, scope)
        elif isinstance(stmt, (ast.Return, ast.Expr)):
            if stmt.value is not None:
                self.visit_expr(stmt.value, scope)
        elif isinstance(stmt, (ast.Raise, ast.Assert)):
            for child in ast.iter_child_nodes(stmt):
                if isinstance(child, ast.expr):
                    self.visit_expr(child, scope)
        # pass/break/continue: nothing to do

    def bind_target(self, target: ast.expr, scope: _Scope, record: bool = True) -> None:
        if isinstance(target, ast.Name):
            if record:
                self.define(target.id, NameKind.VARIABLE, scope)
            else:
                scope.bound.add(target.id)
        elif isinstance(target, (ast.Tuple, ast.List)):
            for element in target.elts:
                self.bind_target(element, scope, record)
        elif isinstance(target, ast.Starred):
            self.bind_target(target.value, scope, record)
        elif isinstance(target, (ast.Subscript, ast.Attribute)):
            # a[i] = x / a.f = x reads a (and the index) and mutates it.
            self.visit_expr(target.value, scope)
            if isinstance(target, ast.Subscript):
                self.visit_expr(target.slice, scope)
            base = target.value
            if isinstance(base, ast.Name):
                self.mutate(base.id, scope)

    # -- expressions ----------------------------------------------------------

    def visit_expr(self, expr: ast.expr, scope: _Scope) -> None:
        if isinstance(expr, ast.Name):
            if isinstance(expr.ctx, ast.Load):
                self.read(expr.id, scope)
            return
        if isinstance(expr, ast.Lambda):
            self.visit_arguments_defaults(expr.args, scope)
            inner = _Scope(parent=scope)
            self.bind_arguments(expr.args, inner)
            self.visit_expr(expr.body, inner)
            return
        if isinstance(expr, (ast.ListComp, ast.SetComp, ast.DictComp, ast.GeneratorExp)):
            inner = _Scope(parent=scope)
            for index, gen in enumerate(expr.generators):
                # the first iterable is evaluated in the enclosing scope
                self.visit_expr(gen.iter, scope if index == 0 else inner)
                self.bind_target(gen.target, inner, record=False)
                for cond in gen.ifs:
                    self.visit_expr(cond, inner)
            if isinstance(expr, ast.DictComp):
                self.visit_expr(expr.key, inner)
                self.visit_expr(expr.value, inner)
            else:
                self.visit_expr(expr.elt, inner)
            return
        if isinstance(expr, ast.NamedExpr):
            self.visit_expr(expr.value, scope)
            self.bind_target(expr.target, scope)
            return
        if isinstance(expr, ast.Call):
            self.visit_expr(expr.func, scope)
            for arg in expr.args:
                self.visit_expr(arg, scope)
            for kw in expr.keywords:
                self.visit_expr(kw.value, scope)
            func = expr.func
            if isinstance(func, ast.Attribute) and isinstance(func.value, ast.Name):
                self.mutate(func.value.id, scope)  # a.append(x): a is updated in place
            return
        self.visit_expr_children(expr, scope)

    def visit_expr_children(self, expr: ast.expr, scope: _Scope) -> None:
        for child in ast.iter_child_nodes(expr):
            if isinstance(child, ast.expr):
                self.visit_expr(child, scope)

    def visit_arguments_defaults(self, args: ast.arguments, scope: _Scope) -> None:
        for default in list(args.defaults) + [d for d in args.kw_defaults if d is not None]:
            self.visit_expr(default, scope)
        for arg in args.posonlyargs + args.args + args.kwonlyargs:
            if arg.annotation is not None:
                self.visit_expr(arg.annotation, scope)

    def bind_arguments(self, args: ast.arguments, scope: _Scope) -> None:
        for arg in args.posonlyargs + args.args + args.kwonlyargs:
            scope.bound.add(arg.arg)
        if args.vararg is not None:
            scope.bound.add(args.vararg.arg)
        if args.kwarg is not None:
            scope.bound.add(args.kwarg.arg)

    def visit_pattern_reads(self, pattern: ast.pattern, scope: _Scope) -> None:
        for node in ast.walk(pattern):
            if isinstance(node, ast.expr):
                self.visit_expr(node, scope)


def _pattern_names(pattern: ast.pattern) -> list[str]:
    names = []
    for node in ast.walk(pattern):
        if isinstance(node, ast.MatchAs) and node.name:
            names.append(node.name)
        elif isinstance(node, ast.MatchStar) and node.name:
            names.append(node.name)
        elif isinstance(node, ast.MatchMapping) and node.rest:
            names.append(node.rest)
    return names


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def _fragment_text(fragment: "SubCode | str") -> str:
    text = fragment if isinstance(fragment, str) else fragment.dedented_text
    return textwrap.dedent(text)


def analyze_dependencies(
    fragment: "SubCode | str",
    builtins: frozenset[str] | None = None,
    input_sources: frozenset[str] | None = None,
) -> DependencyReport:
    """Full report: external reads, definitions/mutations, input usage."""
    text = _fragment_text(fragment)
    module = ast.parse(text)
    analyzer = _Analyzer(builtins if builtins is not None else default_builtins())
    analyzer.visit_stmts(module.body, _Scope(is_fragment=True))
    return DependencyReport(
        external=list(analyzer.external.values()),
        defined=list(analyzer.defined.values()),
        has_input=_contains_input(module, input_sources or default_input_sources()),
    )


def external_dependencies(
    fragment: "SubCode | str", builtins: frozenset[str] | None = None
) -> list[DependenceName]:
    """Names read somewhere in the fragment before the fragment binds them."""
    return analyze_dependencies(fragment, builtins=builtins).external


def defined_names(
    fragment: "SubCode | str", builtins: frozenset[str] | None = None
) -> list[DependenceName]:
    """Names the fragment binds or mutates in its own namespace."""
    return analyze_dependencies(fragment, builtins=builtins).defined


def has_input_statement(
    fragment: "SubCode | str", input_sources: frozenset[str] | None = None
) -> bool:
    """True if the fragment reads program input (console, stdin, argv)."""
    module = ast.parse(_fragment_text(fragment))
    return _contains_input(module, input_sources or default_input_sources())


def _dotted_name(expr: ast.expr) -> str | None:
    if isinstance(expr, ast.Name):
        return expr.id
    if isinstance(expr, ast.Attribute):
        base = _dotted_name(expr.value)
        return f"{base}.{expr.attr}" if base else None
    return None


def _contains_input(module: ast.Module, sources: frozenset[str]) -> bool:
    def matches(dotted: str | None) -> bool:
        if dotted is None:
            return False
        return any(dotted == s or dotted.startswith(s + ".") for s in sources)

    for node in ast.walk(module):
        if isinstance(node, ast.Call) and matches(_dotted_name(node.func)):
            return True
        if isinstance(node, (ast.Name, ast.Attribute)) and matches(_dotted_name(node)):
            return True
    return False
