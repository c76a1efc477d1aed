"""Recursive decomposition of Python source into analyzable sub-codes.

A program is split along eight statement kinds (for, while, assignment, if,
class and function definitions, match, standalone calls).  Fragments whose
nesting depth of those kinds reaches a threshold are split again until every
leaf is shallow enough to be understood in isolation.
"""

from __future__ import annotations

import ast
import hashlib
import io
import textwrap
import tokenize
from dataclasses import dataclass, field
from enum import Enum


class PredefinedKind(Enum):
    """The eight statement kinds that delimit sub-codes and count toward depth."""

    FOR = "For"
    WHILE = "While"
    ASSIGN = "Assign"
    IF = "If"
    CLASS_DEF = "ClassDef"
    FUNCTION_DEF = "FunctionDef"
    SWITCH = "Switch"
    CALL = "Call"


def kind_of(stmt: ast.stmt) -> PredefinedKind | None:
    """Map a statement to its predefined kind, or None for everything else.

    A call counts only as a standalone expression statement; calls embedded
    inside other expressions would otherwise add depth to nearly every line.
    """
    if isinstance(stmt, (ast.For, ast.AsyncFor)):
        return PredefinedKind.FOR
    if isinstance(stmt, ast.While):
        return PredefinedKind.WHILE
    if isinstance(stmt, (ast.Assign, ast.AugAssign, ast.AnnAssign)):
        return PredefinedKind.ASSIGN
    if isinstance(stmt, ast.If):
        return PredefinedKind.IF
    if isinstance(stmt, ast.ClassDef):
        return PredefinedKind.CLASS_DEF
    if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
        return PredefinedKind.FUNCTION_DEF
    if isinstance(stmt, ast.Match):
        return PredefinedKind.SWITCH
    if isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call):
        return PredefinedKind.CALL
    return None


def statement_blocks(stmt: ast.stmt) -> list[list[ast.stmt]]:
    """Nested statement lists of a compound statement, in source order."""
    blocks: list[list[ast.stmt]] = []
    if isinstance(stmt, (ast.For, ast.AsyncFor, ast.While, ast.If)):
        blocks = [stmt.body, stmt.orelse]
    elif isinstance(stmt, ast.Try):
        blocks = [stmt.body] + [h.body for h in stmt.handlers] + [stmt.orelse, stmt.finalbody]
    elif isinstance(stmt, (ast.With, ast.AsyncWith)):
        blocks = [stmt.body]
    elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        blocks = [stmt.body]
    elif isinstance(stmt, ast.Match):
        blocks = [case.body for case in stmt.cases]
    return [b for b in blocks if b]


@dataclass
class SubCode:
    """One fragment of the decomposition: a span of the comment-stripped source."""

    id: str
    kind: PredefinedKind | None  # None: residual group, or the whole-unit root
    span: tuple[int, int]  # 1-based line range, end-exclusive
    text: str  # verbatim slice
    depth: int
    children: list["SubCode"] = field(default_factory=list)
    parent: str | None = None
    forced_leaf: bool = False  # at/above threshold but irreducible

    @property
    def kind_name(self) -> str:
        return self.kind.value if self.kind is not None else "Residual"

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def dedented_text(self) -> str:
        """Fragment re-indented to column 0, as shown to the model."""
        return textwrap.dedent(self.text)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind_name,
            "depth": self.depth,
            "span": list(self.span),
            "forced_leaf": self.forced_leaf,
            "children": [c.to_dict() for c in self.children],
        }


@dataclass
class DecompositionTree:
    root: SubCode
    threshold: int
    source_hash: str

    def nodes(self) -> list[SubCode]:
        return list(self.root.walk())

    def leaves(self) -> list[SubCode]:
        return [n for n in self.root.walk() if n.is_leaf]

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "source_hash": self.source_hash,
            "root": self.root.to_dict(),
        }

    def render_text(self) -> str:
        out: list[str] = []

        def emit(node: SubCode, indent: int) -> None:
            flag = " [forced leaf]" if node.forced_leaf else ""
            out.append(
                "  " * indent
                + f"{node.id}: {node.kind_name} lines {node.span[0]}..{node.span[1] - 1}"
                + f" depth {node.depth}{flag}"
            )
            for child in node.children:
                emit(child, indent + 1)

        emit(self.root, 0)
        return "\n".join(out)


# ---------------------------------------------------------------------------
# comment stripping
# ---------------------------------------------------------------------------

def strip_comments(source: str) -> str:
    """Remove comments and docstring-only statements, keeping line numbers stable.

    Comment-only lines become blank lines.  A docstring that is the sole
    statement of its block is replaced by ``pass`` so the result still parses.
    Input that does not parse is returned unchanged.
    """
    try:
        return _strip_comments(source)
    except (SyntaxError, ValueError, tokenize.TokenError):
        return source


def _strip_comments(source: str) -> str:
    text = source.replace("\r\n", "\n").replace("\r", "\n")
    tree = ast.parse(text)
    lines = text.split("\n")
    modified: set[int] = set()

    def blank(row: int, col_start: int, col_end: int) -> None:
        line = lines[row]
        lines[row] = line[:col_start] + " " * (col_end - col_start) + line[col_end:]
        modified.add(row)

    for tok in tokenize.generate_tokens(io.StringIO(text).readline):
        if tok.type == tokenize.COMMENT:
            blank(tok.start[0] - 1, tok.start[1], tok.end[1])

    for node, sole in _docstring_statements(tree):
        first, last = node.lineno - 1, node.end_lineno - 1
        if lines[first][: node.col_offset].strip() or lines[last][node.end_col_offset :].strip():
            continue  # shares a line with other tokens; leave it alone
        if first == last:
            blank(first, node.col_offset, node.end_col_offset)
        else:
            blank(first, node.col_offset, len(lines[first]))
            for row in range(first + 1, last):
                blank(row, 0, len(lines[row]))
            blank(last, 0, node.end_col_offset)
        if sole:
            lines[first] = " " * node.col_offset + "pass"
            modified.add(first)

    for row in modified:
        lines[row] = lines[row].rstrip()
    return "\n".join(lines)


def _docstring_statements(tree: ast.Module) -> list[tuple[ast.Expr, bool]]:
    """Bare string-literal statements anywhere in the tree, with a sole-statement flag."""
    found: list[tuple[ast.Expr, bool]] = []

    def scan(body: list[ast.stmt]) -> None:
        for stmt in body:
            if (
                isinstance(stmt, ast.Expr)
                and isinstance(stmt.value, ast.Constant)
                and isinstance(stmt.value.value, str)
            ):
                found.append((stmt, len(body) == 1))
            for block in statement_blocks(stmt):
                scan(block)

    scan(tree.body)
    return found


# ---------------------------------------------------------------------------
# parsing and depth
# ---------------------------------------------------------------------------

def parse_source(source: str) -> ast.Module:
    """Parse source text; raises SyntaxError (with line and message) on bad input."""
    return ast.parse(source)


def compute_depth(fragment: str | ast.AST) -> int:
    """Maximum count of predefined-kind statements along any nesting path."""
    if isinstance(fragment, str):
        stmts = parse_source(textwrap.dedent(fragment)).body
    elif isinstance(fragment, ast.Module):
        stmts = fragment.body
    elif isinstance(fragment, ast.stmt):
        stmts = [fragment]
    else:
        raise TypeError(f"cannot compute depth of {type(fragment).__name__}")
    return _depth_of_stmts(stmts)


def _depth_of_stmts(stmts: list[ast.stmt]) -> int:
    return max((_depth_of_stmt(s) for s in stmts), default=0)


def _depth_of_stmt(stmt: ast.stmt) -> int:
    own = 1 if kind_of(stmt) is not None else 0
    inner = max((_depth_of_stmts(b) for b in statement_blocks(stmt)), default=0)
    return own + inner


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

def _stmt_lines(stmt: ast.stmt) -> tuple[int, int]:
    """Inclusive 1-based first/last line of a statement, decorators included."""
    start = stmt.lineno
    if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        for dec in stmt.decorator_list:
            start = min(start, dec.lineno)
    return start, stmt.end_lineno


@dataclass
class _Unit:
    kind: PredefinedKind | None
    stmts: list[ast.stmt]

    @property
    def span(self) -> tuple[int, int]:
        first, _ = _stmt_lines(self.stmts[0])
        _, last = _stmt_lines(self.stmts[-1])
        return first, last + 1


def _line_groups(stmts: list[ast.stmt]) -> list[list[ast.stmt]]:
    """Group consecutive statements that share source lines (``a = 1; b = 2``)."""
    groups: list[list[ast.stmt]] = []
    end = -1
    for stmt in stmts:
        first, last = _stmt_lines(stmt)
        if groups and first <= end:
            groups[-1].append(stmt)
        else:
            groups.append([stmt])
        end = max(end, last)
    return groups


def _split_units(stmts: list[ast.stmt]) -> list[_Unit]:
    """One unit per predefined statement; contiguous leftovers become residuals."""
    units: list[_Unit] = []
    for group in _line_groups(stmts):
        kind = kind_of(group[0]) if len(group) == 1 else None
        if kind is not None:
            units.append(_Unit(kind, group))
        elif units and units[-1].kind is None:
            units[-1].stmts.extend(group)
        else:
            units.append(_Unit(None, group))
    return units


def _slice_text(lines: list[str], span: tuple[int, int]) -> str:
    return "\n".join(lines[span[0] - 1 : span[1] - 1])


def _is_elif(stmt: ast.stmt, lines: list[str]) -> bool:
    if not isinstance(stmt, ast.If) or stmt.lineno > len(lines):
        return False
    return lines[stmt.lineno - 1][stmt.col_offset :].startswith("elif")


def _descend_blocks(stmt: ast.stmt, lines: list[str]) -> list[list[ast.stmt]]:
    """Blocks to recurse into; an elif chain is flattened into its branch bodies.

    An ``elif`` branch is an If node nested in orelse, but its source slice
    would start with the keyword ``elif`` and not parse standalone, so the
    chain's bodies become sibling blocks instead.
    """
    if isinstance(stmt, ast.If):
        blocks = [stmt.body]
        orelse = stmt.orelse
        while len(orelse) == 1 and _is_elif(orelse[0], lines):
            branch = orelse[0]
            blocks.append(branch.body)
            orelse = branch.orelse
        blocks.append(orelse)
        return [b for b in blocks if b]
    return statement_blocks(stmt)


def decompose(source: str) -> list[SubCode]:
    """Single-level decomposition of a fragment into its top-level sub-codes."""
    text = textwrap.dedent(source)
    module = parse_source(text)
    lines = text.split("\n")
    subcodes = []
    for i, unit in enumerate(_split_units(module.body), start=1):
        subcodes.append(
            SubCode(
                id=str(i),
                kind=unit.kind,
                span=unit.span,
                text=_slice_text(lines, unit.span),
                depth=_depth_of_stmts(unit.stmts),
            )
        )
    return subcodes


def build_decomposition_tree(source: str, threshold: int) -> DecompositionTree:
    """Recursively decompose until every leaf has depth below the threshold.

    Fragments at or above the threshold that cannot be split further (a single
    irreducible statement) become leaves with ``forced_leaf`` set.
    """
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    stripped = strip_comments(source)
    module = parse_source(stripped)
    lines = stripped.split("\n")

    def make(unit: _Unit, node_id: str, parent: str) -> SubCode:
        node = SubCode(
            id=node_id,
            kind=unit.kind,
            span=unit.span,
            text=_slice_text(lines, unit.span),
            depth=_depth_of_stmts(unit.stmts),
            parent=parent,
        )
        expand(node, unit.stmts)
        return node

    def expand(node: SubCode, stmts: list[ast.stmt]) -> None:
        if node.depth < threshold:
            return
        units = _split_units(stmts)
        if len(units) == 1 and len(units[0].stmts) == len(stmts):
            if len(stmts) == 1 and statement_blocks(stmts[0]):
                # A single compound statement: descend into its blocks.
                units = [u for block in _descend_blocks(stmts[0], lines) for u in _split_units(block)]
            elif len(stmts) > 1:
                # A deep residual run: fall back to one unit per statement.
                groups = _line_groups(stmts)
                if len(groups) < 2:
                    node.forced_leaf = True
                    return
                units = [_Unit(kind_of(g[0]) if len(g) == 1 else None, g) for g in groups]
            else:
                node.forced_leaf = True
                return
        node.children = [
            make(unit, f"{node.id}.{i}", node.id) for i, unit in enumerate(units, start=1)
        ]

    root = SubCode(
        id="root",
        kind=None,
        span=(1, len(lines) + 1),
        text=stripped,
        depth=_depth_of_stmts(module.body),
        parent=None,
    )
    # The whole unit is always decomposed one level; recursion below is
    # threshold-gated per sub-code.
    root.children = [
        make(unit, str(i), "root") for i, unit in enumerate(_split_units(module.body), start=1)
    ]
    digest = hashlib.sha256(stripped.encode("utf-8")).hexdigest()
    return DecompositionTree(root=root, threshold=threshold, source_hash=digest)
