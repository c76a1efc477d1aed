"""Independent brute-force oracles the implementation is checked against.

Each oracle recomputes a quantity with a deliberately different structure
than the library code (generic tree walks, per-name scans, explicit pair
enumeration, full DP tables) so agreement is meaningful.
"""

from __future__ import annotations

import ast
import math
import textwrap
from collections import Counter

# ---------------------------------------------------------------------------
# depth: generic walk over every AST node, counting flagged nodes per path
# ---------------------------------------------------------------------------

_PREDEFINED_TYPES = (
    ast.For,
    ast.AsyncFor,
    ast.While,
    ast.If,
    ast.Match,
    ast.ClassDef,
    ast.FunctionDef,
    ast.AsyncFunctionDef,
    ast.Assign,
    ast.AugAssign,
    ast.AnnAssign,
)


def _flagged(node: ast.AST) -> bool:
    if isinstance(node, _PREDEFINED_TYPES):
        return True
    return isinstance(node, ast.Expr) and isinstance(node.value, ast.Call)


def depth_oracle(source: str) -> int:
    tree = ast.parse(textwrap.dedent(source))

    def walk(node: ast.AST) -> int:
        best = 0
        for child in ast.iter_child_nodes(node):
            best = max(best, walk(child))
        return best + (1 if _flagged(node) else 0)

    return walk(tree)


# ---------------------------------------------------------------------------
# decomposition partition: simple-statement line spans
# ---------------------------------------------------------------------------

def _blocks(stmt: ast.stmt) -> list[list[ast.stmt]]:
    if isinstance(stmt, (ast.For, ast.AsyncFor, ast.While, ast.If)):
        return [b for b in (stmt.body, stmt.orelse) if b]
    if isinstance(stmt, ast.Try):
        blocks = [stmt.body] + [h.body for h in stmt.handlers] + [stmt.orelse, stmt.finalbody]
        return [b for b in blocks if b]
    if isinstance(stmt, (ast.With, ast.AsyncWith, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        return [stmt.body]
    if isinstance(stmt, ast.Match):
        return [case.body for case in stmt.cases]
    return []


def simple_statement_spans(source: str) -> list[tuple[int, int]]:
    """Inclusive line spans of every non-compound statement."""
    spans: list[tuple[int, int]] = []

    def visit(stmts: list[ast.stmt]) -> None:
        for stmt in stmts:
            inner = _blocks(stmt)
            if inner:
                for block in inner:
                    visit(block)
            else:
                spans.append((stmt.lineno, stmt.end_lineno))

    visit(ast.parse(source).body)
    return spans


def check_leaf_partition(tree) -> list[str]:
    """Problems with the leaf-span partition of a decomposition tree ([] = ok)."""
    problems: list[str] = []
    leaves = sorted(tree.leaves(), key=lambda n: n.span)
    for before, after in zip(leaves, leaves[1:]):
        if after.span[0] < before.span[1]:
            problems.append(f"overlapping leaves {before.id} and {after.id}")
    for start, end in simple_statement_spans(tree.root.text):
        owners = [n for n in leaves if n.span[0] <= start and end < n.span[1]]
        if len(owners) != 1:
            problems.append(f"statement lines {start}..{end} covered by {len(owners)} leaves")
    return problems


# ---------------------------------------------------------------------------
# comment stripping: tree equality modulo docstrings and pass statements
# ---------------------------------------------------------------------------

def _strippable_docstring(stmt: ast.stmt, lines: list[str]) -> bool:
    if not (
        isinstance(stmt, ast.Expr)
        and isinstance(stmt.value, ast.Constant)
        and isinstance(stmt.value.value, str)
    ):
        return False
    first = lines[stmt.lineno - 1]
    last = lines[stmt.end_lineno - 1]
    return not first[: stmt.col_offset].strip() and not last[stmt.end_col_offset :].strip()


def normalized_dump(source: str) -> str:
    """ast.dump with own-line docstrings and Pass statements removed."""
    lines = source.split("\n")
    tree = ast.parse(source)

    def clean(stmts: list[ast.stmt]) -> list[ast.stmt]:
        kept = []
        for stmt in stmts:
            if isinstance(stmt, ast.Pass) or _strippable_docstring(stmt, lines):
                continue
            for field in ("body", "orelse", "finalbody"):
                if hasattr(stmt, field) and isinstance(getattr(stmt, field), list):
                    setattr(stmt, field, clean(getattr(stmt, field)))
            if hasattr(stmt, "handlers"):
                for handler in stmt.handlers:
                    handler.body = clean(handler.body)
            if isinstance(stmt, ast.Match):
                for case in stmt.cases:
                    case.body = clean(case.body)
            kept.append(stmt)
        return kept

    tree.body = clean(tree.body)
    return ast.dump(tree)


# ---------------------------------------------------------------------------
# dependencies: per-name scans
# ---------------------------------------------------------------------------

def _reads(node: ast.AST | None, name: str) -> bool:
    if node is None:
        return False
    for sub in ast.walk(node):
        if isinstance(sub, ast.Name) and sub.id == name and isinstance(sub.ctx, ast.Load):
            return True
    return False


def _name_is_external(stmts: list[ast.stmt], name: str, bound: bool) -> tuple[bool, bool]:
    """(read-before-bound anywhere on some path, bound after this block)."""
    external = False

    def see(node: ast.AST | None) -> None:
        nonlocal external
        if not bound_flag[0] and _reads(node, name):
            external = True

    bound_flag = [bound]
    for stmt in stmts:
        if isinstance(stmt, ast.Assign):
            see(stmt.value)
            for target in stmt.targets:
                for sub in ast.walk(target):
                    if isinstance(sub, (ast.Subscript, ast.Attribute)):
                        see(sub.value)
                        if isinstance(sub, ast.Subscript):
                            see(sub.slice)
                for sub in ast.walk(target):
                    if isinstance(sub, ast.Name) and sub.id == name and isinstance(sub.ctx, ast.Store):
                        bound_flag[0] = True
        elif isinstance(stmt, ast.AugAssign):
            see(stmt.value)
            see(stmt.target if not isinstance(stmt.target, ast.Name) else ast.Name(id=stmt.target.id, ctx=ast.Load()))
            if isinstance(stmt.target, ast.Name) and stmt.target.id == name:
                if not bound_flag[0]:
                    external = True  # augmented assignment reads before writing
                bound_flag[0] = True
        elif isinstance(stmt, (ast.Expr, ast.Return)):
            see(stmt.value)
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            see(stmt.iter)
            loop_bound = bound_flag[0] or any(
                isinstance(s, ast.Name) and s.id == name for s in ast.walk(stmt.target)
            )
            body_ext, _ = _name_is_external(stmt.body, name, loop_bound)
            external = external or body_ext
            else_ext, _ = _name_is_external(stmt.orelse, name, loop_bound)
            external = external or else_ext
            bound_flag[0] = loop_bound
        elif isinstance(stmt, ast.While):
            see(stmt.test)
            body_ext, _ = _name_is_external(stmt.body, name, bound_flag[0])
            external = external or body_ext
            else_ext, _ = _name_is_external(stmt.orelse, name, bound_flag[0])
            external = external or else_ext
        elif isinstance(stmt, ast.If):
            see(stmt.test)
            body_ext, body_bound = _name_is_external(stmt.body, name, bound_flag[0])
            else_ext, else_bound = _name_is_external(stmt.orelse, name, bound_flag[0])
            external = external or body_ext or else_ext
            bound_flag[0] = bound_flag[0] or (body_bound and else_bound)
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            if stmt.name == name:
                bound_flag[0] = True
            params = {a.arg for a in stmt.args.args + stmt.args.posonlyargs + stmt.args.kwonlyargs}
            if name not in params:
                body_ext, _ = _name_is_external(stmt.body, name, bound_flag[0])
                external = external or body_ext
        elif isinstance(stmt, ast.Pass):
            pass
        else:
            for child in ast.iter_child_nodes(stmt):
                see(child)
    return external, bound_flag[0]


def external_oracle(source: str, builtins: frozenset[str]) -> set[str]:
    tree = ast.parse(textwrap.dedent(source))
    candidates: set[str] = {
        node.id for node in ast.walk(tree) if isinstance(node, ast.Name)
    } - builtins
    result = set()
    for name in sorted(candidates):
        ext, _ = _name_is_external(tree.body, name, bound=False)
        if ext:
            result.add(name)
    return result


def defined_oracle(source: str, builtins: frozenset[str]) -> set[str]:
    """Names bound or mutated in the fragment namespace (def bodies excluded)."""
    tree = ast.parse(textwrap.dedent(source))
    defined: set[str] = set()

    def record_mutations(node: ast.AST) -> None:
        for sub in ast.walk(node):
            if (
                isinstance(sub, ast.Call)
                and isinstance(sub.func, ast.Attribute)
                and isinstance(sub.func.value, ast.Name)
            ):
                defined.add(sub.func.value.id)

    def visit(stmts: list[ast.stmt]) -> None:
        for stmt in stmts:
            if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
                defined.add(stmt.name)
                continue  # body is another namespace
            if isinstance(stmt, ast.ClassDef):
                defined.add(stmt.name)
                continue
            record_mutations(stmt)
            if isinstance(stmt, ast.Assign):
                for target in stmt.targets:
                    for sub in ast.walk(target):
                        if isinstance(sub, ast.Name) and isinstance(sub.ctx, ast.Store):
                            defined.add(sub.id)
                        elif isinstance(sub, (ast.Subscript, ast.Attribute)) and isinstance(
                            sub.value, ast.Name
                        ):
                            defined.add(sub.value.id)
            elif isinstance(stmt, ast.AugAssign):
                if isinstance(stmt.target, ast.Name):
                    defined.add(stmt.target.id)
                elif isinstance(stmt.target, (ast.Subscript, ast.Attribute)) and isinstance(
                    stmt.target.value, ast.Name
                ):
                    defined.add(stmt.target.value.id)
            for block in _blocks(stmt):
                visit(block)

    visit(tree.body)
    return defined - builtins


def input_oracle(source: str, sources: frozenset[str]) -> bool:
    """Exhaustive enumeration of dotted call/read names against the source set."""
    tree = ast.parse(textwrap.dedent(source))

    def dotted(node: ast.AST) -> str | None:
        parts = []
        while isinstance(node, ast.Attribute):
            parts.append(node.attr)
            node = node.value
        if isinstance(node, ast.Name):
            parts.append(node.id)
            return ".".join(reversed(parts))
        return None

    mentioned = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Call):
            name = dotted(node.func)
            if name:
                mentioned.add(name)
        elif isinstance(node, (ast.Name, ast.Attribute)):
            name = dotted(node)
            if name:
                mentioned.add(name)
    for name in mentioned:
        for entry in sources:
            if name == entry or name.startswith(entry + "."):
                return True
    return False


# ---------------------------------------------------------------------------
# n-gram metric oracles: explicit occurrence marking, full DP tables
# ---------------------------------------------------------------------------

def _marked_overlap(cand_grams: list[tuple], ref_grams: list[tuple]) -> int:
    used = [False] * len(ref_grams)
    matched = 0
    for gram in cand_grams:
        for idx, ref_gram in enumerate(ref_grams):
            if not used[idx] and ref_gram == gram:
                used[idx] = True
                matched += 1
                break
    return matched


def _grams(seq, n: int) -> list[tuple]:
    return [tuple(seq[i : i + n]) for i in range(len(seq) - n + 1)]


def bleu_oracle(candidate: list[str], reference: list[str], max_n: int = 4) -> float:
    if not candidate:
        return 0.0
    logs = []
    for n in range(1, max_n + 1):
        cand_grams = _grams(candidate, n)
        matched = _marked_overlap(cand_grams, _grams(reference, n))
        total = len(cand_grams)
        if n == 1:
            if matched == 0:
                return 0.0
            logs.append(math.log(matched / total))
        else:
            logs.append(math.log((matched + 1) / (total + 1)))
    brevity = 1.0 if len(candidate) >= len(reference) else math.exp(1 - len(reference) / len(candidate))
    return brevity * math.exp(sum(logs) / max_n)


def rouge_n_oracle(candidate: list[str], reference: list[str], n: int) -> dict[str, float]:
    cand_grams = _grams(candidate, n)
    ref_grams = _grams(reference, n)
    overlap = _marked_overlap(cand_grams, ref_grams)
    precision = overlap / len(cand_grams) if cand_grams else 0.0
    recall = overlap / len(ref_grams) if ref_grams else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return {"precision": precision, "recall": recall, "f1": f1}


def lcs_oracle(a: list[str], b: list[str]) -> int:
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(a)][len(b)]


def chrf_oracle(candidate: str, reference: str, n: int = 6, beta: float = 2.0) -> float:
    cand = [c for c in candidate if not c.isspace()]
    ref = [c for c in reference if not c.isspace()]
    scores = []
    for order in range(1, n + 1):
        cand_grams = _grams(cand, order)
        ref_grams = _grams(ref, order)
        if not cand_grams and not ref_grams:
            continue
        overlap = _marked_overlap(cand_grams, ref_grams)
        precision = overlap / len(cand_grams) if cand_grams else 0.0
        recall = overlap / len(ref_grams) if ref_grams else 0.0
        if precision + recall == 0:
            scores.append(0.0)
        else:
            scores.append((1 + beta**2) * precision * recall / (beta**2 * precision + recall))
    return sum(scores) / len(scores) if scores else 0.0


# ---------------------------------------------------------------------------
# correlation oracles
# ---------------------------------------------------------------------------

def pearson_oracle(x: list[float], y: list[float]) -> float:
    n = len(x)
    sx, sy = sum(x), sum(y)
    sxx = sum(v * v for v in x)
    syy = sum(v * v for v in y)
    sxy = sum(a * b for a, b in zip(x, y))
    denom = math.sqrt((n * sxx - sx * sx) * (n * syy - sy * sy))
    return (n * sxy - sx * sy) / denom


def ranks_oracle(values: list[float]) -> list[float]:
    # per-element: rank = #smaller + (#equal + 1) / 2
    return [
        sum(1 for other in values if other < v) + (sum(1 for other in values if other == v) + 1) / 2
        for v in values
    ]


def spearman_oracle(x: list[float], y: list[float]) -> float:
    return pearson_oracle(ranks_oracle(x), ranks_oracle(y))


def kendall_oracle(x: list[float], y: list[float]) -> float:
    n = len(x)
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            product = (x[i] - x[j]) * (y[i] - y[j])
            if product > 0:
                concordant += 1
            elif product < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    tie_x = sum(t * (t - 1) // 2 for t in Counter(x).values())
    tie_y = sum(t * (t - 1) // 2 for t in Counter(y).values())
    return (concordant - discordant) / math.sqrt((n0 - tie_x) * (n0 - tie_y))


def kappa_oracle(a: list, b: list) -> float:
    n = len(a)
    labels = sorted(set(a) | set(b), key=str)
    matrix = {(u, v): 0 for u in labels for v in labels}
    for u, v in zip(a, b):
        matrix[(u, v)] += 1
    observed = sum(matrix[(label, label)] for label in labels) / n
    expected = 0.0
    for label_a in labels:
        row = sum(matrix[(label_a, v)] for v in labels)
        col = sum(matrix[(u, label_a)] for u in labels)
        expected += (row / n) * (col / n)
    return (observed - expected) / (1 - expected)
