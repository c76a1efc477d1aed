"""Seeded random program generator shared by the corpus-based tests.

Emits small parseable programs from a fixed grammar (assignments, branches,
loops, function defs, calls, input reads, mutations) so decomposition and
dependency analysis can be checked against independent oracles on hundreds
of inputs.  Everything is driven by random.Random(seed): same seed, same
program.
"""

from __future__ import annotations

import random

NAMES = ["a", "b", "c", "n", "s", "t", "u", "v", "count", "total"]
FUNC_NAMES = ["f", "g", "h"]


class ProgramGenerator:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    # -- expressions ---------------------------------------------------------

    def expr(self, depth: int = 2) -> str:
        roll = self.rng.random()
        if depth <= 0 or roll < 0.4:
            if self.rng.random() < 0.5:
                return str(self.rng.randint(0, 99))
            return self.rng.choice(NAMES)
        pick = self.rng.randrange(5)
        if pick == 0:
            return f"{self.expr(depth - 1)} + {self.expr(depth - 1)}"
        if pick == 1:
            return f"{self.expr(depth - 1)} * {self.rng.randint(1, 9)}"
        if pick == 2:
            return f"len({self.rng.choice(NAMES)})"
        if pick == 3:
            return f"{self.rng.choice(NAMES)}[{self.expr(0)}]"
        return f"max({self.expr(depth - 1)}, {self.expr(0)})"

    def condition(self) -> str:
        op = self.rng.choice(["<", ">", "==", "!=", "<=", ">="])
        return f"{self.rng.choice(NAMES)} {op} {self.expr(1)}"

    # -- statements ----------------------------------------------------------

    def simple_stmt(self) -> str:
        pick = self.rng.randrange(8)
        name = self.rng.choice(NAMES)
        if pick == 0:
            return f"{name} = {self.expr()}"
        if pick == 1:
            return f"{name} += {self.expr(1)}"
        if pick == 2:
            return f"print({self.expr(1)})"
        if pick == 3:
            return f"{name}.append({self.expr(1)})"
        if pick == 4:
            return f"{name}[{self.expr(0)}] = {self.expr(1)}"
        if pick == 5:
            return f"{name} = int(input())"
        if pick == 6:
            return f"{name} = {self.rng.choice(FUNC_NAMES)}({self.expr(1)})"
        return f"{name} = [{self.expr(1)}, {self.expr(1)}]"

    def block(self, nest: int, indent: int, in_function: bool = False) -> list[str]:
        pad = "    " * indent
        lines: list[str] = []
        for _ in range(self.rng.randint(1, 3)):
            if nest > 0 and self.rng.random() < 0.55:
                lines.extend(self.compound_stmt(nest, indent, in_function))
            else:
                lines.append(pad + self.simple_stmt())
        if in_function and self.rng.random() < 0.5:
            lines.append(pad + f"return {self.expr(1)}")
        return lines

    def compound_stmt(self, nest: int, indent: int, in_function: bool) -> list[str]:
        pad = "    " * indent
        pick = self.rng.randrange(5)
        if pick == 0:
            head = [pad + f"for {self.rng.choice(['i', 'j', 'k'])} in range({self.expr(1)}):"]
            return head + self.block(nest - 1, indent + 1, in_function)
        if pick == 1:
            head = [pad + f"while {self.condition()}:"]
            body = self.block(nest - 1, indent + 1, in_function)
            body.append("    " * (indent + 1) + "break")
            return head + body
        if pick == 2:
            lines = [pad + f"if {self.condition()}:"]
            lines += self.block(nest - 1, indent + 1, in_function)
            if self.rng.random() < 0.5:
                lines.append(pad + "else:")
                lines += self.block(nest - 1, indent + 1, in_function)
            return lines
        if pick == 3 and not in_function:
            params = ", ".join(self.rng.sample(["p", "q", "r"], self.rng.randint(1, 2)))
            name = self.rng.choice(FUNC_NAMES)
            lines = [pad + f"def {name}({params}):"]
            lines += self.block(max(nest - 1, 0), indent + 1, in_function=True)
            return lines
        return [pad + self.simple_stmt()]

    def program(self, max_nest: int = 3) -> str:
        lines: list[str] = []
        for _ in range(self.rng.randint(2, 5)):
            if self.rng.random() < 0.6:
                lines.extend(self.compound_stmt(max_nest, 0, in_function=False))
            else:
                lines.append(self.simple_stmt())
        return "\n".join(lines) + "\n"

    def commented_program(self, max_nest: int = 3) -> str:
        """A program sprinkled with comments and docstrings for strip tests."""
        source = self.program(max_nest)
        lines = []
        if self.rng.random() < 0.6:
            lines.append('"""module docstring"""')
        for line in source.splitlines():
            if self.rng.random() < 0.25:
                lines.append("# standalone comment")
            if line.strip() and self.rng.random() < 0.3 and not line.rstrip().endswith(":"):
                line = line + "  # trailing note"
            lines.append(line)
            if line.lstrip().startswith("def ") and self.rng.random() < 0.7:
                indent = (len(line) - len(line.lstrip())) + 4
                lines.append(" " * indent + '"""docstring for the function"""')
        return "\n".join(lines) + "\n"


def fragments_for_dependency(count: int, seed: int = 20240701) -> list[str]:
    """Fragments exercising read-before-write, branches, loops, and defs."""
    gen = ProgramGenerator(seed)
    return [gen.program(max_nest=gen.rng.randint(1, 3)) for _ in range(count)]


def programs_for_decomposition(count: int, seed: int = 20240702) -> list[str]:
    gen = ProgramGenerator(seed)
    return [gen.program(max_nest=gen.rng.randint(1, 4)) for _ in range(count)]
