"""External SMT solver process driver.

One solver process per query: the script goes to the child's stdin, the
first line of stdout is the verdict token (sat/unsat/unknown), and the rest
is captured as model/objectives text. A query that outlives its timeout is
killed and reported UNKNOWN with a Timeout diagnostic; spawn failures and
unparseable output raise SolverError (the SolverFailure category).

Solver discovery prefers a native ``z3`` binary on PATH and falls back to
the bundled node wrapper around the z3-solver WASM build, so the backend
works in environments without a system Z3.
"""

from __future__ import annotations

import shutil
import subprocess
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .diagnostics import Diagnostic

Atom = str
Value = bool | int | Fraction | Atom


@dataclass(frozen=True)
class SolverConfig:
    command: str
    args: tuple[str, ...] = ()
    timeout_ms: int = 30_000
    produce_models: bool = True

    def __post_init__(self) -> None:
        if not self.command:
            raise ValueError("solver command must be non-empty")
        if self.timeout_ms <= 0:
            raise ValueError("solver timeout must be positive")


@dataclass(frozen=True)
class SolverOutcome:
    status: str  # "SAT" | "UNSAT" | "UNKNOWN"
    model_text: str | None
    objectives_text: str | None
    raw: str
    elapsed_ms: float
    diagnostics: tuple[Diagnostic, ...] = field(default=())


class SolverError(Exception):
    """Infrastructure failure: spawn error, crash, or unparseable output."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw
        self.diagnostic = Diagnostic("SolverFailure", message)


def wrapper_path() -> str:
    return str(resources.files("folcheck").joinpath("z3wasm.js"))


def default_solver_config(timeout_ms: int = 30_000) -> SolverConfig | None:
    """Pick a usable solver: native z3, else node + bundled WASM wrapper."""
    z3 = shutil.which("z3")
    if z3:
        return SolverConfig(z3, ("-in",), timeout_ms)
    node = shutil.which("node")
    if node:
        return SolverConfig(node, (wrapper_path(),), timeout_ms)
    return None


def run_solver(script: str, config: SolverConfig) -> SolverOutcome:
    started = time.monotonic()
    try:
        process = subprocess.Popen(
            [config.command, *config.args],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
    except OSError as err:
        raise SolverError(f"cannot spawn solver {config.command!r}: {err}") from err
    try:
        stdout, stderr = process.communicate(script, timeout=config.timeout_ms / 1000.0)
    except subprocess.TimeoutExpired:
        process.kill()
        process.communicate()
        elapsed = (time.monotonic() - started) * 1000.0
        return SolverOutcome(
            "UNKNOWN",
            None,
            None,
            "",
            elapsed,
            (Diagnostic("Timeout", f"solver exceeded {config.timeout_ms} ms"),),
        )
    elapsed = (time.monotonic() - started) * 1000.0

    lines = [line for line in stdout.splitlines() if line.strip()]
    first = lines[0].strip() if lines else ""
    if first not in ("sat", "unsat", "unknown"):
        detail = stdout.strip() or stderr.strip() or f"exit code {process.returncode}"
        raise SolverError(f"solver produced no verdict: {detail[:400]}", stdout)
    status = {"sat": "SAT", "unsat": "UNSAT", "unknown": "UNKNOWN"}[first]

    remainder = "\n".join(lines[1:])
    objectives_text = None
    model_text = None
    if remainder:
        objectives_text = _extract_block(remainder, "objectives")
        rest = remainder.replace(objectives_text, "", 1).strip() if objectives_text else remainder
        if rest and status == "SAT" and config.produce_models:
            model_text = rest
    return SolverOutcome(status, model_text, objectives_text, stdout, elapsed)


def _extract_block(text: str, head: str) -> str | None:
    """Grab the balanced s-expression starting with ``(head`` if present."""
    start = text.find(f"({head}")
    if start < 0:
        return None
    depth = 0
    for index in range(start, len(text)):
        if text[index] == "(":
            depth += 1
        elif text[index] == ")":
            depth -= 1
            if depth == 0:
                return text[start : index + 1]
    return None


# -- s-expression values ----------------------------------------------------
#
# (get-value ...) responses and (objectives ...) blocks are parsed with a
# tiny reader: atoms, ints, decimals, and the composed value forms
# (- x), (/ a b). Uninterpreted-sort elements stay atoms (e.g. Person!val!0).


def parse_sexprs(text: str) -> list:
    tokens = _sexpr_tokens(text)
    out = []
    index = 0
    while index < len(tokens):
        node, index = _read(tokens, index)
        out.append(node)
    return out


def _sexpr_tokens(text: str) -> list[str]:
    tokens: list[str] = []
    index = 0
    while index < len(text):
        ch = text[index]
        if ch in "()":
            tokens.append(ch)
            index += 1
        elif ch.isspace():
            index += 1
        elif ch == ";":
            while index < len(text) and text[index] != "\n":
                index += 1
        elif ch == "|":
            end = text.index("|", index + 1)
            tokens.append(text[index : end + 1])
            index = end + 1
        elif ch == '"':
            end = index + 1
            while end < len(text) and text[end] != '"':
                end += 1
            tokens.append(text[index : end + 1])
            index = end + 1
        else:
            end = index
            while end < len(text) and not text[end].isspace() and text[end] not in "()":
                end += 1
            tokens.append(text[index:end])
            index = end
    return tokens


def _read(tokens: list[str], index: int):
    token = tokens[index]
    if token == "(":
        items = []
        index += 1
        while tokens[index] != ")":
            node, index = _read(tokens, index)
            items.append(node)
        return items, index + 1
    if token == ")":
        raise SolverError("unbalanced s-expression in solver output")
    return token, index + 1


def sexpr_to_value(node) -> Value | None:
    """Interpret a parsed s-expression as a ground value; None when it is not
    one (e.g. an ite-lambda or an infinity from an unbounded objective)."""
    if isinstance(node, str):
        if node == "true":
            return True
        if node == "false":
            return False
        if node in ("oo", "epsilon"):
            return None
        try:
            return int(node)
        except ValueError:
            pass
        try:
            fraction = Fraction(node)
            return fraction
        except ValueError:
            pass
        if node.startswith("|") and node.endswith("|"):
            return node[1:-1]
        return node  # an atom: enum value or universe element
    if isinstance(node, list) and node:
        if node[0] == "-" and len(node) == 2:
            inner = sexpr_to_value(node[1])
            if isinstance(inner, (int, Fraction)):
                return -inner
            return None
        if node[0] == "/" and len(node) == 3:
            num = sexpr_to_value(node[1])
            den = sexpr_to_value(node[2])
            if isinstance(num, (int, Fraction)) and isinstance(den, (int, Fraction)) and den != 0:
                return Fraction(num) / Fraction(den)
            return None
    return None
