"""The parsed program model and its canonical form.

A Program is the in-memory image of one DSL document: declarations, the
knowledge base, rules, verifications, the optional optimization block, and
the action list. Everything is an immutable value; expression strings have
already been parsed into surface terms by the frontend.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .diagnostics import Diagnostic, ProgramError, SourceSpan
from .terms import SortKind, Term

ACTION_VERIFY = "verify_conditions"
ACTION_OPTIMIZE = "optimize"
ACTION_ALIASES = {"verify": ACTION_VERIFY}
KNOWN_ACTIONS = frozenset({ACTION_VERIFY, ACTION_OPTIMIZE})


@dataclass(frozen=True)
class SortDecl:
    name: str
    kind: SortKind
    values: tuple[str, ...] = ()  # EnumSort only
    width: int = 0  # BitVecSort only
    path: str = ""


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    domain: tuple[str, ...]  # sort references, resolved by the type checker
    range: str
    path: str = ""


@dataclass(frozen=True)
class ConstantGroup:
    name: str
    sort: str
    members: tuple[str, ...]
    path: str = ""


@dataclass(frozen=True)
class VariableDecl:
    name: str
    sort: str
    path: str = ""


@dataclass(frozen=True)
class KnowledgeEntry:
    assertion: Term
    text: str
    value: bool | None = None
    variables: tuple[VariableDecl, ...] = ()
    path: str = ""
    assertion_path: str = ""  # equals path for bare-string entries


@dataclass(frozen=True)
class Rule:
    name: str
    binders: tuple[VariableDecl, ...] = ()
    antecedent: Term | None = None
    consequent: Term | None = None
    constraint: Term | None = None
    path: str = ""


@dataclass(frozen=True)
class Verification:
    name: str
    quantifier: str | None = None  # "forall" | "exists" | None
    binders: tuple[VariableDecl, ...] = ()
    antecedent: Term | None = None
    consequent: Term | None = None
    constraint: Term | None = None
    path: str = ""


@dataclass(frozen=True)
class Objective:
    kind: str  # "minimize" | "maximize"
    expression: Term
    text: str
    path: str = ""


@dataclass(frozen=True)
class OptimizationSpec:
    constraints: tuple[tuple[Term, str], ...] = ()  # (term, json path)
    objectives: tuple[Objective, ...] = ()
    path: str = ""


@dataclass(frozen=True)
class Program:
    sorts: tuple[SortDecl, ...] = ()
    functions: tuple[FunctionDecl, ...] = ()
    constants: tuple[ConstantGroup, ...] = ()
    variables: tuple[VariableDecl, ...] = ()
    knowledge_base: tuple[KnowledgeEntry, ...] = ()
    rules: tuple[Rule, ...] = ()
    verifications: tuple[Verification, ...] = ()
    optimization: OptimizationSpec | None = None
    actions: tuple[str, ...] = ()

    def constant_group(self, name: str) -> ConstantGroup | None:
        for group in self.constants:
            if group.name == name:
                return group
        return None


@dataclass(frozen=True)
class Verdict:
    """Outcome of one satisfiability query. The boolean answer mirrors the
    status (SAT maps to True, UNSAT to False) and is absent for UNKNOWN."""

    status: str  # "SAT" | "UNSAT" | "UNKNOWN"
    model: str | None = None
    backend: str = ""

    def __post_init__(self) -> None:
        if self.status not in ("SAT", "UNSAT", "UNKNOWN"):
            raise ValueError(f"bad verdict status {self.status!r}")

    @property
    def answer(self) -> bool | None:
        if self.status == "UNKNOWN":
            return None
        return self.status == "SAT"


def canonicalize(raw: Program) -> Program:
    """Normalize action names ("verify" and "verify_conditions" are synonyms)
    and validate the action vocabulary. Key aliases and string knowledge-base
    entries are already unified by the frontend while the document shape is
    still visible; this pass is idempotent and preserves every section."""
    actions = []
    bad: list[Diagnostic] = []
    for index, action in enumerate(raw.actions):
        action = ACTION_ALIASES.get(action, action)
        if action not in KNOWN_ACTIONS:
            bad.append(
                Diagnostic(
                    "UnknownAction",
                    f"unknown action {action!r}",
                    SourceSpan(f"/actions/{index}"),
                    hint="allowed actions: verify_conditions (alias verify), optimize",
                )
            )
        actions.append(action)
    if bad:
        raise ProgramError(bad)
    if tuple(actions) == raw.actions:
        return raw
    return replace(raw, actions=tuple(actions))
