"""Frontend: JSON documents -> Programs.

Performs shape validation with JSON-pointer paths, unifies the key aliases
the corpus exhibits ("knowledgebase" for "knowledge_base", action "verify",
sort keywords with or without the "Sort" suffix), parses every expression
string into a surface term, and finishes with program canonicalization.
Diagnostics are collected exhaustively rather than aborting at the first
problem, to maximize the signal available to the repair loop.
"""

from __future__ import annotations

import json
from typing import Any

from .diagnostics import Diagnostic, ProgramError, SourceSpan, sort_diagnostics
from .exprparse import parse_expression
from .program import (
    ConstantGroup,
    FunctionDecl,
    KnowledgeEntry,
    Objective,
    OptimizationSpec,
    Program,
    Rule,
    SortDecl,
    VariableDecl,
    Verification,
    canonicalize,
)
from .terms import BoolLit, SortKind, Term

_TOP_LEVEL_KEYS = (
    "sorts",
    "functions",
    "constants",
    "variables",
    "knowledge_base",
    "rules",
    "verifications",
    "optimization",
    "actions",
)
_KEY_ALIASES = {"knowledgebase": "knowledge_base"}

_SORT_TYPE_NAMES = {
    "DeclareSort": SortKind.DECLARED,
    "BoolSort": SortKind.BOOL,
    "Bool": SortKind.BOOL,
    "IntSort": SortKind.INT,
    "Int": SortKind.INT,
    "RealSort": SortKind.REAL,
    "Real": SortKind.REAL,
    "EnumSort": SortKind.ENUM,
    "BitVecSort": SortKind.BITVEC,
}


def _pointer(*parts: Any) -> str:
    out = []
    for part in parts:
        text = str(part).replace("~", "~0").replace("/", "~1")
        out.append(text)
    return "/" + "/".join(out) if out else ""


class _Loader:
    def __init__(self) -> None:
        self.diagnostics: list[Diagnostic] = []

    def fail(self, path: str, message: str, category: str = "SchemaViolation", hint: str | None = None) -> None:
        self.diagnostics.append(Diagnostic(category, message, SourceSpan(path), hint))

    def expression(self, text: Any, path: str) -> Term:
        if not isinstance(text, str):
            self.fail(path, f"expected an expression string, got {type(text).__name__}")
            return BoolLit(True)
        try:
            return parse_expression(text)
        except ProgramError as err:
            for diag in err.diagnostics:
                span = diag.span or SourceSpan("")
                self.diagnostics.append(
                    Diagnostic(diag.category, diag.message, SourceSpan(path, span.start, span.end), diag.hint)
                )
            return BoolLit(True)

    def string(self, value: Any, path: str, what: str) -> str:
        if not isinstance(value, str):
            self.fail(path, f"{what} must be a string, got {type(value).__name__}")
            return ""
        return value

    def check_keys(self, obj: dict[str, Any], path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> bool:
        ok = True
        for key in required:
            if key not in obj:
                self.fail(path, f"missing required key {key!r}")
                ok = False
        for key in obj:
            if key not in required and key not in optional:
                self.fail(_pointer_join(path, key), f"unknown key {key!r}")
                ok = False
        return ok

    def object_list(self, value: Any, path: str) -> list[tuple[int, dict[str, Any]]]:
        if not isinstance(value, list):
            self.fail(path, f"expected an array, got {type(value).__name__}")
            return []
        out = []
        for index, item in enumerate(value):
            if not isinstance(item, dict):
                self.fail(f"{path}/{index}", f"expected an object, got {type(item).__name__}")
                continue
            out.append((index, item))
        return out

    # -- sections ------------------------------------------------------

    def sorts(self, value: Any) -> tuple[SortDecl, ...]:
        out = []
        for index, item in self.object_list(value, "/sorts"):
            path = f"/sorts/{index}"
            if not self.check_keys(item, path, ("name", "type"), ("values", "width")):
                continue
            name = self.string(item["name"], f"{path}/name", "sort name")
            type_name = self.string(item["type"], f"{path}/type", "sort type")
            kind = _SORT_TYPE_NAMES.get(type_name)
            if kind is None:
                self.fail(f"{path}/type", f"unknown sort type {type_name!r}", "UnknownSort",
                          hint="one of DeclareSort, BoolSort, IntSort, RealSort, EnumSort, BitVecSort")
                continue
            values: tuple[str, ...] = ()
            width = 0
            if kind is SortKind.ENUM:
                raw_values = item.get("values")
                if not isinstance(raw_values, list) or not raw_values:
                    self.fail(f"{path}/values", "EnumSort requires a non-empty values array")
                    continue
                values = tuple(self.string(v, f"{path}/values/{i}", "enum value") for i, v in enumerate(raw_values))
                if len(set(values)) != len(values):
                    self.fail(f"{path}/values", f"enum values of {name!r} are not distinct", "DuplicateName")
            elif "values" in item:
                self.fail(f"{path}/values", f"sort type {type_name!r} does not take values")
            if kind is SortKind.BITVEC:
                raw_width = item.get("width")
                if not isinstance(raw_width, int) or isinstance(raw_width, bool) or raw_width < 1:
                    self.fail(f"{path}/width", "BitVecSort requires a positive integer width")
                    continue
                width = raw_width
            elif "width" in item:
                self.fail(f"{path}/width", f"sort type {type_name!r} does not take a width")
            out.append(SortDecl(name, kind, values, width, path))
        return tuple(out)

    def functions(self, value: Any) -> tuple[FunctionDecl, ...]:
        out = []
        for index, item in self.object_list(value, "/functions"):
            path = f"/functions/{index}"
            if not self.check_keys(item, path, ("name", "range"), ("domain",)):
                continue
            name = self.string(item["name"], f"{path}/name", "function name")
            raw_domain = item.get("domain", [])
            if not isinstance(raw_domain, list):
                self.fail(f"{path}/domain", "domain must be an array of sort names")
                continue
            domain = tuple(self.string(s, f"{path}/domain/{i}", "sort reference") for i, s in enumerate(raw_domain))
            range_ = self.string(item["range"], f"{path}/range", "sort reference")
            out.append(FunctionDecl(name, domain, range_, path))
        return tuple(out)

    def constants(self, value: Any) -> tuple[ConstantGroup, ...]:
        if not isinstance(value, dict):
            self.fail("/constants", f"expected an object of groups, got {type(value).__name__}")
            return ()
        out = []
        for group_name, body in value.items():
            path = _pointer("constants", group_name)
            if not isinstance(body, dict):
                self.fail(path, f"constant group must be an object, got {type(body).__name__}")
                continue
            if not self.check_keys(body, path, ("sort", "members")):
                continue
            sort = self.string(body["sort"], f"{path}/sort", "sort reference")
            raw_members = body["members"]
            if not isinstance(raw_members, list):
                self.fail(f"{path}/members", "members must be an array of names")
                continue
            members = tuple(self.string(m, f"{path}/members/{i}", "member name") for i, m in enumerate(raw_members))
            out.append(ConstantGroup(group_name, sort, members, path))
        return tuple(out)

    def variable_list(self, value: Any, path: str) -> tuple[VariableDecl, ...]:
        out = []
        for index, item in self.object_list(value, path):
            entry_path = f"{path}/{index}"
            if not self.check_keys(item, entry_path, ("name", "sort")):
                continue
            out.append(
                VariableDecl(
                    self.string(item["name"], f"{entry_path}/name", "variable name"),
                    self.string(item["sort"], f"{entry_path}/sort", "sort reference"),
                    entry_path,
                )
            )
        return tuple(out)

    def knowledge_base(self, value: Any) -> tuple[KnowledgeEntry, ...]:
        if not isinstance(value, list):
            self.fail("/knowledge_base", f"expected an array, got {type(value).__name__}")
            return ()
        out = []
        for index, item in enumerate(value):
            path = f"/knowledge_base/{index}"
            if isinstance(item, str):
                out.append(KnowledgeEntry(self.expression(item, path), item, None, (), path, path))
                continue
            if not isinstance(item, dict):
                self.fail(path, f"knowledge base entry must be a string or object, got {type(item).__name__}")
                continue
            if not self.check_keys(item, path, ("assertion",), ("value", "variables")):
                continue
            text = item["assertion"]
            term = self.expression(text, f"{path}/assertion")
            entry_value = item.get("value")
            if entry_value is not None and not isinstance(entry_value, bool):
                self.fail(f"{path}/value", "value must be a boolean")
                entry_value = None
            variables = self.variable_list(item["variables"], f"{path}/variables") if "variables" in item else ()
            out.append(
                KnowledgeEntry(term, text if isinstance(text, str) else "", entry_value, variables, path, f"{path}/assertion")
            )
        return tuple(out)

    def implies_body(self, item: dict[str, Any], path: str) -> tuple[Term, Term] | None:
        body = item["implies"]
        if not isinstance(body, dict):
            self.fail(f"{path}/implies", "implies must be an object with antecedent and consequent")
            return None
        if not self.check_keys(body, f"{path}/implies", ("antecedent", "consequent")):
            return None
        return (
            self.expression(body["antecedent"], f"{path}/implies/antecedent"),
            self.expression(body["consequent"], f"{path}/implies/consequent"),
        )

    def rules(self, value: Any) -> tuple[Rule, ...]:
        out = []
        for index, item in self.object_list(value, "/rules"):
            path = f"/rules/{index}"
            if not self.check_keys(item, path, ("name",), ("forall", "implies", "constraint")):
                continue
            name = self.string(item["name"], f"{path}/name", "rule name")
            binders = self.variable_list(item["forall"], f"{path}/forall") if "forall" in item else ()
            has_implies, has_constraint = "implies" in item, "constraint" in item
            if has_implies == has_constraint:
                self.fail(path, "a rule takes exactly one of 'implies' or 'constraint'")
                continue
            if has_implies:
                parts = self.implies_body(item, path)
                if parts is None:
                    continue
                out.append(Rule(name, binders, parts[0], parts[1], None, path))
            else:
                out.append(Rule(name, binders, None, None, self.expression(item["constraint"], f"{path}/constraint"), path))
        return tuple(out)

    def verifications(self, value: Any) -> tuple[Verification, ...]:
        out = []
        for index, item in self.object_list(value, "/verifications"):
            path = f"/verifications/{index}"
            if not self.check_keys(item, path, ("name",), ("forall", "exists", "constraint", "implies")):
                continue
            name = self.string(item["name"], f"{path}/name", "verification name")
            if "forall" in item and "exists" in item:
                self.fail(path, "a verification takes at most one binder (forall or exists)")
                continue
            quantifier = "forall" if "forall" in item else "exists" if "exists" in item else None
            binders = self.variable_list(item[quantifier], f"{path}/{quantifier}") if quantifier else ()
            has_implies, has_constraint = "implies" in item, "constraint" in item
            if has_implies == has_constraint:
                self.fail(path, "a verification takes exactly one of 'implies' or 'constraint'")
                continue
            if has_implies:
                if quantifier == "exists":
                    self.fail(path, "an exists binder pairs with the constraint form, not implies")
                    continue
                parts = self.implies_body(item, path)
                if parts is None:
                    continue
                out.append(Verification(name, quantifier, binders, parts[0], parts[1], None, path))
            else:
                term = self.expression(item["constraint"], f"{path}/constraint")
                out.append(Verification(name, quantifier, binders, None, None, term, path))
        return tuple(out)

    def optimization(self, value: Any) -> OptimizationSpec | None:
        path = "/optimization"
        if not isinstance(value, dict):
            self.fail(path, f"expected an object, got {type(value).__name__}")
            return None
        if not self.check_keys(value, path, (), ("constraints", "objectives")):
            return None
        constraints: list[tuple[Term, str]] = []
        raw_constraints = value.get("constraints", [])
        if not isinstance(raw_constraints, list):
            self.fail(f"{path}/constraints", "constraints must be an array of expression strings")
        else:
            for index, text in enumerate(raw_constraints):
                entry_path = f"{path}/constraints/{index}"
                constraints.append((self.expression(text, entry_path), entry_path))
        objectives: list[Objective] = []
        raw_objectives = value.get("objectives", [])
        for index, item in self.object_list(raw_objectives, f"{path}/objectives"):
            entry_path = f"{path}/objectives/{index}"
            if not self.check_keys(item, entry_path, ("type", "expression")):
                continue
            kind = self.string(item["type"], f"{entry_path}/type", "objective type")
            if kind not in ("minimize", "maximize"):
                self.fail(f"{entry_path}/type", f"objective type must be minimize or maximize, got {kind!r}")
                continue
            text = item["expression"]
            term = self.expression(text, f"{entry_path}/expression")
            objectives.append(Objective(kind, term, text if isinstance(text, str) else "", entry_path))
        return OptimizationSpec(tuple(constraints), tuple(objectives), path)

    def actions(self, value: Any) -> tuple[str, ...]:
        if not isinstance(value, list):
            self.fail("/actions", f"expected an array, got {type(value).__name__}")
            return ()
        return tuple(self.string(a, f"/actions/{i}", "action name") for i, a in enumerate(value))


def parse_program(text: str) -> Program:
    """Parse a JSON document into a canonicalized Program.

    Raises ProgramError with JsonSyntax for malformed JSON, and with the full
    collected SchemaViolation / ExpressionSyntax / UnknownAction list for
    shape and expression problems."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise ProgramError(
            [Diagnostic("JsonSyntax", err.msg, SourceSpan("", err.pos, err.pos))]
        ) from err
    if not isinstance(document, dict):
        raise ProgramError(
            [Diagnostic("SchemaViolation", f"top level must be an object, got {type(document).__name__}", SourceSpan(""))]
        )

    loader = _Loader()
    sections: dict[str, Any] = {}
    for key, value in document.items():
        canonical = _KEY_ALIASES.get(key, key)
        if canonical not in _TOP_LEVEL_KEYS:
            loader.fail(_pointer(key), f"unknown top-level key {key!r}")
            continue
        if canonical in sections:
            loader.fail(_pointer(key), f"section {canonical!r} appears twice")
            continue
        sections[canonical] = value

    program = Program(
        sorts=loader.sorts(sections["sorts"]) if "sorts" in sections else (),
        functions=loader.functions(sections["functions"]) if "functions" in sections else (),
        constants=loader.constants(sections["constants"]) if "constants" in sections else (),
        variables=loader.variable_list(sections["variables"], "/variables") if "variables" in sections else (),
        knowledge_base=loader.knowledge_base(sections["knowledge_base"]) if "knowledge_base" in sections else (),
        rules=loader.rules(sections["rules"]) if "rules" in sections else (),
        verifications=loader.verifications(sections["verifications"]) if "verifications" in sections else (),
        optimization=loader.optimization(sections["optimization"]) if "optimization" in sections else None,
        actions=loader.actions(sections["actions"]) if "actions" in sections else (),
    )
    if loader.diagnostics:
        raise ProgramError(sort_diagnostics(loader.diagnostics))
    return canonicalize(program)


def _pointer_join(path: str, key: str) -> str:
    return f"{path}/{key.replace('~', '~0').replace('/', '~1')}"
