"""Type checking: surface terms -> fully typed programs.

Every expression is re-built with a sort annotation on each node. Errors do
not abort: the checker poisons unknown sorts (None) and keeps collecting so
the repair loop sees every independent problem in one pass. Diagnostics come
back stably ordered by (path, offset).

Numeric typing follows the Int->Real widening rule: integer literals and
Int-sorted terms are acceptable wherever a Real is expected, never the other
way round. Equality (and Distinct) demands identical sorts except that mixed
Int/Real operands are compared as Reals.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .diagnostics import Diagnostic, ProgramError, SourceSpan, sort_diagnostics
from .program import (
    ACTION_OPTIMIZE,
    KnowledgeEntry,
    Program,
    Rule,
    VariableDecl,
    Verification,
)
from .symtab import SymbolTable, try_build_symbol_table
from .terms import (
    BOOL,
    INT,
    REAL,
    And,
    Apply,
    BinArith,
    BoolLit,
    Compare,
    Distinct,
    Eq,
    Exists,
    ForAll,
    Implies,
    IntLit,
    Neg,
    Neq,
    Not,
    Or,
    Quantifier,
    RatLit,
    Sort,
    SortKind,
    SymbolRef,
    Term,
    VarBind,
)


@dataclass(frozen=True)
class TypedAssertion:
    label: str
    formula: Term
    path: str


@dataclass(frozen=True)
class TypedGoal:
    name: str
    formula: Term
    path: str


@dataclass(frozen=True)
class TypedObjective:
    kind: str  # "minimize" | "maximize"
    expression: Term
    label: str
    path: str


@dataclass(frozen=True)
class TypedOptimization:
    constraints: tuple[TypedAssertion, ...]
    objectives: tuple[TypedObjective, ...]


@dataclass(frozen=True)
class TypedProgram:
    program: Program
    table: SymbolTable
    knowledge: tuple[TypedAssertion, ...]
    rules: tuple[TypedAssertion, ...]
    goals: tuple[TypedGoal, ...]
    optimization: TypedOptimization | None
    implicit_constants: tuple[tuple[str, Sort], ...]

    @property
    def assertions(self) -> tuple[TypedAssertion, ...]:
        """The base: knowledge entries followed by rules."""
        return self.knowledge + self.rules


def same_sort(a: Sort, b: Sort) -> bool:
    """Sort identity for typing: primitive kinds are transparent to aliasing
    (a sort named TimeSlot with IntSort kind is an Int), while declared, enum
    and bitvector sorts are nominal."""
    if a.kind != b.kind:
        return False
    if a.kind in (SortKind.BOOL, SortKind.INT, SortKind.REAL):
        return True
    if a.kind is SortKind.BITVEC:
        return a.width == b.width
    return a.name == b.name


def assignable(actual: Sort, expected: Sort) -> bool:
    if same_sort(actual, expected):
        return True
    return actual.kind is SortKind.INT and expected.kind is SortKind.REAL


class _Checker:
    def __init__(self, table: SymbolTable, diagnostics: list[Diagnostic]):
        self.table = table
        self.diagnostics = diagnostics
        self.implicit_constants: list[tuple[str, Sort]] = []
        self.implicit_mode = False
        self.templates: dict[str, Sort | None] = {}

    def error(self, category: str, message: str, path: str, term: Term | None = None, hint: str | None = None) -> None:
        span = term.span if term is not None and term.span else (0, 0)
        self.diagnostics.append(Diagnostic(category, message, SourceSpan(path, span[0], span[1]), hint))

    def check(self, term: Term, path: str, expected: Sort | None = None) -> Term:
        typed = self._infer(term, path)
        if expected is not None and typed.sort is not None and not assignable(typed.sort, expected):
            self.error(
                "SortMismatch",
                f"expected {expected}, got {typed.sort}",
                path,
                term,
            )
        return typed

    def _infer(self, term: Term, path: str) -> Term:
        if isinstance(term, BoolLit):
            return replace(term, sort=BOOL)
        if isinstance(term, IntLit):
            return replace(term, sort=INT)
        if isinstance(term, RatLit):
            return replace(term, sort=REAL)
        if isinstance(term, SymbolRef):
            return self._symbol(term, path)
        if isinstance(term, Apply):
            return self._apply(term, path)
        if isinstance(term, Compare):
            return self._compare(term, path)
        if isinstance(term, (BinArith, Neg)):
            return self._arith(term, path)
        if isinstance(term, (And, Or)):
            args = tuple(self.check(a, path, BOOL) for a in term.args)
            return replace(term, args=args, sort=BOOL)
        if isinstance(term, Not):
            return replace(term, operand=self.check(term.operand, path, BOOL), sort=BOOL)
        if isinstance(term, Implies):
            return replace(
                term,
                lhs=self.check(term.lhs, path, BOOL),
                rhs=self.check(term.rhs, path, BOOL),
                sort=BOOL,
            )
        if isinstance(term, Distinct):
            return self._distinct(term, path)
        if isinstance(term, Quantifier):
            return self._quantifier(term, path)
        raise TypeError(f"unknown term node {type(term).__name__}")

    def _symbol(self, term: SymbolRef, path: str) -> Term:
        found, sort = self.table.lookup_variable(term.name)
        if found:
            return replace(term, sort=sort)
        if term.name in self.table.constants:
            return replace(term, sort=self.table.constants[term.name])
        fn = self.table.functions.get(term.name)
        if fn is not None:
            if fn.domain:
                self.error(
                    "ArityMismatch",
                    f"function {term.name!r} expects {len(fn.domain)} argument(s); referenced without arguments",
                    path,
                    term,
                )
                return replace(term, sort=None)
            return Apply(term.name, (), span=term.span, sort=fn.range)
        if term.name in self.table.var_templates:
            self.error(
                "UnboundVariable",
                f"declared variable {term.name!r} occurs free; bind it with a quantifier",
                path,
                term,
            )
            return replace(term, sort=self.table.var_templates[term.name])
        if self.implicit_mode:
            self.table.constants[term.name] = INT
            self.table.constant_order.append(term.name)
            self.implicit_constants.append((term.name, INT))
            return replace(term, sort=INT)
        self.error("UndefinedSymbol", f"undefined symbol {term.name!r}", path, term)
        return replace(term, sort=None)

    def _apply(self, term: Apply, path: str) -> Term:
        fn = self.table.functions.get(term.name)
        if fn is None:
            hint = None
            if term.name in self.table.constants or self.table.lookup_variable(term.name)[0]:
                hint = f"{term.name!r} is not a function"
            self.error("UndefinedSymbol", f"undefined function {term.name!r}", path, term, hint)
            args = tuple(self.check(a, path) for a in term.args)
            return replace(term, args=args, sort=None)
        if len(term.args) != len(fn.domain):
            self.error(
                "ArityMismatch",
                f"function {term.name!r} expects {len(fn.domain)} argument(s), got {len(term.args)}",
                path,
                term,
            )
            args = tuple(self.check(a, path) for a in term.args)
            return replace(term, args=args, sort=fn.range)
        args = tuple(
            self.check(arg, path, expected) for arg, expected in zip(term.args, fn.domain)
        )
        return replace(term, args=args, sort=fn.range)

    def _compare(self, term: Compare, path: str) -> Term:
        lhs = self.check(term.lhs, path)
        rhs = self.check(term.rhs, path)
        ls, rs = lhs.sort, rhs.sort
        if ls is not None and rs is not None:
            if isinstance(term, (Eq, Neq)):
                if not (ls.is_numeric() and rs.is_numeric()) and not same_sort(ls, rs):
                    self.error("SortMismatch", f"cannot compare {ls} with {rs}", path, term)
            elif not (ls.is_numeric() and rs.is_numeric()):
                self.error(
                    "SortMismatch",
                    f"ordering comparison needs numeric operands, got {ls} and {rs}",
                    path,
                    term,
                )
        return replace(term, lhs=lhs, rhs=rhs, sort=BOOL)

    def _arith(self, term: Term, path: str) -> Term:
        if isinstance(term, Neg):
            operand = self.check(term.operand, path)
            sort = operand.sort
            if sort is not None and not sort.is_numeric():
                self.error("SortMismatch", f"negation needs a numeric operand, got {sort}", path, term)
                sort = None
            return replace(term, operand=operand, sort=sort)
        assert isinstance(term, BinArith)
        lhs = self.check(term.lhs, path)
        rhs = self.check(term.rhs, path)
        sort: Sort | None = None
        if lhs.sort is not None and rhs.sort is not None:
            if lhs.sort.is_numeric() and rhs.sort.is_numeric():
                sort = REAL if SortKind.REAL in (lhs.sort.kind, rhs.sort.kind) else INT
            else:
                op = {"Add": "+", "Sub": "-", "Mul": "*"}[type(term).__name__]
                self.error(
                    "SortMismatch",
                    f"operator {op} needs numeric operands, got {lhs.sort} and {rhs.sort}",
                    path,
                    term,
                )
        return replace(term, lhs=lhs, rhs=rhs, sort=sort)

    def _distinct(self, term: Distinct, path: str) -> Term:
        args = tuple(self.check(a, path) for a in term.args)
        sorts = [a.sort for a in args if a.sort is not None]
        if sorts:
            if all(s.is_numeric() for s in sorts):
                pass
            else:
                first = sorts[0]
                for other in sorts[1:]:
                    if not same_sort(first, other):
                        self.error(
                            "SortMismatch",
                            f"Distinct operands must share a sort, got {first} and {other}",
                            path,
                            term,
                        )
                        break
        return replace(term, args=args, sort=BOOL)

    def _quantifier(self, term: Quantifier, path: str) -> Term:
        bindings: dict[str, Sort | None] = {}
        binders: list[VarBind] = []
        for binder in term.binders:
            if binder.name in bindings:
                self.error(
                    "DuplicateName",
                    f"variable {binder.name!r} bound twice in one quantifier",
                    path,
                    term,
                )
            self._reject_function_shadow(binder.name, path)
            sort = binder.sort
            if sort is None:
                sort = self._binder_sort(binder.name, path, term)
            bindings[binder.name] = sort
            binders.append(VarBind(binder.name, sort))
        self.table.push_scope(bindings)
        try:
            body = self.check(term.body, path, BOOL)
        finally:
            self.table.pop_scope()
        return type(term)(tuple(binders), body, span=term.span, sort=BOOL)

    def _reject_function_shadow(self, name: str, path: str) -> None:
        """Binders may shadow constants (lookup is innermost-first, matching
        SMT-LIB scoping), but shadowing an applicable function would split
        the name into two namespaces; reject it."""
        fn = self.table.functions.get(name)
        if fn is not None and fn.domain:
            self.diagnostics.append(
                Diagnostic(
                    "DuplicateName",
                    f"bound variable {name!r} shadows a function",
                    SourceSpan(path),
                )
            )

    def _binder_sort(self, name: str, path: str, term: Term) -> Sort | None:
        """Inline quantifiers bind bare names; their sorts come from the
        enclosing entry's variables list, falling back to the top-level
        variable templates."""
        if name in self.templates:
            return self.templates[name]
        if name in self.table.var_templates:
            return self.table.var_templates[name]
        self.error(
            "UnboundVariable",
            f"no sort declared for quantified variable {name!r}",
            path,
            term,
            hint=f"declare {name!r} in the variables section or on this entry",
        )
        return None

    # -- program-level helpers ------------------------------------------

    def resolve_binders(self, decls: tuple[VariableDecl, ...]) -> tuple[VarBind, ...]:
        out = []
        seen = set()
        for decl in decls:
            if decl.name in seen:
                self.error("DuplicateName", f"variable {decl.name!r} bound twice in one binder", decl.path)
            seen.add(decl.name)
            self._reject_function_shadow(decl.name, decl.path)
            sort = self.table.resolve_sort(decl.sort)
            if sort is None:
                self.diagnostics.append(
                    Diagnostic("UnknownSort", f"unknown sort {decl.sort!r}", SourceSpan(f"{decl.path}/sort"))
                )
            out.append(VarBind(decl.name, sort))
        return tuple(out)

    def check_bound(self, binders: tuple[VarBind, ...], parts: list[tuple[Term, str]]) -> list[Term]:
        """Check formulas under a binder scope; scope is always rebalanced."""
        self.table.push_scope({b.name: b.sort for b in binders})
        try:
            return [self.check(term, path, BOOL) for term, path in parts]
        finally:
            self.table.pop_scope()


def check_term(
    term: Term,
    table: SymbolTable,
    expected: Sort | None = None,
    templates: dict[str, Sort] | None = None,
    path: str = "",
) -> Term:
    """Type one surface term against a built table. Raises ProgramError with
    every diagnostic found; the scope stack is left exactly as deep as it was
    on entry even on the error path."""
    diags: list[Diagnostic] = []
    checker = _Checker(table, diags)
    checker.templates = dict(templates or {})
    typed = checker.check(term, path, expected)
    if diags:
        raise ProgramError(sort_diagnostics(diags))
    return typed


def check_program(program: Program) -> TypedProgram:
    """Build the symbol table and type every expression in the program.

    Knowledge entries with value=false come back wrapped as Not(...); rules
    and verifications become closed formulas with their binders attached. On
    any failure raises ProgramError carrying the complete diagnostic list,
    stably ordered by (path, offset)."""
    table, diags = try_build_symbol_table(program)
    checker = _Checker(table, diags)

    knowledge: list[TypedAssertion] = []
    for entry in program.knowledge_base:
        checker.templates = _entry_templates(checker, entry)
        typed = checker.check(entry.assertion, entry.assertion_path or entry.path, BOOL)
        checker.templates = {}
        if entry.value is False:
            typed = Not(typed, span=typed.span, sort=BOOL)
        knowledge.append(TypedAssertion(entry.text, typed, entry.path))

    rules: list[TypedAssertion] = []
    for rule in program.rules:
        rules.append(TypedAssertion(rule.name, _rule_formula(checker, rule), rule.path))

    goals: list[TypedGoal] = []
    for verification in program.verifications:
        goals.append(TypedGoal(verification.name, _goal_formula(checker, verification), verification.path))

    optimization = _optimization(checker, program)

    if diags:
        raise ProgramError(sort_diagnostics(diags))
    return TypedProgram(
        program=program,
        table=table,
        knowledge=tuple(knowledge),
        rules=tuple(rules),
        goals=tuple(goals),
        optimization=optimization,
        implicit_constants=tuple(checker.implicit_constants),
    )


def _entry_templates(checker: _Checker, entry: KnowledgeEntry) -> dict[str, Sort | None]:
    templates: dict[str, Sort | None] = {}
    for decl in entry.variables:
        sort = checker.table.resolve_sort(decl.sort)
        if sort is None:
            checker.diagnostics.append(
                Diagnostic("UnknownSort", f"unknown sort {decl.sort!r}", SourceSpan(f"{decl.path}/sort"))
            )
        templates[decl.name] = sort
    return templates


def _rule_formula(checker: _Checker, rule: Rule) -> Term:
    binders = checker.resolve_binders(rule.binders)
    if rule.constraint is not None:
        body = checker.check_bound(binders, [(rule.constraint, f"{rule.path}/constraint")])[0]
    else:
        assert rule.antecedent is not None and rule.consequent is not None
        ante, cons = checker.check_bound(
            binders,
            [
                (rule.antecedent, f"{rule.path}/implies/antecedent"),
                (rule.consequent, f"{rule.path}/implies/consequent"),
            ],
        )
        body = Implies(ante, cons, sort=BOOL)
    if binders:
        return ForAll(binders, body, sort=BOOL)
    return body


def _goal_formula(checker: _Checker, verification: Verification) -> Term:
    binders = checker.resolve_binders(verification.binders)
    if verification.constraint is not None:
        body = checker.check_bound(binders, [(verification.constraint, f"{verification.path}/constraint")])[0]
        if not binders:
            return body
        wrapper = Exists if verification.quantifier == "exists" else ForAll
        return wrapper(binders, body, sort=BOOL)
    assert verification.antecedent is not None and verification.consequent is not None
    ante, cons = checker.check_bound(
        binders,
        [
            (verification.antecedent, f"{verification.path}/implies/antecedent"),
            (verification.consequent, f"{verification.path}/implies/consequent"),
        ],
    )
    body = Implies(ante, cons, sort=BOOL)
    if binders:
        return ForAll(binders, body, sort=BOOL)
    return body


def _optimization(checker: _Checker, program: Program) -> TypedOptimization | None:
    spec = program.optimization
    wants_optimize = ACTION_OPTIMIZE in program.actions
    if spec is None:
        if wants_optimize:
            checker.diagnostics.append(
                Diagnostic(
                    "SchemaViolation",
                    "the optimize action requires an optimization section",
                    SourceSpan("/actions"),
                )
            )
        return None
    checker.implicit_mode = True
    try:
        constraints = tuple(
            TypedAssertion(f"optimization constraint {i}", checker.check(term, path, BOOL), path)
            for i, (term, path) in enumerate(spec.constraints)
        )
        objectives = []
        for objective in spec.objectives:
            typed = checker.check(objective.expression, f"{objective.path}/expression")
            if typed.sort is not None and not typed.sort.is_numeric():
                checker.error(
                    "SortMismatch",
                    f"objective must be Int or Real, got {typed.sort}",
                    f"{objective.path}/expression",
                    objective.expression,
                )
            objectives.append(TypedObjective(objective.kind, typed, objective.text, objective.path))
    finally:
        checker.implicit_mode = False
    if wants_optimize and not objectives:
        checker.diagnostics.append(
            Diagnostic(
                "SchemaViolation",
                "the optimize action requires at least one objective",
                SourceSpan(f"{spec.path}/objectives"),
            )
        )
    return TypedOptimization(constraints, tuple(objectives))
