"""Action orchestration: verdicts, optimization, backend selection,
differential checking, and the bounded repair loop.

Verification semantics is satisfiability of KB ∧ rules ∧ goal (SAT maps to
answer True, UNSAT to False). Because conjunction semantics cannot separate
"property violated" from "premises contradictory", every report also carries
base_consistent: the satisfiability of KB ∧ rules alone.

Backend "both" prefers the SMT solver and falls back to the finite
enumerator whenever the solver route returns UNKNOWN or fails; explicit
cross-backend comparison lives in differential_check, where closure-
sensitive programs (an effective existential over a declared sort) are
flagged and skipped rather than compared.
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

import requests

from .checker import TypedAssertion, TypedProgram, check_program
from .diagnostics import Diagnostic, ProgramError
from .finite import (
    DEFAULT_BUDGET,
    DEFAULT_INT_WINDOW,
    Assignment,
    Cell,
    DomainMap,
    NotFiniteError,
    Value,
    cell_term,
    enumerate_check,
    enumerate_optimize,
    eval_ground_term,
    ground_domains,
    model_cells,
)
from .loader import parse_program
from .program import ACTION_OPTIMIZE, ACTION_VERIFY, Verdict
from .rewrite import simplify, to_prenex
from .smtlib import emit_optimize, emit_smtlib, emit_value_queries
from .solver import (
    SolverConfig,
    SolverError,
    default_solver_config,
    parse_sexprs,
    run_solver,
    sexpr_to_value,
)
from .terms import Distinct, Eq, Exists, Implies, Neq, Not, Quantifier, SortKind, Term, children


@dataclass(frozen=True)
class EngineConfig:
    backend: str = "both"  # "smt" | "enum" | "both"
    solver: SolverConfig | None = None  # None: discover z3 / bundled wrapper
    int_window: tuple[int, int] = DEFAULT_INT_WINDOW
    enum_budget: int = DEFAULT_BUDGET
    transform: str = "none"  # "none" | "simplify" | "prenex"
    max_attempts: int = 3
    jobs: int = 1
    timeout_ms: int = 30_000

    def resolved_solver(self) -> SolverConfig | None:
        if self.solver is not None:
            return self.solver
        return default_solver_config(self.timeout_ms)


@dataclass(frozen=True)
class VerificationOutcome:
    name: str
    verdict: Verdict
    diagnostics: tuple[Diagnostic, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.verdict.status,
            "answer": self.verdict.answer,
            "model": self.verdict.model,
        }


@dataclass(frozen=True)
class OptimizationReport:
    status: str  # "OPTIMAL" | "INFEASIBLE" | "UNKNOWN"
    values: tuple[Fraction | int, ...] = ()
    model: str | None = None
    backend: str = ""
    diagnostics: tuple[Diagnostic, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "values": [_exact_json(v) for v in self.values],
            "model": self.model,
            "backend": self.backend,
        }


def _exact_json(value: Fraction | int) -> int | str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return str(value)
    return int(value)


@dataclass(frozen=True)
class Report:
    base_consistent: bool | None = None
    verifications: tuple[VerificationOutcome, ...] = ()
    optimization: OptimizationReport | None = None
    attempts_used: int = 1
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def answer(self) -> bool | None:
        """Overall boolean, present only for single-verification programs
        whose verdict is decided."""
        if len(self.verifications) != 1:
            return None
        return self.verifications[0].verdict.answer

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def to_json(self) -> dict[str, Any]:
        return {
            "base_consistent": self.base_consistent,
            "verifications": [v.to_json() for v in self.verifications],
            "optimization": self.optimization.to_json() if self.optimization else None,
            "attempts_used": self.attempts_used,
            "diagnostics": [d.to_json() for d in self.diagnostics],
        }


# -- transforms ---------------------------------------------------------------


def _transform_term(term: Term, mode: str) -> Term:
    if mode == "simplify":
        return simplify(term)
    if mode == "prenex":
        return to_prenex(term)
    return term


def apply_transform(tp: TypedProgram, mode: str) -> TypedProgram:
    """Rewrite every formula with simplify or to_prenex; verdict-preserving
    by construction (acceptance exercises this across the corpus)."""
    if mode == "none":
        return tp

    def on_assertions(assertions: tuple[TypedAssertion, ...]) -> tuple[TypedAssertion, ...]:
        return tuple(
            dataclasses.replace(a, formula=_transform_term(a.formula, mode)) for a in assertions
        )

    optimization = tp.optimization
    if optimization is not None:
        objectives = optimization.objectives
        if mode == "simplify":
            objectives = tuple(
                dataclasses.replace(o, expression=simplify(o.expression)) for o in objectives
            )
        optimization = dataclasses.replace(
            optimization, constraints=on_assertions(optimization.constraints), objectives=objectives
        )
    return dataclasses.replace(
        tp,
        knowledge=on_assertions(tp.knowledge),
        rules=on_assertions(tp.rules),
        goals=tuple(
            dataclasses.replace(g, formula=_transform_term(g.formula, mode)) for g in tp.goals
        ),
        optimization=optimization,
    )


# -- single-query backends ----------------------------------------------------


def _check_smt(
    tp: TypedProgram, goal: Term | None, solver: SolverConfig | None
) -> tuple[Verdict, tuple[Diagnostic, ...]]:
    if solver is None:
        return Verdict("UNKNOWN", backend="smt"), (
            Diagnostic(
                "SolverFailure",
                "no SMT solver available",
                hint="install z3 on PATH, or node with `npm install -g z3-solver`, or pass --solver-cmd",
            ),
        )
    script = emit_smtlib(tp, goal, produce_models=solver.produce_models)
    try:
        outcome = run_solver(script, solver)
    except SolverError as err:
        return Verdict("UNKNOWN", backend="smt"), (err.diagnostic,)
    model = outcome.model_text if outcome.status == "SAT" else None
    return Verdict(outcome.status, model=model, backend="smt"), outcome.diagnostics


def _check_enum(
    tp: TypedProgram, goal: Term | None, config: EngineConfig
) -> tuple[Verdict, tuple[Diagnostic, ...]]:
    try:
        domains = ground_domains(tp, config.int_window, config.enum_budget)
    except NotFiniteError as err:
        return Verdict("UNKNOWN", backend="enum"), (err.diagnostic,)
    outcome = enumerate_check(tp, goal, domains)
    model = outcome.assignment.render() if outcome.assignment else None
    return Verdict(outcome.status, model=model, backend="enum"), outcome.diagnostics


def check_satisfiable(
    tp: TypedProgram, goal: Term | None, config: EngineConfig
) -> tuple[Verdict, tuple[Diagnostic, ...]]:
    """One satisfiability query through the configured backend; "both" asks
    the solver first and falls back to the enumerator on UNKNOWN/failure."""
    if config.backend == "enum":
        return _check_enum(tp, goal, config)
    verdict, diags = _check_smt(tp, goal, config.resolved_solver())
    if config.backend == "smt" or verdict.status != "UNKNOWN":
        return verdict, diags
    enum_verdict, enum_diags = _check_enum(tp, goal, config)
    return enum_verdict, diags + enum_diags


def verify_program(tp: TypedProgram, config: EngineConfig) -> Report:
    """Base-consistency check plus one satisfiability verdict per
    verification, with the SAT->True / UNSAT->False answer mapping."""
    tp = apply_transform(tp, config.transform)
    base_verdict, base_diags = check_satisfiable(tp, None, config)

    def run_one(goal) -> VerificationOutcome:
        verdict, diags = check_satisfiable(tp, goal.formula, config)
        return VerificationOutcome(goal.name, verdict, diags)

    if config.jobs > 1 and len(tp.goals) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = tuple(pool.map(run_one, tp.goals))
    else:
        outcomes = tuple(run_one(goal) for goal in tp.goals)

    return Report(
        base_consistent=base_verdict.answer,
        verifications=outcomes,
        diagnostics=base_diags,
    )


def _parse_objective_values(objectives_text: str | None, count: int) -> list[Fraction | int] | None:
    """Values from a (get-objectives) block; None when any value is missing
    or non-finite (oo/epsilon from an unbounded objective)."""
    if not objectives_text:
        return None
    parsed = parse_sexprs(objectives_text)
    if not parsed or not isinstance(parsed[0], list) or not parsed[0] or parsed[0][0] != "objectives":
        return None
    entries = parsed[0][1:]
    if len(entries) != count:
        return None
    values: list[Fraction | int] = []
    for entry in entries:
        if not isinstance(entry, list) or len(entry) < 2:
            return None
        value = sexpr_to_value(entry[-1])
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            return None
        values.append(value)
    return values


def _optimize_enum(tp: TypedProgram, config: EngineConfig) -> OptimizationReport:
    try:
        domains = ground_domains(tp, config.int_window, config.enum_budget)
    except NotFiniteError as err:
        return OptimizationReport("UNKNOWN", backend="enum", diagnostics=(err.diagnostic,))
    outcome = enumerate_optimize(tp, domains)
    model = outcome.assignment.render() if outcome.assignment else None
    values = tuple(outcome.values) if outcome.values else ()
    return OptimizationReport(outcome.status, values, model, "enum", outcome.diagnostics)  # type: ignore[arg-type]


def optimize_program(tp: TypedProgram, config: EngineConfig) -> OptimizationReport:
    """Dispatch the optimization block. The solver route maps unsat to
    INFEASIBLE; an unbounded or undecided solver objective falls back to the
    finite enumerator (domain closure makes workforce-style assignment
    optima finite), reported transparently as backend "enum"."""
    tp = apply_transform(tp, config.transform)
    if tp.optimization is None or not tp.optimization.objectives:
        return OptimizationReport(
            "UNKNOWN",
            diagnostics=(
                Diagnostic("SchemaViolation", "the optimize action requires an optimization section with objectives"),
            ),
        )
    if config.backend == "enum":
        return _optimize_enum(tp, config)

    solver = config.resolved_solver()
    fallback_reason: Diagnostic | None = None
    if solver is None:
        fallback_reason = Diagnostic("SolverFailure", "no SMT solver available")
    else:
        script = emit_optimize(tp, produce_models=solver.produce_models)
        try:
            outcome = run_solver(script, solver)
        except SolverError as err:
            outcome = None
            fallback_reason = err.diagnostic
        if outcome is not None:
            if outcome.status == "UNSAT":
                return OptimizationReport(
                    "INFEASIBLE",
                    backend="smt",
                    diagnostics=(Diagnostic("Infeasible", "optimization constraints are unsatisfiable"),),
                )
            if outcome.status == "SAT":
                values = _parse_objective_values(outcome.objectives_text, len(tp.optimization.objectives))
                if values is not None:
                    return OptimizationReport(
                        "OPTIMAL", tuple(values), outcome.model_text, "smt", outcome.diagnostics
                    )
                fallback_reason = Diagnostic(
                    "UnsupportedConstruct",
                    "solver reported an unbounded or unparseable objective over the open universe; "
                    "falling back to the finite-domain optimum",
                )
            else:
                fallback_reason = Diagnostic("SolverFailure", "solver returned unknown for the optimization query")

    report = _optimize_enum(tp, config)
    extra = (fallback_reason,) if fallback_reason else ()
    return dataclasses.replace(report, diagnostics=extra + report.diagnostics)


# -- the action pipeline ------------------------------------------------------


def run_actions(source: str, config: EngineConfig) -> Report:
    """parse -> canonicalize -> typecheck -> dispatch each listed action.
    Diagnostics from any stage short-circuit the rest and are returned in
    full."""
    try:
        program = parse_program(source)
        tp = check_program(program)
    except ProgramError as err:
        return Report(diagnostics=tuple(err.diagnostics))

    if not program.actions:
        return Report(
            diagnostics=(
                Diagnostic("NoActions", "the program lists no actions", hint='add "actions": ["verify_conditions"]'),
            )
        )

    base_consistent: bool | None = None
    verifications: tuple[VerificationOutcome, ...] = ()
    optimization: OptimizationReport | None = None
    for action in program.actions:
        if action == ACTION_VERIFY:
            verify_report = verify_program(tp, config)
            base_consistent = verify_report.base_consistent
            verifications = verify_report.verifications
        elif action == ACTION_OPTIMIZE:
            optimization = optimize_program(tp, config)
    return Report(
        base_consistent=base_consistent,
        verifications=verifications,
        optimization=optimization,
    )


# -- model extraction and validation -------------------------------------------


def extract_smt_model(
    tp: TypedProgram, goal: Term | None, config: EngineConfig
) -> tuple[Assignment, DomainMap, tuple[int, ...]] | None:
    """Pull a concrete assignment out of the solver with a second query that
    appends (get-value ...) for every table cell and constant. Values keep
    the solver's own element identities, so aliased constants share an atom;
    declared-sort universes become the constants' value strings. Returns
    None when no model is available."""
    solver = config.resolved_solver()
    if solver is None:
        return None
    try:
        domains = ground_domains(tp, config.int_window, config.enum_budget)
    except NotFiniteError:
        return None
    cells = model_cells(tp, domains)
    declared = [
        name
        for name in tp.table.constant_order
        if name not in tp.table.enum_values
        and tp.table.constants.get(name) is not None
        and tp.table.constants[name].kind is SortKind.DECLARED  # type: ignore[union-attr]
    ]
    query_terms = [cell_term(Cell(name), tp) for name in declared]
    query_terms += [cell_term(cell, tp) for cell in cells]
    if not query_terms:
        script = emit_smtlib(tp, goal)
    else:
        script = emit_smtlib(tp, goal) + emit_value_queries(query_terms) + "\n"
    try:
        outcome = run_solver(script, solver)
    except SolverError:
        return None
    if outcome.status != "SAT":
        return None

    values: list = []
    if query_terms:
        body = outcome.raw.split("\n", 1)[1] if "\n" in outcome.raw else ""
        parsed = parse_sexprs(body)
        if not parsed or not isinstance(parsed[0], list) or len(parsed[0]) != len(query_terms):
            return None
        for entry in parsed[0]:
            if not isinstance(entry, list) or len(entry) != 2:
                return None
            values.append(sexpr_to_value(entry[1]))
        if any(v is None for v in values):
            return None

    constant_values = dict(zip(declared, values[: len(declared)]))
    cell_values = values[len(declared) :]
    extracted: dict[Cell, Value] = {Cell(name): value for name, value in constant_values.items()}
    for cell, value in zip(cells, cell_values):
        args = tuple(constant_values.get(a, a) if isinstance(a, str) else a for a in cell.args)
        extracted[Cell(cell.fn, args)] = value

    universes: dict = dict(domains.universes)
    for sort in tp.table.sorts.values():
        if sort.kind is SortKind.DECLARED:
            seen: list[Value] = []
            for name in tp.table.declared_constants(sort):
                value = constant_values.get(name, name)
                if value not in seen:
                    seen.append(value)
            universes[sort] = tuple(seen)
    atoms = frozenset(
        value for universe in universes.values() for value in universe if isinstance(value, str)
    ) | frozenset(v for v in tp.table.enum_values)
    extra_ints = tuple(
        sorted({v for v in extracted.values() if isinstance(v, int) and not isinstance(v, bool)})
    )
    return (
        Assignment(extracted, atoms),
        DomainMap(universes, domains.int_window, domains.budget),
        extra_ints,
    )


def verify_model(
    tp: TypedProgram,
    goal: Term | None,
    assignment: Assignment,
    domains: DomainMap,
    extra_ints: tuple[int, ...] = (),
) -> list[str]:
    """Re-evaluate every knowledge entry, every rule (its grounded instances
    via quantifier expansion), and the goal under a concrete assignment.
    Returns the labels of anything that does not evaluate to true."""
    failures = []
    checks: list[tuple[str, Term]] = [(a.label, a.formula) for a in tp.assertions]
    if goal is not None:
        checks.append(("goal", goal))
    for label, formula in checks:
        value = eval_ground_term(formula, assignment, domains, extra_ints=extra_ints)
        if value is not True:
            failures.append(label)
    return failures


# -- differential checking ----------------------------------------------------


def closure_sensitive(formulas: Iterable[Term]) -> bool:
    """True when domain closure can change the verdict: some quantifier is
    effectively existential (Exists in positive polarity, or ForAll under
    negation) over a declared sort. Bool-sorted equality hosts both
    polarities, so its operands are scanned conservatively."""
    sensitive = False

    def visit(term: Term, positive: bool) -> None:
        nonlocal sensitive
        if sensitive:
            return
        if isinstance(term, Quantifier):
            effective_exists = isinstance(term, Exists) == positive
            if effective_exists and any(
                b.sort is not None and b.sort.kind is SortKind.DECLARED for b in term.binders
            ):
                sensitive = True
                return
            visit(term.body, positive)
            return
        if isinstance(term, Not):
            visit(term.operand, not positive)
            return
        if isinstance(term, Implies):
            visit(term.lhs, not positive)
            visit(term.rhs, positive)
            return
        if isinstance(term, (Eq, Neq, Distinct)):
            for child in children(term):
                visit(child, positive)
                visit(child, not positive)
            return
        for child in children(term):
            visit(child, positive)

    for formula in formulas:
        visit(formula, True)
    return sensitive


@dataclass(frozen=True)
class ComparisonCase:
    name: str
    smt_status: str | None
    enum_status: str | None
    skipped: bool = False
    reason: str | None = None

    @property
    def agrees(self) -> bool | None:
        if self.skipped or self.smt_status is None or self.enum_status is None:
            return None
        if "UNKNOWN" in (self.smt_status, self.enum_status):
            return None
        return self.smt_status == self.enum_status

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "smt": self.smt_status,
            "enum": self.enum_status,
            "skipped": self.skipped,
            "reason": self.reason,
            "agree": self.agrees,
        }


@dataclass(frozen=True)
class AgreementReport:
    cases: tuple[ComparisonCase, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def defects(self) -> tuple[ComparisonCase, ...]:
        return tuple(c for c in self.cases if c.agrees is False)

    def to_json(self) -> dict[str, Any]:
        return {
            "cases": [c.to_json() for c in self.cases],
            "defects": [c.name for c in self.defects],
            "diagnostics": [d.to_json() for d in self.diagnostics],
        }


def differential_check(source: str, config: EngineConfig) -> AgreementReport:
    """Run both backends and compare statuses. Closure-sensitive queries are
    flagged and skipped (domain closure legitimately changes their meaning);
    any other non-UNKNOWN disagreement is a defect in one of the backends."""
    try:
        tp = check_program(parse_program(source))
    except ProgramError as err:
        return AgreementReport(diagnostics=tuple(err.diagnostics))
    tp = apply_transform(tp, config.transform)

    solver = config.resolved_solver()
    smt_config = dataclasses.replace(config, backend="smt", solver=solver)
    enum_config = dataclasses.replace(config, backend="enum")
    base_formulas = [a.formula for a in tp.assertions]

    cases: list[ComparisonCase] = []

    def compare_goal(name: str, goal: Term | None, formulas: list[Term]) -> None:
        if closure_sensitive(formulas):
            cases.append(ComparisonCase(name, None, None, True, "closure-sensitive"))
            return
        if solver is None:
            cases.append(ComparisonCase(name, None, None, True, "no SMT solver available"))
            return
        smt_verdict, _ = _check_smt(tp, goal, solver)
        enum_verdict, _ = _check_enum(tp, goal, enum_config)
        cases.append(ComparisonCase(name, smt_verdict.status, enum_verdict.status))

    if tp.goals or ACTION_VERIFY in tp.program.actions:
        compare_goal("base", None, base_formulas)
        for goal in tp.goals:
            compare_goal(goal.name, goal.formula, base_formulas + [goal.formula])

    if tp.optimization is not None and tp.optimization.objectives:
        constraint_formulas = base_formulas + [c.formula for c in tp.optimization.constraints]
        if closure_sensitive(constraint_formulas):
            cases.append(ComparisonCase("optimization", None, None, True, "closure-sensitive"))
        elif solver is None:
            cases.append(ComparisonCase("optimization", None, None, True, "no SMT solver available"))
        else:
            smt_report = optimize_program(tp, smt_config)
            enum_report = optimize_program(tp, enum_config)
            smt_status, enum_status = smt_report.status, enum_report.status
            if (
                smt_status == enum_status == "OPTIMAL"
                and tuple(smt_report.values) != tuple(enum_report.values)
            ):
                smt_status = f"OPTIMAL{list(map(str, smt_report.values))}"
                enum_status = f"OPTIMAL{list(map(str, enum_report.values))}"
            cases.append(ComparisonCase("optimization", smt_status, enum_status))

    return AgreementReport(tuple(cases))


# -- repair loop ---------------------------------------------------------------


@dataclass(frozen=True)
class AttemptRecord:
    source: str
    report: Report


@dataclass(frozen=True)
class RepairOutcome:
    report: Report
    attempts: tuple[AttemptRecord, ...]
    reviser_error: str | None = None

    @property
    def attempts_used(self) -> int:
        return len(self.attempts)

    @property
    def succeeded(self) -> bool:
        return self.report.ok

    def to_json(self) -> dict[str, Any]:
        return {
            "report": self.report.to_json(),
            "attempts_used": self.attempts_used,
            "reviser_error": self.reviser_error,
            "attempts": [
                {"program": a.source, "diagnostics": [d.to_json() for d in a.report.diagnostics]}
                for a in self.attempts
            ],
        }


def call_reviser(url: str, source: str, diagnostics: tuple[Diagnostic, ...], attempt: int) -> str:
    """POST the wire-contract request; returns the replacement document.
    Raises ReviserUnreachable on any transport or protocol failure."""
    body = {
        "program": source,
        "diagnostics": [d.to_json() for d in diagnostics],
        "attempt": attempt,
    }
    try:
        response = requests.post(url, json=body, timeout=60)
    except requests.RequestException as err:
        raise ReviserUnreachable(f"reviser unreachable: {err}") from err
    if response.status_code != 200:
        raise ReviserUnreachable(f"reviser returned HTTP {response.status_code}")
    try:
        replacement = response.json()["program"]
    except (ValueError, KeyError) as err:
        raise ReviserUnreachable(f"reviser returned a malformed body: {err}") from err
    if not isinstance(replacement, str):
        raise ReviserUnreachable("reviser response field 'program' must be a string")
    return replacement


class ReviserUnreachable(Exception):
    pass


def repair_loop(
    source: str,
    reviser_url: str | None,
    config: EngineConfig,
) -> RepairOutcome:
    """Bounded retry: run the pipeline, send diagnostics to the reviser, and
    retry with its replacement program — at most config.max_attempts runs
    (by default the initial attempt plus two revisions)."""
    attempts: list[AttemptRecord] = []
    reviser_error: str | None = None
    current = source
    for attempt in range(1, max(1, config.max_attempts) + 1):
        report = run_actions(current, config)
        attempts.append(AttemptRecord(current, report))
        if report.ok:
            break
        if attempt >= config.max_attempts or reviser_url is None:
            break
        try:
            current = call_reviser(reviser_url, current, report.diagnostics, attempt)
        except ReviserUnreachable as err:
            reviser_error = str(err)
            break
    final = dataclasses.replace(attempts[-1].report, attempts_used=len(attempts))
    return RepairOutcome(final, tuple(attempts), reviser_error)


def report_to_json_text(payload: Any) -> str:
    """Stable, byte-reproducible JSON rendering used everywhere output is
    compared or checked in."""
    return json.dumps(payload, indent=2, sort_keys=False, ensure_ascii=False) + "\n"
