"""SMT-LIB2 script emission from typed programs.

Scripts are built deterministically (byte-identical output for identical
input): header, sort declarations in declaration order, function and
constant declarations, one assert per knowledge entry and per rule, the
optional goal assert, then the command tail. Decimal literals are emitted
in exact rational form, e.g. (/ 49 20) for 2.45, so solver-side parsing
cannot drift from the DSL's exact-rational semantics. Int-sorted operands
meeting Real siblings are widened explicitly with to_real.
"""

from __future__ import annotations

import re

from .checker import TypedProgram
from .diagnostics import Diagnostic, ProgramError, SourceSpan
from .terms import (
    Add,
    And,
    Apply,
    BinArith,
    BoolLit,
    Compare,
    Distinct,
    Eq,
    ForAll,
    Ge,
    Gt,
    Implies,
    IntLit,
    Le,
    Lt,
    Mul,
    Neg,
    Neq,
    Not,
    Or,
    Quantifier,
    RatLit,
    Sort,
    SortKind,
    SymbolRef,
    Sub,
    Term,
)

_SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*\Z")

# Reserved words and theory symbols that must be |quoted| when users pick
# them as identifiers. Deliberately generous: quoting a symbol that did not
# strictly need it is harmless.
_RESERVED = frozenset(
    """
    assert check-sat check-sat-assuming declare-const declare-datatype
    declare-datatypes declare-fun declare-sort define-fun define-fun-rec
    define-sort echo exit get-assertions get-assignment get-info get-model
    get-option get-proof get-unsat-assumptions get-unsat-core get-value
    minimize maximize get-objectives pop push reset reset-assertions
    set-info set-logic set-option
    BINARY DECIMAL HEXADECIMAL NUMERAL STRING
    let forall exists match par as _ ! true false
    and or not xor => = distinct ite
    Bool Int Real BitVec Array
    + - * / div mod abs to_real to_int is_int
    select store concat extract
    """.split()
)

_CMP_OP = {Eq: "=", Lt: "<", Le: "<=", Gt: ">", Ge: ">="}
_ARITH_OP = {Add: "+", Sub: "-", Mul: "*"}


def smt_symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.match(name) and name not in _RESERVED:
        return name
    if "|" in name or "\\" in name:
        raise ProgramError(
            [Diagnostic("UnsupportedConstruct", f"identifier {name!r} cannot be represented as an SMT symbol", SourceSpan(""))]
        )
    return f"|{name}|"


def _sort_name(sort: Sort) -> str:
    if sort.kind is SortKind.BOOL and sort.name == "Bool":
        return "Bool"
    if sort.kind is SortKind.INT and sort.name == "Int":
        return "Int"
    if sort.kind is SortKind.REAL and sort.name == "Real":
        return "Real"
    return smt_symbol(sort.name)


def _declare_sorts(tp: TypedProgram, lines: list[str]) -> None:
    for decl in tp.program.sorts:
        name = smt_symbol(decl.name)
        if decl.kind is SortKind.DECLARED:
            lines.append(f"(declare-sort {name} 0)")
        elif decl.kind is SortKind.ENUM:
            values = " ".join(f"({smt_symbol(v)})" for v in decl.values)
            lines.append(f"(declare-datatypes (({name} 0)) (({values})))")
        elif decl.kind is SortKind.BITVEC:
            lines.append(f"(define-sort {name} () (_ BitVec {decl.width}))")
        else:
            target = {SortKind.BOOL: "Bool", SortKind.INT: "Int", SortKind.REAL: "Real"}[decl.kind]
            if decl.name != target:
                lines.append(f"(define-sort {name} () {target})")
            # a sort literally named Bool/Int/Real with the matching builtin
            # kind is the builtin; re-defining it would be an error


def _declare_symbols(tp: TypedProgram, lines: list[str]) -> None:
    for fn in tp.program.functions:
        resolved = tp.table.functions[fn.name]
        domain = " ".join(_sort_name(s) for s in resolved.domain if s is not None)
        lines.append(f"(declare-fun {smt_symbol(fn.name)} ({domain}) {_sort_name(resolved.range)})")  # type: ignore[arg-type]
    for group in tp.program.constants:
        for member in group.members:
            member_sort = tp.table.constants[member]
            lines.append(f"(declare-fun {smt_symbol(member)} () {_sort_name(member_sort)})")  # type: ignore[arg-type]
    for name, sort in tp.implicit_constants:
        lines.append(f"(declare-fun {smt_symbol(name)} () {_sort_name(sort)})")


def emit_term(term: Term, widen_to_real: bool = False) -> str:
    """Render one typed term as an SMT-LIB s-expression."""
    needs_widening = (
        widen_to_real and term.sort is not None and term.sort.kind is SortKind.INT
    )
    text = _emit(term)
    if needs_widening:
        return f"(to_real {text})"
    return text


def _emit(term: Term) -> str:
    if isinstance(term, BoolLit):
        return "true" if term.value else "false"
    if isinstance(term, IntLit):
        return str(term.value) if term.value >= 0 else f"(- {-term.value})"
    if isinstance(term, RatLit):
        value = term.value
        if value < 0:
            return f"(- (/ {-value.numerator} {value.denominator}))"
        return f"(/ {value.numerator} {value.denominator})"
    if isinstance(term, SymbolRef):
        return smt_symbol(term.name)
    if isinstance(term, Apply):
        if not term.args:
            return smt_symbol(term.name)
        args = " ".join(_emit(a) for a in term.args)
        return f"({smt_symbol(term.name)} {args})"
    if isinstance(term, Neq):
        lhs, rhs = _widened_pair(term.lhs, term.rhs)
        return f"(distinct {lhs} {rhs})"
    if isinstance(term, Compare):
        lhs, rhs = _widened_pair(term.lhs, term.rhs)
        return f"({_CMP_OP[type(term)]} {lhs} {rhs})"
    if isinstance(term, BinArith):
        real = term.sort is not None and term.sort.kind is SortKind.REAL
        lhs = emit_term(term.lhs, widen_to_real=real)
        rhs = emit_term(term.rhs, widen_to_real=real)
        return f"({_ARITH_OP[type(term)]} {lhs} {rhs})"
    if isinstance(term, Neg):
        return f"(- {_emit(term.operand)})"
    if isinstance(term, And):
        if len(term.args) == 1:
            return _emit(term.args[0])
        return f"(and {' '.join(_emit(a) for a in term.args)})"
    if isinstance(term, Or):
        if len(term.args) == 1:
            return _emit(term.args[0])
        return f"(or {' '.join(_emit(a) for a in term.args)})"
    if isinstance(term, Not):
        return f"(not {_emit(term.operand)})"
    if isinstance(term, Implies):
        return f"(=> {_emit(term.lhs)} {_emit(term.rhs)})"
    if isinstance(term, Distinct):
        if len(term.args) == 1:
            return "true"
        widen = any(a.sort is not None and a.sort.kind is SortKind.REAL for a in term.args)
        args = " ".join(emit_term(a, widen_to_real=widen) for a in term.args)
        return f"(distinct {args})"
    if isinstance(term, Quantifier):
        binders = " ".join(f"({smt_symbol(b.name)} {_sort_name(b.sort)})" for b in term.binders)  # type: ignore[arg-type]
        head = "forall" if isinstance(term, ForAll) else "exists"
        return f"({head} ({binders}) {_emit(term.body)})"
    raise ProgramError(
        [Diagnostic("UnsupportedConstruct", f"cannot emit term node {type(term).__name__}", SourceSpan(""))]
    )


def _widened_pair(lhs: Term, rhs: Term) -> tuple[str, str]:
    widen = any(t.sort is not None and t.sort.kind is SortKind.REAL for t in (lhs, rhs))
    return emit_term(lhs, widen_to_real=widen), emit_term(rhs, widen_to_real=widen)


def _core(tp: TypedProgram, lines: list[str]) -> None:
    lines.append("(set-logic ALL)")
    _declare_sorts(tp, lines)
    _declare_symbols(tp, lines)
    for assertion in tp.knowledge:
        lines.append(f"(assert {_emit(assertion.formula)})")
    for rule in tp.rules:
        lines.append(f"(assert {_emit(rule.formula)})")


def emit_smtlib(tp: TypedProgram, goal: Term | None = None, produce_models: bool = False) -> str:
    """Script for one satisfiability query over KB ∧ rules (∧ goal)."""
    lines: list[str] = []
    _core(tp, lines)
    if goal is not None:
        lines.append(f"(assert {_emit(goal)})")
    lines.append("(check-sat)")
    if produce_models:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def emit_optimize(tp: TypedProgram, produce_models: bool = False) -> str:
    """Script for the optimization action: core + optimization constraints +
    minimize/maximize per objective in declaration order + (get-objectives)."""
    if tp.optimization is None or not tp.optimization.objectives:
        raise ProgramError(
            [Diagnostic("SchemaViolation", "optimization with at least one objective is required", SourceSpan("/optimization"))]
        )
    lines: list[str] = []
    _core(tp, lines)
    for constraint in tp.optimization.constraints:
        lines.append(f"(assert {_emit(constraint.formula)})")
    for objective in tp.optimization.objectives:
        lines.append(f"({objective.kind} {_emit(objective.expression)})")
    lines.append("(check-sat)")
    if produce_models:
        lines.append("(get-model)")
    lines.append("(get-objectives)")
    return "\n".join(lines) + "\n"


def emit_value_queries(cells: list[Term]) -> str:
    """A (get-value ...) command for model extraction; one term per cell."""
    rendered = " ".join(_emit(cell) for cell in cells)
    return f"(get-value ({rendered}))"
