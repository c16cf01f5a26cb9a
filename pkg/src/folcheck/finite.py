"""Brute-force model enumeration over finite/bounded domains.

This backend is the trusted oracle: a plain exhaustive depth-first search
over explicit function tables, with no clause learning, no symmetry
breaking and no sampling. Two conventions make it finite:

* domain closure — a declared sort's universe is exactly its named
  constants (each constant its own atom; aliasing is not explored), and
* an integer window — Int-sorted cells and quantifiers range over a
  configurable [lo, hi] interval.

Ground equalities, bare Bool atoms and negated atoms in the asserted
conjuncts pin their table cells before the search (sound domain reduction;
the pinning constraints remain in the checked set). Real-sorted cells exist
only through such pins — an unpinned Real cell has no finite domain and is
rejected as NotFiniteDomain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .checker import TypedProgram
from .diagnostics import Diagnostic
from .rewrite import simplify, substitute
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
    Sub,
    SymbolRef,
    Term,
    children,
    replace_children,
    walk,
)

Value = bool | int | Fraction | str

DEFAULT_INT_WINDOW = (-16, 16)
DEFAULT_BUDGET = 10_000_000


class NotFiniteError(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.diagnostic = Diagnostic("NotFiniteDomain", message)


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class Cell:
    """One table entry: a function applied to concrete universe values, or a
    solvable constant (empty args)."""

    fn: str
    args: tuple[Value, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.fn
        return f"{self.fn}({', '.join(_show(v) for v in self.args)})"


@dataclass(frozen=True)
class Assignment:
    """A complete candidate model: cell values plus the universe atoms they
    range over (atom identity is string identity)."""

    cells: dict[Cell, Value]
    atoms: frozenset[str]

    def render(self) -> str:
        lines = [f"{cell} = {_show(value)}" for cell, value in self.cells.items()]
        return "\n".join(lines)


def _show(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


@dataclass
class DomainMap:
    """Per-sort finite universes plus the integer window and search budget."""

    universes: dict[Sort, tuple[Value, ...]]
    int_window: tuple[int, int] = DEFAULT_INT_WINDOW
    budget: int = DEFAULT_BUDGET

    def universe(self, sort: Sort) -> tuple[Value, ...] | None:
        """None for Real (no finite universe exists)."""
        if sort.kind is SortKind.REAL:
            return None
        if sort.kind is SortKind.BOOL:
            return (False, True)
        if sort.kind is SortKind.INT:
            lo, hi = self.int_window
            return tuple(range(lo, hi + 1))
        if sort.kind is SortKind.BITVEC:
            return tuple(range(2**sort.width))
        return self.universes.get(sort, ())

    def quantifier_universe(self, sort: Sort | None, extra_ints: tuple[int, ...] = ()) -> tuple[Value, ...]:
        if sort is None:
            raise NotFiniteError("quantifier over an unresolved sort")
        if sort.kind is SortKind.REAL:
            raise NotFiniteError("cannot enumerate a Real-sorted quantifier")
        universe = self.universe(sort)
        assert universe is not None
        if sort.kind is SortKind.INT and extra_ints:
            merged = list(universe) + [v for v in sorted(set(extra_ints)) if v not in universe]
            return tuple(merged)
        if not universe:
            raise NotFiniteError(
                f"sort {sort.name} has an empty universe (declare constants to quantify over it)"
            )
        return universe


def ground_domains(
    tp: TypedProgram,
    int_window: tuple[int, int] = DEFAULT_INT_WINDOW,
    budget: int = DEFAULT_BUDGET,
) -> DomainMap:
    """Build the closed universes and verify every quantifier in the program
    ranges over a finite, non-empty domain."""
    universes: dict[Sort, tuple[Value, ...]] = {}
    for sort in tp.table.sorts.values():
        if sort.kind is SortKind.DECLARED:
            universes[sort] = tuple(tp.table.declared_constants(sort))
        elif sort.kind is SortKind.ENUM:
            decl = next(d for d in tp.program.sorts if d.name == sort.name)
            universes[sort] = decl.values
    domains = DomainMap(universes, int_window, budget)
    for formula in _all_formulas(tp):
        for node in walk(formula):
            if isinstance(node, Quantifier):
                for binder in node.binders:
                    domains.quantifier_universe(binder.sort)
    return domains


def _all_formulas(tp: TypedProgram) -> Iterable[Term]:
    for assertion in tp.assertions:
        yield assertion.formula
    for goal in tp.goals:
        yield goal.formula
    if tp.optimization:
        for constraint in tp.optimization.constraints:
            yield constraint.formula
        for objective in tp.optimization.objectives:
            yield objective.expression


# -- evaluation --------------------------------------------------------------


def eval_ground_term(
    term: Term,
    assignment: Assignment | Mapping[Cell, Value],
    domains: DomainMap,
    bindings: Mapping[str, Value] | None = None,
    extra_ints: tuple[int, ...] = (),
) -> Value:
    """Exact evaluation of a closed term under complete tables. Quantifiers
    expand over the DomainMap universes (conjunction/disjunction); rationals
    evaluate exactly via Fraction."""
    cells = assignment.cells if isinstance(assignment, Assignment) else assignment
    return _eval(term, cells, domains, dict(bindings or {}), extra_ints)


def _eval(
    term: Term,
    cells: Mapping[Cell, Value],
    domains: DomainMap,
    bindings: dict[str, Value],
    extra_ints: tuple[int, ...],
) -> Value:
    if isinstance(term, BoolLit):
        return term.value
    if isinstance(term, IntLit):
        return term.value
    if isinstance(term, RatLit):
        return term.value
    if isinstance(term, SymbolRef):
        if term.name in bindings:
            return bindings[term.name]
        cell = Cell(term.name)
        if cell in cells:
            return cells[cell]
        return term.name  # a universe atom evaluates to itself
    if isinstance(term, Apply):
        args = tuple(_eval(a, cells, domains, bindings, extra_ints) for a in term.args)
        cell = Cell(term.name, args)
        if cell not in cells:
            raise KeyError(f"no table entry for {cell}")
        return cells[cell]
    if isinstance(term, Eq):
        return _eval_eq(term.lhs, term.rhs, cells, domains, bindings, extra_ints)
    if isinstance(term, Neq):
        return not _eval_eq(term.lhs, term.rhs, cells, domains, bindings, extra_ints)
    if isinstance(term, Compare):
        lhs = _eval(term.lhs, cells, domains, bindings, extra_ints)
        rhs = _eval(term.rhs, cells, domains, bindings, extra_ints)
        op = {Lt: lambda a, b: a < b, Le: lambda a, b: a <= b, Gt: lambda a, b: a > b, Ge: lambda a, b: a >= b}[type(term)]
        return op(lhs, rhs)
    if isinstance(term, BinArith):
        lhs = _eval(term.lhs, cells, domains, bindings, extra_ints)
        rhs = _eval(term.rhs, cells, domains, bindings, extra_ints)
        op = {Add: lambda a, b: a + b, Sub: lambda a, b: a - b, Mul: lambda a, b: a * b}[type(term)]
        return op(lhs, rhs)
    if isinstance(term, Neg):
        return -_eval(term.operand, cells, domains, bindings, extra_ints)  # type: ignore[operator]
    if isinstance(term, And):
        return all(_eval(a, cells, domains, bindings, extra_ints) for a in term.args)
    if isinstance(term, Or):
        return any(_eval(a, cells, domains, bindings, extra_ints) for a in term.args)
    if isinstance(term, Not):
        return not _eval(term.operand, cells, domains, bindings, extra_ints)
    if isinstance(term, Implies):
        return (not _eval(term.lhs, cells, domains, bindings, extra_ints)) or _eval(
            term.rhs, cells, domains, bindings, extra_ints
        )
    if isinstance(term, Distinct):
        values = [_eval(a, cells, domains, bindings, extra_ints) for a in term.args]
        return len(set(map(_hashable, values))) == len(values)
    if isinstance(term, Quantifier):
        combos = itertools.product(
            *(domains.quantifier_universe(b.sort, extra_ints) for b in term.binders)
        )
        names = [b.name for b in term.binders]
        results = (
            _eval(term.body, cells, domains, {**bindings, **dict(zip(names, combo))}, extra_ints)
            for combo in combos
        )
        if isinstance(term, ForAll):
            return all(results)
        return any(results)
    raise TypeError(f"cannot evaluate {type(term).__name__}")


def _eval_eq(lhs: Term, rhs: Term, cells, domains, bindings, extra_ints) -> bool:
    left = _eval(lhs, cells, domains, bindings, extra_ints)
    right = _eval(rhs, cells, domains, bindings, extra_ints)
    return _hashable(left) == _hashable(right)


def _hashable(value: Value):
    # bool is an int subtype in Python; tag so True never equals 1, and
    # exact rationals compare with ints by value
    if isinstance(value, bool):
        return ("b", value)
    if isinstance(value, (int, Fraction)):
        return ("n", Fraction(value))
    return ("a", value)


# -- grounding and the search problem ----------------------------------------


@dataclass
class _Constraint:
    term: Term
    label: str
    support: frozenset[Cell]


@dataclass
class _Problem:
    domains: DomainMap
    cells: list[Cell]  # search order: declaration order, then argument order
    cell_domains: dict[Cell, tuple[Value, ...]]
    constraints: list[_Constraint]
    all_cells: dict[Cell, tuple[Value, ...]]  # including unconstrained tables
    atoms: frozenset[str]


def _literal_for(value: Value, sort: Sort | None) -> Term:
    if isinstance(value, bool):
        return BoolLit(value, sort=sort)
    if isinstance(value, int):
        return IntLit(value, sort=sort)
    if isinstance(value, Fraction):
        return RatLit(value, sort=sort)
    return SymbolRef(value, sort=sort)


def _expand(term: Term, domains: DomainMap) -> Term:
    """Replace every quantifier by a finite conjunction/disjunction over the
    universes, folding each instance as it is substituted."""
    if isinstance(term, Quantifier):
        body = term.body
        combos = itertools.product(*(domains.quantifier_universe(b.sort) for b in term.binders))
        instances = []
        for combo in combos:
            mapping = {
                binder.name: _literal_for(value, binder.sort)
                for binder, value in zip(term.binders, combo)
            }
            instances.append(_expand(substitute(body, mapping), domains))
        joined = And(tuple(instances), sort=term.sort) if isinstance(term, ForAll) else Or(tuple(instances), sort=term.sort)
        return simplify(joined)
    if not any(isinstance(t, Quantifier) for t in walk(term)):
        return simplify(term)
    new_children = tuple(_expand(c, domains) for c in children(term))
    return simplify(replace_children(term, new_children))


def _conjuncts(term: Term) -> list[Term]:
    if isinstance(term, And):
        out: list[Term] = []
        for arg in term.args:
            out.extend(_conjuncts(arg))
        return out
    return [term]


def _value_of_literal(term: Term) -> Value | None:
    if isinstance(term, BoolLit):
        return term.value
    if isinstance(term, IntLit):
        return term.value
    if isinstance(term, RatLit):
        return term.value
    if isinstance(term, Neg):
        inner = _value_of_literal(term.operand)
        if isinstance(inner, (int, Fraction)):
            return -inner
        return None
    return None


def _build_problem(
    tp: TypedProgram,
    formulas: list[tuple[Term, str]],
    domains: DomainMap,
    extra_relevant: Iterable[Term] = (),
) -> _Problem:
    grounded: list[tuple[Term, str]] = []
    for formula, label in formulas:
        expanded = _expand(formula, domains)
        for conjunct in _conjuncts(expanded):
            grounded.append((conjunct, label))

    atoms = frozenset(
        value
        for universe in domains.universes.values()
        for value in universe
        if isinstance(value, str)
    )

    # Relevance: a function or constant is enumerated only if some constraint
    # (or objective) can touch it; untouched tables stay at default values.
    relevant_fns: set[str] = set()
    relevant_consts: set[str] = set()
    scan_terms = [term for term, _ in grounded] + list(extra_relevant)
    for term in scan_terms:
        for node in walk(term):
            if isinstance(node, Apply):
                relevant_fns.add(node.name)
            elif isinstance(node, SymbolRef) and node.name in tp.table.constants:
                if node.name not in tp.table.enum_values:
                    relevant_consts.add(node.name)

    cell_domains: dict[Cell, tuple[Value, ...]] = {}
    all_cells: dict[Cell, tuple[Value, ...]] = {}
    order: list[Cell] = []

    def add_cell(cell: Cell, sort: Sort | None, relevant: bool) -> None:
        universe = domains.universe(sort) if sort is not None else None
        if universe is not None and not universe:
            raise NotFiniteError(f"cell {cell} ranges over the empty sort {sort}")
        domain = universe if universe is not None else ()
        all_cells[cell] = domain
        if relevant:
            cell_domains[cell] = domain
            order.append(cell)

    for fn_decl in tp.program.functions:
        resolved = tp.table.functions[fn_decl.name]
        arg_universes = []
        feasible = True
        for arg_sort in resolved.domain:
            universe = domains.universe(arg_sort) if arg_sort is not None else None
            if universe is None:
                if fn_decl.name in relevant_fns:
                    raise NotFiniteError(
                        f"function {fn_decl.name!r} takes a Real argument; its table cannot be enumerated"
                    )
                feasible = False
                break
            arg_universes.append(universe)
        if not feasible:
            continue
        for combo in itertools.product(*arg_universes):
            add_cell(Cell(fn_decl.name, combo), resolved.range, fn_decl.name in relevant_fns)

    for group in tp.program.constants:
        for member in group.members:
            sort = tp.table.constants[member]
            if sort is not None and sort.kind in (SortKind.DECLARED,):
                continue  # declared-sort constants are the universe itself
            add_cell(Cell(member), sort, member in relevant_consts)
    for name, sort in tp.implicit_constants:
        add_cell(Cell(name), sort, True)

    # Pin cells from ground top-level conjuncts: f(args) == value (either
    # side), bare Bool atoms, and negated atoms. Iterate to a fixpoint so
    # chains like g(a) == b; f(b) == 3 resolve.
    pinned: dict[Cell, Value] = {}

    def try_eval(term: Term) -> Value | None:
        literal = _value_of_literal(term)
        if literal is not None:
            return literal
        if isinstance(term, SymbolRef):
            cell = Cell(term.name)
            if cell in pinned:
                return pinned[cell]
            if cell in all_cells:
                return None
            return term.name  # universe atom
        if isinstance(term, Apply):
            args = []
            for arg in term.args:
                value = try_eval(arg)
                if value is None:
                    return None
                args.append(value)
            return pinned.get(Cell(term.name, tuple(args)))
        return None

    def cell_of(term: Term) -> Cell | None:
        if isinstance(term, SymbolRef):
            cell = Cell(term.name)
            return cell if cell in all_cells else None
        if isinstance(term, Apply):
            args = []
            for arg in term.args:
                value = try_eval(arg)
                if value is None:
                    return None
                args.append(value)
            cell = Cell(term.name, tuple(args))
            return cell if cell in all_cells else None
        return None

    changed = True
    while changed:
        changed = False
        for conjunct, _ in grounded:
            candidates: list[tuple[Term, Term]] = []
            if isinstance(conjunct, Eq):
                candidates = [(conjunct.lhs, conjunct.rhs), (conjunct.rhs, conjunct.lhs)]
            elif isinstance(conjunct, (Apply, SymbolRef)):
                candidates = [(conjunct, BoolLit(True))]
            elif isinstance(conjunct, Not) and isinstance(conjunct.operand, (Apply, SymbolRef)):
                candidates = [(conjunct.operand, BoolLit(False))]
            for target, source in candidates:
                cell = cell_of(target)
                if cell is None or cell in pinned:
                    continue
                value = try_eval(source)
                if value is None:
                    continue
                pinned[cell] = value
                changed = True
                break

    for cell, value in pinned.items():
        if cell in cell_domains:
            cell_domains[cell] = (value,)
            all_cells[cell] = (value,)

    # Real-sorted cells survive only when pinned.
    for cell in order:
        if not cell_domains[cell]:
            raise NotFiniteError(
                f"cell {cell} is Real-sorted and not fixed by any ground equality; "
                "the finite backend cannot enumerate it"
            )

    constraints = []
    for conjunct, label in grounded:
        if isinstance(conjunct, BoolLit) and conjunct.value:
            continue
        support = _support(conjunct, all_cells)
        constraints.append(_Constraint(conjunct, label, support))

    return _Problem(domains, order, cell_domains, constraints, all_cells, atoms)


def model_cells(tp: TypedProgram, domains: DomainMap) -> list[Cell]:
    """Every table cell a model must value, in deterministic order: cells of
    each function mentioned by some formula (over the closed domain product)
    followed by solvable constants. Functions with Real-sorted arguments are
    skipped — they have no closed table."""
    relevant_fns: set[str] = set()
    relevant_consts: set[str] = set()
    for formula in _all_formulas(tp):
        for node in walk(formula):
            if isinstance(node, Apply):
                relevant_fns.add(node.name)
            elif isinstance(node, SymbolRef) and node.name in tp.table.constants:
                if node.name not in tp.table.enum_values:
                    relevant_consts.add(node.name)

    cells: list[Cell] = []
    for fn_decl in tp.program.functions:
        if fn_decl.name not in relevant_fns:
            continue
        resolved = tp.table.functions[fn_decl.name]
        universes = []
        feasible = True
        for arg_sort in resolved.domain:
            universe = domains.universe(arg_sort) if arg_sort is not None else None
            if universe is None or not universe:
                feasible = False
                break
            universes.append(universe)
        if not feasible:
            continue
        cells.extend(Cell(fn_decl.name, combo) for combo in itertools.product(*universes))
    for group in tp.program.constants:
        for member in group.members:
            sort = tp.table.constants[member]
            if sort is not None and sort.kind is SortKind.DECLARED:
                continue
            if member in relevant_consts:
                cells.append(Cell(member))
    for name, _sort in tp.implicit_constants:
        cells.append(Cell(name))
    return cells


def cell_term(cell: Cell, tp: TypedProgram) -> Term:
    """Rebuild the typed term a cell denotes (for get-value queries)."""
    if not cell.args:
        return SymbolRef(cell.fn, sort=tp.table.constants.get(cell.fn))
    fn = tp.table.functions[cell.fn]
    args = tuple(_literal_for(value, sort) for value, sort in zip(cell.args, fn.domain))
    return Apply(cell.fn, args, sort=fn.range)


def _support(term: Term, all_cells: dict[Cell, tuple[Value, ...]]) -> frozenset[Cell]:
    """Cells a constraint may touch. Nested applications over non-literal
    arguments over-approximate to the whole table of the outer function."""
    out: set[Cell] = set()
    for node in walk(term):
        if isinstance(node, Apply):
            args = []
            ground = True
            for arg in node.args:
                value = _value_of_literal(arg)
                if value is None and isinstance(arg, SymbolRef) and Cell(arg.name) not in all_cells:
                    value = arg.name
                if value is None:
                    ground = False
                    break
                args.append(value)
            if ground:
                cell = Cell(node.name, tuple(args))
                if cell in all_cells:
                    out.add(cell)
            else:
                out.update(c for c in all_cells if c.fn == node.name)
        elif isinstance(node, SymbolRef):
            cell = Cell(node.name)
            if cell in all_cells:
                out.add(cell)
    return frozenset(out)


# -- enumeration -------------------------------------------------------------


@dataclass(frozen=True)
class EnumOutcome:
    status: str  # "SAT" | "UNSAT" | "UNKNOWN"
    assignment: Assignment | None
    candidates: int
    diagnostics: tuple[Diagnostic, ...] = ()


@dataclass(frozen=True)
class EnumOptimum:
    status: str  # "OPTIMAL" | "INFEASIBLE" | "UNKNOWN"
    values: tuple[Value, ...] | None
    assignment: Assignment | None
    candidates: int
    diagnostics: tuple[Diagnostic, ...] = ()


def _space_size(problem: _Problem) -> int:
    size = 1
    for cell in problem.cells:
        size *= len(problem.cell_domains[cell])
        if size > problem.domains.budget:
            return size
    return size


def _complete_assignment(problem: _Problem, chosen: Mapping[Cell, Value]) -> Assignment:
    cells: dict[Cell, Value] = {}
    for cell, domain in problem.all_cells.items():
        if cell in chosen:
            cells[cell] = chosen[cell]
        else:
            cells[cell] = domain[0] if domain else 0
    return Assignment(cells, problem.atoms)


def _search(problem: _Problem, on_leaf) -> int:
    """Shared DFS: assign cells in order, evaluate each constraint as soon as
    its support is complete, call on_leaf for every surviving candidate.
    Returns the number of candidates visited; raises BudgetExceeded."""
    index_of = {cell: i for i, cell in enumerate(problem.cells)}
    ready: list[list[_Constraint]] = [[] for _ in problem.cells]
    immediate: list[_Constraint] = []
    for constraint in problem.constraints:
        indices = [index_of[c] for c in constraint.support if c in index_of]
        if indices:
            ready[max(indices)].append(constraint)
        else:
            immediate.append(constraint)

    assigned: dict[Cell, Value] = {}
    domains = problem.domains
    for constraint in immediate:
        if not _eval(constraint.term, assigned, domains, {}, ()):
            return 0

    candidates = 0
    budget = domains.budget

    def descend(depth: int) -> bool:
        nonlocal candidates
        if depth == len(problem.cells):
            candidates += 1
            if candidates > budget:
                raise BudgetExceeded()
            return on_leaf(assigned)
        cell = problem.cells[depth]
        for value in problem.cell_domains[cell]:
            assigned[cell] = value
            ok = True
            for constraint in ready[depth]:
                if not _eval(constraint.term, assigned, domains, {}, ()):
                    ok = False
                    break
            if ok and descend(depth + 1):
                return True
            del assigned[cell]
        return False

    if not problem.cells:
        # no searchable cells: the immediate constraints decided everything
        candidates = 1
        on_leaf(assigned)
        return candidates

    descend(0)
    return candidates


def enumerate_check(tp: TypedProgram, goal: Term | None, domains: DomainMap) -> EnumOutcome:
    """SAT with the deterministic-order first model, UNSAT on exhaustion,
    UNKNOWN when the (post-pinning) search space exceeds the budget."""
    formulas = [(a.formula, a.label) for a in tp.assertions]
    if goal is not None:
        formulas.append((goal, "goal"))
    try:
        problem = _build_problem(tp, formulas, domains)
    except NotFiniteError as err:
        return EnumOutcome("UNKNOWN", None, 0, (err.diagnostic,))

    size = _space_size(problem)
    if size > domains.budget:
        return EnumOutcome(
            "UNKNOWN",
            None,
            0,
            (
                Diagnostic(
                    "NotFiniteDomain",
                    f"search space of {size} candidate tables exceeds the budget of {domains.budget}",
                    hint="raise --enum-budget or narrow --int-window",
                ),
            ),
        )

    found: list[Assignment] = []

    def on_leaf(assigned: Mapping[Cell, Value]) -> bool:
        found.append(_complete_assignment(problem, assigned))
        return True

    try:
        candidates = _search(problem, on_leaf)
    except BudgetExceeded:
        return EnumOutcome(
            "UNKNOWN", None, domains.budget, (Diagnostic("NotFiniteDomain", "candidate budget exceeded"),)
        )
    if found:
        return EnumOutcome("SAT", found[0], candidates)
    return EnumOutcome("UNSAT", None, candidates)


def enumerate_optimize(tp: TypedProgram, domains: DomainMap) -> EnumOptimum:
    """Exact lexicographic optimum over every feasible assignment; INFEASIBLE
    when no assignment satisfies KB ∧ rules ∧ optimization constraints;
    UNKNOWN when the budget is exceeded or the optimum rests an
    objective-relevant cell on the integer window boundary (the true optimum
    could lie outside the window)."""
    if tp.optimization is None or not tp.optimization.objectives:
        return EnumOptimum(
            "UNKNOWN",
            None,
            None,
            0,
            (Diagnostic("SchemaViolation", "optimization with at least one objective is required"),),
        )
    formulas = [(a.formula, a.label) for a in tp.assertions]
    formulas.extend((c.formula, c.label) for c in tp.optimization.constraints)
    objectives = tp.optimization.objectives
    try:
        problem = _build_problem(
            tp, formulas, domains, extra_relevant=[o.expression for o in objectives]
        )
    except NotFiniteError as err:
        return EnumOptimum("UNKNOWN", None, None, 0, (err.diagnostic,))

    size = _space_size(problem)
    if size > domains.budget:
        return EnumOptimum(
            "UNKNOWN",
            None,
            None,
            0,
            (
                Diagnostic(
                    "NotFiniteDomain",
                    f"search space of {size} candidate tables exceeds the budget of {domains.budget}",
                ),
            ),
        )

    best: dict = {"values": None, "assigned": None}

    def better(values: tuple[Value, ...]) -> bool:
        current = best["values"]
        if current is None:
            return True
        for objective, new, old in zip(objectives, values, current):
            if new == old:
                continue
            return new < old if objective.kind == "minimize" else new > old
        return False

    def on_leaf(assigned: Mapping[Cell, Value]) -> bool:
        values = tuple(
            _eval(o.expression, assigned, domains, {}, ()) for o in objectives
        )
        if better(values):
            best["values"] = values
            best["assigned"] = dict(assigned)
        return False  # keep exploring: the optimum needs the whole space

    try:
        candidates = _search(problem, on_leaf)
    except BudgetExceeded:
        return EnumOptimum(
            "UNKNOWN", None, None, domains.budget, (Diagnostic("NotFiniteDomain", "candidate budget exceeded"),)
        )

    if best["values"] is None:
        return EnumOptimum(
            "INFEASIBLE",
            None,
            None,
            candidates,
            (Diagnostic("Infeasible", "no assignment satisfies the optimization constraints"),),
        )

    boundary = _window_boundary_cells(problem, objectives, best["assigned"], domains)
    if boundary:
        return EnumOptimum(
            "UNKNOWN",
            tuple(best["values"]),
            _complete_assignment(problem, best["assigned"]),
            candidates,
            (
                Diagnostic(
                    "NotFiniteDomain",
                    f"optimum rests on the integer window boundary at {', '.join(map(str, boundary))}; "
                    "a better value may exist outside the window",
                    hint="widen --int-window",
                ),
            ),
        )
    return EnumOptimum("OPTIMAL", tuple(best["values"]), _complete_assignment(problem, best["assigned"]), candidates)


def _window_boundary_cells(
    problem: _Problem,
    objectives,
    assigned: Mapping[Cell, Value],
    domains: DomainMap,
) -> list[Cell]:
    lo, hi = domains.int_window
    support: set[Cell] = set()
    for objective in objectives:
        support.update(_support(objective.expression, problem.all_cells))
    out = []
    for cell in support:
        domain = problem.cell_domains.get(cell)
        if domain is None or len(domain) <= 1:
            continue  # pinned or unsearched cells cannot slide past the window
        value = assigned.get(cell)
        if isinstance(value, int) and not isinstance(value, bool) and value in (lo, hi):
            out.append(cell)
    return sorted(out, key=str)

