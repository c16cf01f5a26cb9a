"""Logic-preserving term rewriting: simplification and prenex normal form.

simplify() applies the usual identities until a fixpoint: double negations
drop, And/Or flatten and absorb their literals, ground numeric comparisons
and arithmetic fold, reflexive equalities fold, and enum values (pairwise
distinct by construction) decide their own equalities. Declared-sort
constants are NOT assumed distinct, so e1 == e2 never folds for those.

to_prenex() pulls every quantifier to an outermost prefix over a
quantifier-free matrix, renaming bound variables apart so no capture can
occur. Equivalences over Bool (Eq/Neq/Distinct with quantified operands)
are expanded into implications first; they are the only connectives that
cannot host a quantifier otherwise.
"""

from __future__ import annotations

from fractions import Fraction

from .terms import (
    BOOL,
    INT,
    REAL,
    Add,
    And,
    BinArith,
    BoolLit,
    Compare,
    Distinct,
    Eq,
    Exists,
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
    SortKind,
    SymbolRef,
    Sub,
    Term,
    VarBind,
    bound_names,
    children,
    free_symbols,
    replace_children,
    walk,
)

_NUMERIC_FOLDS = {
    Add: lambda a, b: a + b,
    Sub: lambda a, b: a - b,
    Mul: lambda a, b: a * b,
}
_COMPARE_FOLDS = {
    Eq: lambda a, b: a == b,
    Neq: lambda a, b: a != b,
    Lt: lambda a, b: a < b,
    Le: lambda a, b: a <= b,
    Gt: lambda a, b: a > b,
    Ge: lambda a, b: a >= b,
}


def _numeric_value(term: Term) -> int | Fraction | None:
    if isinstance(term, IntLit):
        return term.value
    if isinstance(term, RatLit):
        return term.value
    return None


def _literal(value: int | Fraction, template: Term) -> Term:
    if isinstance(value, Fraction) and value.denominator != 1:
        return RatLit(value, span=template.span, sort=REAL)
    if isinstance(value, Fraction):
        # keep Real-ness when folding Real arithmetic to a whole number
        if template.sort is not None and template.sort.kind is SortKind.REAL:
            return RatLit(value, span=template.span, sort=REAL)
        return IntLit(int(value), span=template.span, sort=INT)
    return IntLit(value, span=template.span, sort=template.sort or INT)


def _is_enum_value(term: Term) -> bool:
    return isinstance(term, SymbolRef) and term.sort is not None and term.sort.kind is SortKind.ENUM


def simplify(term: Term) -> Term:
    """Return a logically equivalent, simplified term (fixpoint)."""
    previous = term
    while True:
        simplified = _simplify_once(previous)
        if simplified == previous:
            return simplified
        previous = simplified


def _simplify_once(term: Term) -> Term:
    term = replace_children(term, tuple(_simplify_once(c) for c in children(term)))

    if isinstance(term, Not):
        inner = term.operand
        if isinstance(inner, BoolLit):
            return BoolLit(not inner.value, span=term.span, sort=BOOL)
        if isinstance(inner, Not):
            return inner.operand
        return term

    if isinstance(term, (And, Or)):
        is_and = isinstance(term, And)
        absorber, identity = (False, True) if is_and else (True, False)
        flat: list[Term] = []
        for arg in term.args:
            if type(arg) is type(term):
                flat.extend(arg.args)  # type: ignore[attr-defined]
            elif isinstance(arg, BoolLit):
                if arg.value == absorber:
                    return BoolLit(absorber, span=term.span, sort=BOOL)
                # identity elements drop
            else:
                flat.append(arg)
        if not flat:
            return BoolLit(identity, span=term.span, sort=BOOL)
        if len(flat) == 1:
            return flat[0]
        return type(term)(tuple(flat), span=term.span, sort=BOOL)

    if isinstance(term, Implies):
        lhs, rhs = term.lhs, term.rhs
        if isinstance(lhs, BoolLit):
            return rhs if lhs.value else BoolLit(True, span=term.span, sort=BOOL)
        if isinstance(rhs, BoolLit) and rhs.value:
            return BoolLit(True, span=term.span, sort=BOOL)
        if isinstance(rhs, BoolLit):
            return _simplify_once(Not(lhs, span=term.span, sort=BOOL))
        return term

    if isinstance(term, Neg):
        value = _numeric_value(term.operand)
        if value is not None:
            return _literal(-value, term)
        if isinstance(term.operand, Neg):
            return term.operand.operand
        return term

    if isinstance(term, BinArith):
        lhs, rhs = _numeric_value(term.lhs), _numeric_value(term.rhs)
        if lhs is not None and rhs is not None:
            return _literal(_NUMERIC_FOLDS[type(term)](Fraction(lhs), Fraction(rhs)), term)
        return term

    if isinstance(term, Compare):
        lhs, rhs = _numeric_value(term.lhs), _numeric_value(term.rhs)
        if lhs is not None and rhs is not None:
            return BoolLit(_COMPARE_FOLDS[type(term)](lhs, rhs), span=term.span, sort=BOOL)
        if isinstance(term, (Eq, Neq)):
            same = _decide_equal(term.lhs, term.rhs)
            if same is not None:
                value = same if isinstance(term, Eq) else not same
                return BoolLit(value, span=term.span, sort=BOOL)
        return term

    if isinstance(term, Distinct):
        decided = _decide_distinct(term.args)
        if decided is not None:
            return BoolLit(decided, span=term.span, sort=BOOL)
        return term

    if isinstance(term, Quantifier) and isinstance(term.body, BoolLit):
        # sorts are never empty in many-sorted FOL, so the binder is inert
        return term.body

    return term


def _decide_equal(lhs: Term, rhs: Term) -> bool | None:
    """True/False when equality is decidable without a model: identical
    symbols are reflexively equal; distinct enum values and distinct Bool
    literals are unequal. Declared-sort constants may alias, so two
    different names decide nothing."""
    if isinstance(lhs, BoolLit) and isinstance(rhs, BoolLit):
        return lhs.value == rhs.value
    if isinstance(lhs, SymbolRef) and isinstance(rhs, SymbolRef) and lhs.name == rhs.name:
        return True
    if _is_enum_value(lhs) and _is_enum_value(rhs):
        return lhs.name == rhs.name
    return None


def _decide_distinct(args: tuple[Term, ...]) -> bool | None:
    decided_all = True
    for i, a in enumerate(args):
        for b in args[i + 1 :]:
            same = _equal_for_distinct(a, b)
            if same is True:
                return False
            if same is None:
                decided_all = False
    return True if decided_all else None


def _equal_for_distinct(a: Term, b: Term) -> bool | None:
    va, vb = _numeric_value(a), _numeric_value(b)
    if va is not None and vb is not None:
        return va == vb
    return _decide_equal(a, b)


def to_prenex(term: Term) -> Term:
    """Prenex normal form of a well-typed closed formula: all quantifiers in
    an outer prefix, variables renamed apart, quantifier-free matrix. Names
    are kept when no capture is possible, so an already-prenex formula comes
    back unchanged."""
    used = set(free_symbols(term))
    counter: dict[str, int] = {}

    def fresh(base: str) -> str:
        name = base
        while name in used:
            counter[base] = counter.get(base, 0) + 1
            name = f"{base}_{counter[base]}"
        used.add(name)
        return name

    prefix, matrix = _pull(term, fresh, positive=True)
    for is_forall, binder in reversed(prefix):
        wrapper = ForAll if is_forall else Exists
        matrix = wrapper((binder,), matrix, sort=BOOL)
    return matrix


def _pull(term: Term, fresh, positive: bool) -> tuple[list[tuple[bool, VarBind]], Term]:
    if isinstance(term, Quantifier):
        is_forall = isinstance(term, ForAll) == positive
        prefix: list[tuple[bool, VarBind]] = []
        body = term.body
        renames: dict[str, Term] = {}
        binders = []
        for binder in term.binders:
            name = fresh(binder.name)
            if name != binder.name:
                renames[binder.name] = SymbolRef(name, sort=binder.sort)
            binders.append((is_forall, VarBind(name, binder.sort)))
        if renames:
            body = substitute(body, renames)
        inner_prefix, matrix = _pull(body, fresh, positive)
        return [*binders, *inner_prefix], matrix

    if isinstance(term, Not):
        prefix, matrix = _pull(term.operand, fresh, not positive)
        return prefix, Not(matrix, span=term.span, sort=BOOL)

    if isinstance(term, Implies):
        left_prefix, left = _pull(term.lhs, fresh, not positive)
        right_prefix, right = _pull(term.rhs, fresh, positive)
        return [*left_prefix, *right_prefix], Implies(left, right, span=term.span, sort=BOOL)

    if isinstance(term, (And, Or)):
        prefix = []
        parts = []
        for arg in term.args:
            sub_prefix, sub = _pull(arg, fresh, positive)
            prefix.extend(sub_prefix)
            parts.append(sub)
        return prefix, type(term)(tuple(parts), span=term.span, sort=BOOL)

    if isinstance(term, (Eq, Neq, Distinct)) and _hosts_quantifier(term):
        return _pull(_expand_bool_equality(term), fresh, positive)

    return [], term


def _hosts_quantifier(term: Term) -> bool:
    return any(isinstance(t, Quantifier) for c in children(term) for t in walk(c))


def _expand_bool_equality(term: Term) -> Term:
    """Bool-sorted equality is a biconditional; rewrite it with implications
    so quantifiers inside the operands can move."""
    if isinstance(term, Distinct):
        if len(term.args) > 2:
            # three or more pairwise-distinct booleans cannot exist
            return BoolLit(False, span=term.span, sort=BOOL)
        lhs, rhs = term.args
    else:
        lhs, rhs = term.lhs, term.rhs  # type: ignore[attr-defined]
    both = And(
        (Implies(lhs, rhs, sort=BOOL), Implies(rhs, lhs, sort=BOOL)),
        span=term.span,
        sort=BOOL,
    )
    if isinstance(term, Eq):
        return both
    return Not(both, span=term.span, sort=BOOL)


def substitute(term: Term, mapping: dict[str, Term]) -> Term:
    """Capture-avoiding substitution of free symbol occurrences: shadowed
    keys stop at the binder, and binders whose names occur free in a
    replacement are α-renamed first (an enum value substituted for an outer
    variable must not be captured by an inner binder of the same name)."""
    if not mapping:
        return term
    if isinstance(term, SymbolRef):
        replacement = mapping.get(term.name)
        if replacement is None:
            return term
        return replacement
    if isinstance(term, Quantifier):
        shadowed = {b.name for b in term.binders}
        inner = {k: v for k, v in mapping.items() if k not in shadowed}
        if not inner:
            return term
        replacement_frees: set[str] = set()
        for value in inner.values():
            replacement_frees |= free_symbols(value)
        binders = term.binders
        body = term.body
        if replacement_frees & shadowed:
            taken = (
                replacement_frees
                | shadowed
                | free_symbols(body)
                | bound_names(body)
                | set(inner)
            )
            renames: dict[str, Term] = {}
            fresh_binders = []
            for binder in binders:
                if binder.name in replacement_frees:
                    counter = 1
                    while f"{binder.name}_{counter}" in taken:
                        counter += 1
                    fresh_name = f"{binder.name}_{counter}"
                    taken.add(fresh_name)
                    renames[binder.name] = SymbolRef(fresh_name, sort=binder.sort)
                    fresh_binders.append(VarBind(fresh_name, binder.sort))
                else:
                    fresh_binders.append(binder)
            body = substitute(body, renames)
            binders = tuple(fresh_binders)
        return type(term)(binders, substitute(body, inner), span=term.span, sort=term.sort)
    new_children = tuple(substitute(c, mapping) for c in children(term))
    return replace_children(term, new_children)
