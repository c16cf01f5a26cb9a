"""Sorts and the expression AST shared by every stage of the pipeline.

Terms exist in two flavours that share one set of node classes: the parser
produces *surface* terms (``sort is None`` everywhere, binder variables may
lack sorts), and the type checker rebuilds them as *typed* terms with every
node annotated. All nodes are immutable; transformations return new trees.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator


class SortKind(enum.Enum):
    DECLARED = "DeclareSort"
    BOOL = "BoolSort"
    INT = "IntSort"
    REAL = "RealSort"
    ENUM = "EnumSort"
    BITVEC = "BitVecSort"


@dataclass(frozen=True)
class Sort:
    """A resolved sort. Alias sorts (a user name for Int/Real/Bool) keep the
    user's name but carry the builtin kind; kind decides all typing rules."""

    name: str
    kind: SortKind
    width: int = 0  # BITVEC only

    def is_numeric(self) -> bool:
        return self.kind in (SortKind.INT, SortKind.REAL)

    def __str__(self) -> str:
        return self.name


BOOL = Sort("Bool", SortKind.BOOL)
INT = Sort("Int", SortKind.INT)
REAL = Sort("Real", SortKind.REAL)

#: Builtin keyword spellings accepted wherever a sort is referenced.
BUILTIN_SORT_KEYWORDS = {
    "Bool": BOOL,
    "BoolSort": BOOL,
    "Int": INT,
    "IntSort": INT,
    "Real": REAL,
    "RealSort": REAL,
}

Span = tuple[int, int]


@dataclass(frozen=True)
class VarBind:
    """A quantifier-bound variable; sort is None in surface terms parsed from
    expression strings (the checker resolves it from declarations)."""

    name: str
    sort: Sort | None = None


@dataclass(frozen=True)
class Term:
    span: Span | None = field(default=None, kw_only=True, compare=False, repr=False)
    sort: Sort | None = field(default=None, kw_only=True, compare=False)


@dataclass(frozen=True)
class BoolLit(Term):
    value: bool


@dataclass(frozen=True)
class IntLit(Term):
    value: int


@dataclass(frozen=True)
class RatLit(Term):
    value: Fraction


@dataclass(frozen=True)
class SymbolRef(Term):
    name: str


@dataclass(frozen=True)
class Apply(Term):
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Compare(Term):
    lhs: Term
    rhs: Term


class Eq(Compare):
    pass


class Neq(Compare):
    pass


class Lt(Compare):
    pass


class Le(Compare):
    pass


class Gt(Compare):
    pass


class Ge(Compare):
    pass


@dataclass(frozen=True)
class BinArith(Term):
    lhs: Term
    rhs: Term


class Add(BinArith):
    pass


class Sub(BinArith):
    pass


class Mul(BinArith):
    pass


@dataclass(frozen=True)
class Neg(Term):
    operand: Term


@dataclass(frozen=True)
class And(Term):
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Or(Term):
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not(Term):
    operand: Term


@dataclass(frozen=True)
class Implies(Term):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Distinct(Term):
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Quantifier(Term):
    binders: tuple[VarBind, ...]
    body: Term


class ForAll(Quantifier):
    pass


class Exists(Quantifier):
    pass


def children(term: Term) -> tuple[Term, ...]:
    """Direct sub-terms, in evaluation order."""
    if isinstance(term, (Compare, BinArith, Implies)):
        return (term.lhs, term.rhs)
    if isinstance(term, (Neg, Not)):
        return (term.operand,)
    if isinstance(term, (And, Or, Distinct)):
        return term.args
    if isinstance(term, Apply):
        return term.args
    if isinstance(term, Quantifier):
        return (term.body,)
    return ()


def walk(term: Term) -> Iterator[Term]:
    """Pre-order traversal of the whole tree."""
    yield term
    for child in children(term):
        yield from walk(child)


def replace_children(term: Term, new: tuple[Term, ...]) -> Term:
    """Rebuild a node with new children, preserving span/sort annotations."""
    meta = {"span": term.span, "sort": term.sort}
    if isinstance(term, (Compare, BinArith, Implies)):
        return type(term)(new[0], new[1], **meta)
    if isinstance(term, (Neg, Not)):
        return type(term)(new[0], **meta)
    if isinstance(term, (And, Or, Distinct)):
        return type(term)(tuple(new), **meta)
    if isinstance(term, Apply):
        return Apply(term.name, tuple(new), **meta)
    if isinstance(term, Quantifier):
        return type(term)(term.binders, new[0], **meta)
    if new:
        raise ValueError(f"{type(term).__name__} takes no children")
    return term


def free_symbols(term: Term) -> set[str]:
    """Names of SymbolRefs not bound by an enclosing quantifier."""
    out: set[str] = set()

    def go(t: Term, bound: frozenset[str]) -> None:
        if isinstance(t, SymbolRef):
            if t.name not in bound:
                out.add(t.name)
            return
        if isinstance(t, Quantifier):
            go(t.body, bound | {b.name for b in t.binders})
            return
        for c in children(t):
            go(c, bound)

    go(term, frozenset())
    return out


def bound_names(term: Term) -> set[str]:
    return {b.name for t in walk(term) if isinstance(t, Quantifier) for b in t.binders}


# Pretty-printing back to the DSL's surface syntax. Precedence levels mirror
# the grammar: 0 comparison, 1 additive, 2 multiplicative, 3 unary, 4 atom.
# Negative literals (never produced by the parser, only by constant folding)
# print parenthesized so the output always re-parses.

_CMP_OP = {Eq: "==", Neq: "!=", Lt: "<", Le: "<=", Gt: ">", Ge: ">="}
_ADD_OP = {Add: "+", Sub: "-"}


def format_term(term: Term) -> str:
    return _fmt(term, 0)


def _fmt(term: Term, level: int) -> str:
    if isinstance(term, BoolLit):
        return "true" if term.value else "false"
    if isinstance(term, IntLit):
        return str(term.value) if term.value >= 0 else f"({term.value})"
    if isinstance(term, RatLit):
        return _format_fraction(term.value)
    if isinstance(term, SymbolRef):
        return term.name
    if isinstance(term, Apply):
        args = ", ".join(_fmt(a, 0) for a in term.args)
        return f"{term.name}({args})"
    if isinstance(term, Compare):
        text = f"{_fmt(term.lhs, 1)} {_CMP_OP[type(term)]} {_fmt(term.rhs, 1)}"
        return _paren(text, 0, level)
    if isinstance(term, (Add, Sub)):
        # left-assoc: the right operand binds one level tighter
        text = f"{_fmt(term.lhs, 1)} {_ADD_OP[type(term)]} {_fmt(term.rhs, 2)}"
        return _paren(text, 1, level)
    if isinstance(term, Mul):
        text = f"{_fmt(term.lhs, 2)} * {_fmt(term.rhs, 3)}"
        return _paren(text, 2, level)
    if isinstance(term, Neg):
        return _paren(f"-{_fmt(term.operand, 4)}", 3, level)
    if isinstance(term, And):
        return f"And({', '.join(_fmt(a, 0) for a in term.args)})"
    if isinstance(term, Or):
        return f"Or({', '.join(_fmt(a, 0) for a in term.args)})"
    if isinstance(term, Not):
        return f"Not({_fmt(term.operand, 0)})"
    if isinstance(term, Implies):
        return f"Implies({_fmt(term.lhs, 0)}, {_fmt(term.rhs, 0)})"
    if isinstance(term, Distinct):
        return f"Distinct({', '.join(_fmt(a, 0) for a in term.args)})"
    if isinstance(term, Quantifier):
        names = ", ".join(b.name for b in term.binders)
        kind = "ForAll" if isinstance(term, ForAll) else "Exists"
        return f"{kind}([{names}], {_fmt(term.body, 0)})"
    raise TypeError(f"unknown term node {type(term).__name__}")


def _format_fraction(value: Fraction) -> str:
    if value < 0:
        return f"(-{_format_fraction(-value)})"
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    # Literals originate from decimal text, so the denominator is 2^a * 5^b;
    # rebuild the exact decimal expansion.
    scale = 0
    while den % 10 == 0:
        den //= 10
        scale += 1
    while den % 2 == 0:
        den //= 2
        num *= 5
        scale += 1
    while den % 5 == 0:
        den //= 5
        num *= 2
        scale += 1
    if den != 1:
        raise ValueError(f"{value} has no finite decimal form")
    digits = str(num).rjust(scale + 1, "0")
    return f"{digits[:-scale]}.{digits[-scale:]}"


def _paren(text: str, prec: int, level: int) -> str:
    return f"({text})" if prec < level else text
