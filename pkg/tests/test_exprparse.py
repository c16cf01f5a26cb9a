from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from folcheck.diagnostics import ProgramError
from folcheck.exprparse import parse_expression
from folcheck.terms import (
    Add,
    And,
    Apply,
    BoolLit,
    Distinct,
    Eq,
    Exists,
    ForAll,
    Gt,
    Implies,
    IntLit,
    Mul,
    Neg,
    Not,
    Or,
    RatLit,
    Sub,
    SymbolRef,
    VarBind,
    format_term,
)


def sym(name):
    return SymbolRef(name)


def test_simple_arithmetic_equation():
    term = parse_expression("x + 2 == 5")
    assert term == Eq(Add(sym("x"), IntLit(2)), IntLit(5))


def test_capitalized_bool_literal():
    assert parse_expression("True") == BoolLit(True)
    assert parse_expression("false") == BoolLit(False)


def test_nary_and_with_comparison():
    term = parse_expression("And(Worker(p), At(p, l), Height(l) > 6)")
    assert term == And(
        (
            Apply("Worker", (sym("p"),)),
            Apply("At", (sym("p"), sym("l"))),
            Gt(Apply("Height", (sym("l"),)), IntLit(6)),
        )
    )


def test_distinct_over_four_applications():
    term = parse_expression(
        "Distinct(assigned_to(p1), assigned_to(p2), assigned_to(p3), assigned_to(p4))"
    )
    assert isinstance(term, Distinct)
    assert len(term.args) == 4
    assert all(isinstance(a, Apply) and a.name == "assigned_to" for a in term.args)


def test_quantifier_with_bracketed_variables():
    term = parse_expression("ForAll([g], Implies(send_delegation(g), oppose_allotment(g)))")
    assert isinstance(term, ForAll)
    assert [b.name for b in term.binders] == ["g"]
    assert isinstance(term.body, Implies)


def test_exists_multiple_binders():
    term = parse_expression("Exists([t1, t2], t1 != t2)")
    assert isinstance(term, Exists)
    assert [b.name for b in term.binders] == ["t1", "t2"]


def test_decimal_literal_is_exact_rational():
    term = parse_expression("2.45")
    assert term == RatLit(Fraction(49, 20))


def test_precedence_mul_over_add_over_compare():
    term = parse_expression("1 + 2 * 3 == 7")
    assert term == Eq(Add(IntLit(1), Mul(IntLit(2), IntLit(3))), IntLit(7))


def test_left_associativity():
    assert parse_expression("1 - 2 - 3") == Sub(Sub(IntLit(1), IntLit(2)), IntLit(3))


def test_unary_minus_binds_tighter_than_mul():
    assert parse_expression("-x * y") == Mul(Neg(sym("x")), sym("y"))


def test_parenthesized_grouping():
    assert parse_expression("(1 + 2) * 3") == Mul(Add(IntLit(1), IntLit(2)), IntLit(3))


def test_spans_cover_source_offsets():
    term = parse_expression("foo(bar) == 2.45")
    assert term.span == (0, 16)
    assert term.lhs.span == (0, 8)
    assert term.rhs.span == (12, 16)


@pytest.mark.parametrize(
    "source, fragment",
    [
        ("a < b < c", "chained comparisons"),
        ("Safe(worker", "expected )"),
        ("ForAll", "reserved name"),
        ("Implies(a)", "exactly 2"),
        ("Not(a, b)", "exactly 1"),
        ("And()", "at least 1"),
        ("x +", "expected expression"),
        ("@", "unexpected character"),
        ("ForAll([], x)", "unexpected"),
        ("Exists([true], x)", "cannot be used as a variable name"),
        ("1 2", "end of input"),
    ],
)
def test_syntax_errors(source, fragment):
    with pytest.raises(ProgramError) as excinfo:
        parse_expression(source)
    diag = excinfo.value.diagnostics[0]
    assert diag.category == "ExpressionSyntax"
    assert fragment in diag.message + " " + (diag.hint or "")


def test_error_offsets_point_into_source():
    with pytest.raises(ProgramError) as excinfo:
        parse_expression("foo(bar, @)")
    span = excinfo.value.diagnostics[0].span
    assert (span.start, span.end) == (9, 10)


def test_reserved_names_rejected_as_identifiers():
    for name in ("And", "Or", "Not", "Implies", "Distinct", "ForAll", "Exists"):
        with pytest.raises(ProgramError):
            parse_expression(f"f({name})")


_names = st.sampled_from(["x", "y2", "foo", "bar_baz", "Worker", "p1"])


def _leaf():
    return st.one_of(
        st.integers(min_value=0, max_value=999).map(IntLit),
        st.booleans().map(BoolLit),
        _names.map(SymbolRef),
        st.tuples(st.integers(0, 999), st.integers(1, 99)).map(
            lambda p: RatLit(Fraction(p[0] * 100 + p[1], 100))
        ),
    )


def _extend(inner):
    return st.one_of(
        st.tuples(_names, st.lists(inner, min_size=0, max_size=3)).map(
            lambda p: Apply(p[0], tuple(p[1]))
        ),
        st.tuples(inner, inner).map(lambda p: Eq(*p)),
        st.tuples(inner, inner).map(lambda p: Add(*p)),
        st.tuples(inner, inner).map(lambda p: Sub(*p)),
        st.tuples(inner, inner).map(lambda p: Mul(*p)),
        inner.map(Neg),
        st.lists(inner, min_size=1, max_size=3).map(lambda a: And(tuple(a))),
        st.lists(inner, min_size=1, max_size=3).map(lambda a: Or(tuple(a))),
        inner.map(Not),
        st.tuples(inner, inner).map(lambda p: Implies(*p)),
        st.lists(inner, min_size=1, max_size=4).map(lambda a: Distinct(tuple(a))),
        st.tuples(st.lists(_names, min_size=1, max_size=2, unique=True), inner).map(
            lambda p: ForAll(tuple(VarBind(n) for n in p[0]), p[1])
        ),
    )


terms_strategy = st.recursive(_leaf(), _extend, max_leaves=12)


@given(terms_strategy)
def test_print_parse_round_trip(term):
    printed = format_term(term)
    assert parse_expression(printed) == term


def _expression_strings(node):
    if isinstance(node, str):
        return
    if isinstance(node, list):
        for item in node:
            yield from _expression_strings(item)
        return
    if isinstance(node, dict):
        for key, value in node.items():
            if key in ("assertion", "constraint", "antecedent", "consequent", "expression") and isinstance(value, str):
                yield value
            elif key == "constraints" and isinstance(value, list):
                yield from (v for v in value if isinstance(v, str))
            else:
                yield from _expression_strings(value)


def test_round_trip_on_every_corpus_expression():
    import json

    from conftest import CORPUS_IDS, corpus_source

    seen = 0
    for case_id in CORPUS_IDS:
        doc = json.loads(corpus_source(case_id))
        strings = list(_expression_strings(doc)) + [
            entry for entry in doc.get("knowledge_base", doc.get("knowledgebase", [])) if isinstance(entry, str)
        ]
        for source in strings:
            term = parse_expression(source)
            assert parse_expression(format_term(term)) == term, source
            seen += 1
    assert seen >= 60
