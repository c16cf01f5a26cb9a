from hypothesis import given
from hypothesis import strategies as st

from folcheck.exprparse import parse_expression
from folcheck.finite import DomainMap, eval_ground_term
from folcheck.rewrite import simplify, substitute, to_prenex
from folcheck.terms import (
    And,
    Apply,
    BoolLit,
    Eq,
    Exists,
    ForAll,
    IntLit,
    Not,
    Or,
    Quantifier,
    RatLit,
    SymbolRef,
    Term,
    walk,
)

from conftest import CORPUS_IDS, corpus_program


def simp(source: str) -> Term:
    return simplify(parse_expression(source))


def test_double_negation_eliminated():
    assert simp("Not(Not(Worker(p)))") == parse_expression("Worker(p)")


def test_and_true_identity():
    assert simp("And(Worker(p), true)") == parse_expression("Worker(p)")


def test_ground_real_comparison_folds():
    assert simp("2.45 >= 5.5") == BoolLit(False)


def test_and_with_false_literal_collapses():
    assert simp("And(x > 1, false, y < 2)") == BoolLit(False)


def test_or_with_true_literal_collapses():
    assert simp("Or(A, true, B)") == BoolLit(True)


def test_nested_conjunctions_flatten():
    result = simp("And(And(a, b), And(c, d))")
    assert isinstance(result, And)
    assert len(result.args) == 4


def test_unary_and_or_collapse_to_operand():
    assert simp("And(x > 1)") == simp("x > 1")
    assert simp("Or(x > 1)") == simp("x > 1")


def test_ground_arithmetic_folds():
    assert simp("1 + 2 * 3 == 7") == BoolLit(True)
    assert simp("2 * 3 - 10 < 0") == BoolLit(True)
    assert simp("-(2 + 3)") == IntLit(-5)


def test_decimal_arithmetic_is_exact():
    assert simp("0.1 + 0.2 == 0.3") == BoolLit(True)


def test_reflexive_equality_folds():
    assert simp("x == x") == BoolLit(True)
    assert simp("Distinct(x, x)") == BoolLit(False)


def test_declared_constant_equality_not_folded():
    # e1 and e2 may alias in a model; only enum values are distinct by
    # construction
    tp = corpus_program("unsat05_mutual_exclusivity")
    kb0 = simplify(tp.knowledge[0].formula)
    assert not isinstance(kb0, BoolLit)


def test_enum_value_equality_folds():
    tp = corpus_program("unsat02_graph_coloring_k4")
    rule = tp.rules[0].formula
    body = substitute(
        rule.body,
        {"n1": SymbolRef("n1", sort=rule.binders[0].sort), "n2": SymbolRef("n1", sort=rule.binders[0].sort)},
    )
    # antecedent contains n1 != n1 over enum values -> instance is vacuous
    assert simplify(body) == BoolLit(True)


def test_implies_literal_folding():
    assert simp("Implies(true, Worker(p))") == parse_expression("Worker(p)")
    assert simp("Implies(false, Worker(p))") == BoolLit(True)
    assert simp("Implies(Worker(p), true)") == BoolLit(True)
    assert simp("Implies(Worker(p), false)") == simp("Not(Worker(p))")


def test_simplify_idempotent_on_corpus():
    for case_id in CORPUS_IDS:
        tp = corpus_program(case_id)
        for assertion in tp.assertions:
            once = simplify(assertion.formula)
            assert simplify(once) == once


_ground_leaf = st.one_of(
    st.integers(min_value=-20, max_value=20).map(IntLit),
    st.booleans().map(BoolLit),
    st.fractions(min_value=-5, max_value=5, max_denominator=100).map(RatLit),
)


def _ground_extend(inner):
    from folcheck.terms import Implies, Le, Lt, Neq

    numeric = st.one_of(
        st.integers(min_value=-20, max_value=20).map(IntLit),
        st.fractions(min_value=-5, max_value=5, max_denominator=100).map(RatLit),
    )
    return st.one_of(
        st.tuples(numeric, numeric).map(lambda p: Eq(*p)),
        st.tuples(numeric, numeric).map(lambda p: Neq(*p)),
        st.tuples(numeric, numeric).map(lambda p: Lt(*p)),
        st.tuples(numeric, numeric).map(lambda p: Le(*p)),
        st.lists(inner, min_size=1, max_size=3).map(lambda a: And(tuple(a))),
        st.lists(inner, min_size=1, max_size=3).map(lambda a: Or(tuple(a))),
        inner.map(Not),
        st.tuples(inner, inner).map(lambda p: Implies(*p)),
    )


_ground_formulas = st.recursive(st.booleans().map(BoolLit), _ground_extend, max_leaves=10)
_empty_domains = DomainMap({})


@given(_ground_formulas)
def test_simplify_preserves_ground_truth_value(term):
    before = eval_ground_term(term, {}, _empty_domains)
    after_term = simplify(term)
    after = eval_ground_term(after_term, {}, _empty_domains)
    assert before == after


# -- prenex ------------------------------------------------------------------


def prenex_of(source: str) -> Term:
    return to_prenex(parse_expression(source))


def _prefix_and_matrix(term: Term):
    prefix = []
    while isinstance(term, Quantifier):
        prefix.append(term)
        term = term.body
    return prefix, term


def test_prenex_pulls_quantifier_through_conjunction():
    result = prenex_of("And(ForAll([p], A(p)), B)")
    assert isinstance(result, ForAll)
    assert isinstance(result.body, And)


def test_prenex_identity_on_quantifier_free():
    term = parse_expression("x + 2 == 5")
    assert to_prenex(term) == term


def test_prenex_leaves_already_prenex_rule_unchanged():
    term = parse_expression("ForAll([g], Implies(send_delegation(g), oppose_allotment(g)))")
    assert to_prenex(term) == term


def test_prenex_flips_negated_universal():
    result = prenex_of("Not(ForAll([p], A(p)))")
    assert isinstance(result, Exists)
    assert isinstance(result.body, Not)


def test_prenex_flips_antecedent_polarity():
    result = prenex_of("Implies(ForAll([p], A(p)), B)")
    assert isinstance(result, Exists)


def test_prenex_renames_apart():
    result = prenex_of("And(ForAll([p], A(p)), Exists([p], B(p)))")
    prefix, _ = _prefix_and_matrix(result)
    names = [q.binders[0].name for q in prefix]
    assert len(set(names)) == 2


def test_prenex_no_quantifier_below_connectives():
    sources = [
        "And(ForAll([p], A(p)), Or(Exists([q], B(q)), C))",
        "Implies(Exists([p], A(p)), ForAll([q], B(q)))",
        "Not(And(ForAll([p], A(p)), Exists([q], And(B(q), ForAll([r], C(r, q))))))",
    ]
    for source in sources:
        result = to_prenex(parse_expression(source))
        _prefix, matrix = _prefix_and_matrix(result)
        assert not any(isinstance(t, Quantifier) for t in walk(matrix))


def test_prenex_binder_sets_disjoint():
    result = prenex_of(
        "And(ForAll([p], A(p)), Exists([p], B(p)), ForAll([p, q], C(p, q)))"
    )
    prefix, _ = _prefix_and_matrix(result)
    names = [b.name for q in prefix for b in q.binders]
    assert len(names) == len(set(names))


def test_prenex_expands_bool_equality_hosting_quantifier():
    result = prenex_of("ForAll([p], A(p)) == B")
    _prefix, matrix = _prefix_and_matrix(result)
    assert not any(isinstance(t, Quantifier) for t in walk(matrix))


def test_prenex_on_corpus_formulas_stays_well_formed():
    for case_id in CORPUS_IDS:
        tp = corpus_program(case_id)
        for assertion in list(tp.assertions) + [g for g in tp.goals]:
            formula = assertion.formula if hasattr(assertion, "formula") else assertion
            result = to_prenex(formula)
            _prefix, matrix = _prefix_and_matrix(result)
            assert not any(isinstance(t, Quantifier) for t in walk(matrix))
            # typed nodes keep their annotations
            assert all(t.sort is not None for t in walk(result))


def test_simplify_on_corpus_formulas_stays_well_formed():
    for case_id in CORPUS_IDS:
        tp = corpus_program(case_id)
        for assertion in tp.assertions:
            result = simplify(assertion.formula)
            assert all(t.sort is not None for t in walk(result))


def test_substitute_respects_shadowing():
    term = parse_expression("And(P(x), ForAll([x], Q(x)))")
    result = substitute(term, {"x": IntLit(7)})
    assert result.args[0] == Apply("P", (IntLit(7),))
    assert result.args[1].body == parse_expression("Q(x)")


def test_substitute_avoids_capture_by_inner_binder():
    # substituting the constant n2 for the outer variable must not let the
    # inner binder named n2 capture it (nested binders arise from prenexing
    # the K4 coloring rule)
    term = parse_expression("ForAll([n2], connected(n1, n2))")
    result = substitute(term, {"n1": SymbolRef("n2")})
    binder = result.binders[0].name
    assert binder != "n2"
    assert result.body == Apply("connected", (SymbolRef("n2"), SymbolRef(binder)))


def test_prenex_then_ground_preserves_k4_verdict():
    from folcheck.engine import apply_transform
    from folcheck.finite import enumerate_check, ground_domains

    tp = corpus_program("unsat02_graph_coloring_k4")
    transformed = apply_transform(tp, "prenex")
    outcome = enumerate_check(
        transformed, transformed.goals[0].formula, ground_domains(transformed)
    )
    assert outcome.status == "UNSAT"
