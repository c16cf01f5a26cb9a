import dataclasses
import json

import pytest

from folcheck.engine import (
    EngineConfig,
    apply_transform,
    closure_sensitive,
    differential_check,
    extract_smt_model,
    optimize_program,
    run_actions,
    verify_model,
    verify_program,
)
from folcheck.finite import enumerate_check, ground_domains
from folcheck.solver import SolverConfig

from conftest import corpus_program, corpus_source

ENUM = EngineConfig(backend="enum")


def test_trace1_unsat_false():
    report = verify_program(corpus_program("trace1_sotomayor_giraffe"), ENUM)
    assert report.base_consistent is True
    assert report.verifications[0].verdict.status == "UNSAT"
    assert report.answer is False


def test_trace2_sat_true():
    report = verify_program(corpus_program("trace2_cherokee_delegation"), ENUM)
    assert report.answer is True


def test_hse1_base_inconsistent_and_both_verifications_unsat():
    report = verify_program(corpus_program("hse1_hardhat_harness"), ENUM)
    assert report.base_consistent is False
    assert [v.verdict.status for v in report.verifications] == ["UNSAT", "UNSAT"]
    # two verifications: no single overall answer
    assert report.answer is None


def test_answer_absent_when_status_unknown():
    doc = {
        "sorts": [{"name": "Person", "type": "DeclareSort"}],
        "functions": [{"name": "weight", "domain": ["Person"], "range": "Real"}],
        "constants": {"persons": {"sort": "Person", "members": ["ann"]}},
        "verifications": [{"name": "v", "constraint": "weight(ann) > 3.5"}],
        "actions": ["verify_conditions"],
    }
    report = run_actions(json.dumps(doc), ENUM)
    assert report.verifications[0].verdict.status == "UNKNOWN"
    assert report.answer is None


def test_verify_smt_backend(solver_config):
    config = EngineConfig(backend="smt", solver=solver_config)
    report = verify_program(corpus_program("trace1_sotomayor_giraffe"), config)
    assert report.verifications[0].verdict.status == "UNSAT"
    assert report.verifications[0].verdict.backend == "smt"


def test_both_backend_falls_back_to_enum_when_solver_missing():
    config = EngineConfig(backend="both", solver=SolverConfig("/nonexistent/z3", (), 1000))
    report = verify_program(corpus_program("trace2_cherokee_delegation"), config)
    assert report.verifications[0].verdict.status == "SAT"
    assert report.verifications[0].verdict.backend == "enum"


def test_smt_backend_reports_unknown_when_solver_missing():
    config = EngineConfig(backend="smt", solver=SolverConfig("/nonexistent/z3", (), 1000))
    report = verify_program(corpus_program("trace2_cherokee_delegation"), config)
    assert report.verifications[0].verdict.status == "UNKNOWN"
    assert any(d.category == "SolverFailure" for d in report.verifications[0].diagnostics)


def test_optimize_enum_values_exact():
    report = optimize_program(corpus_program("sat10_resource_allocation"), dataclasses.replace(ENUM, int_window=(-512, 512)))
    assert report.status == "OPTIMAL"
    assert report.values == (80,)


def test_optimize_smt_falls_back_on_unbounded_objective(solver_config):
    config = EngineConfig(backend="smt", solver=solver_config, int_window=(-512, 512))
    report = optimize_program(corpus_program("sat10_resource_allocation"), config)
    assert report.status == "OPTIMAL"
    assert report.values == (80,)
    assert report.backend == "enum"
    assert any(d.category == "UnsupportedConstruct" for d in report.diagnostics)


def test_optimize_smt_infeasible(solver_config):
    config = EngineConfig(backend="smt", solver=solver_config)
    report = optimize_program(corpus_program("unsat09_impossible_optimization"), config)
    assert report.status == "INFEASIBLE"
    assert report.backend == "smt"


def test_optimize_smt_bounded_objective_stays_on_smt(solver_config):
    doc = {
        "optimization": {
            "constraints": ["x > 5", "x < 9"],
            "objectives": [{"type": "minimize", "expression": "x"}],
        },
        "actions": ["optimize"],
    }
    config = EngineConfig(backend="smt", solver=solver_config)
    from folcheck.checker import check_program
    from folcheck.loader import parse_program

    report = optimize_program(check_program(parse_program(json.dumps(doc))), config)
    assert report.status == "OPTIMAL"
    assert report.backend == "smt"
    assert report.values == (6,)


# -- run_actions ---------------------------------------------------------------


def test_run_actions_hse3():
    report = run_actions(corpus_source("hse3_fall_protection"), ENUM)
    assert [v.verdict.status for v in report.verifications] == ["UNSAT"]
    assert report.base_consistent is False


def test_run_actions_malformed_json_short_circuits():
    report = run_actions("{broken", ENUM)
    assert [d.category for d in report.diagnostics] == ["JsonSyntax"]
    assert report.verifications == ()


def test_run_actions_no_actions_diagnostic():
    report = run_actions("{}", ENUM)
    assert [d.category for d in report.diagnostics] == ["NoActions"]


def test_run_actions_verify_and_optimize_sequence():
    doc = json.loads(corpus_source("sat10_resource_allocation"))
    doc["verifications"] = [{"name": "always", "constraint": "True"}]
    doc["actions"] = ["verify_conditions", "optimize"]
    report = run_actions(json.dumps(doc), dataclasses.replace(ENUM, int_window=(-512, 512)))
    assert report.verifications[0].verdict.status == "SAT"
    assert report.optimization.status == "OPTIMAL"


def test_report_json_shape():
    report = run_actions(corpus_source("trace1_sotomayor_giraffe"), ENUM)
    payload = report.to_json()
    assert set(payload) == {"base_consistent", "verifications", "optimization", "attempts_used", "diagnostics"}
    assert payload["verifications"][0]["name"] == "Sotomayor Jump Over Giraffe"
    assert payload["verifications"][0]["answer"] is False


# -- transforms ----------------------------------------------------------------


@pytest.mark.parametrize("mode", ["simplify", "prenex"])
def test_transforms_preserve_trace_verdicts(mode):
    for case_id, expected in (("trace1_sotomayor_giraffe", False), ("trace2_cherokee_delegation", True)):
        config = dataclasses.replace(ENUM, transform=mode)
        report = verify_program(corpus_program(case_id), config)
        assert report.answer is expected


def test_apply_transform_keeps_types():
    from folcheck.terms import walk

    tp = apply_transform(corpus_program("sat07_fall_protection_height"), "prenex")
    for assertion in tp.assertions:
        assert all(t.sort is not None for t in walk(assertion.formula))


# -- closure sensitivity / differential ----------------------------------------


def test_exists_over_declared_sort_is_sensitive():
    tp = corpus_program("sat06_graph_coloring")
    assert closure_sensitive([tp.goals[0].formula])


def test_exists_over_int_not_sensitive():
    tp = corpus_program("sat01_simple_arithmetic")
    assert not closure_sensitive([tp.goals[0].formula])


def test_negated_universal_over_declared_sort_is_sensitive():
    from folcheck.exprparse import parse_expression
    from folcheck.terms import ForAll, Not, VarBind, BOOL, Sort, SortKind

    person = Sort("Person", SortKind.DECLARED)
    inner = ForAll((VarBind("p", person),), parse_expression("Safe(p)"), sort=BOOL)
    assert closure_sensitive([Not(inner, sort=BOOL)])
    assert not closure_sensitive([inner])


def test_differential_agreement_on_pigeonhole(solver_config):
    config = EngineConfig(solver=solver_config)
    report = differential_check(corpus_source("unsat01_pigeonhole"), config)
    assert all(c.agrees for c in report.cases if not c.skipped)
    assert not report.defects


def test_differential_skips_closure_sensitive_goal(solver_config):
    config = EngineConfig(solver=solver_config)
    report = differential_check(corpus_source("sat06_graph_coloring"), config)
    against = {c.name: c for c in report.cases}
    assert against["Verify Coloring"].skipped
    assert against["Verify Coloring"].reason == "closure-sensitive"
    assert against["base"].agrees


def test_differential_detects_seeded_defect(solver_config):
    # an emitter that drops the rules flips HSE ex. 1's verdicts on the
    # solver side; the differential check must surface the disagreement
    import folcheck.engine as engine_module
    from folcheck.smtlib import emit_smtlib as real_emit

    def broken_emit(tp, goal=None, produce_models=False):
        crippled = dataclasses.replace(tp, rules=())
        return real_emit(crippled, goal, produce_models)

    config = EngineConfig(solver=solver_config)
    original = engine_module.emit_smtlib
    engine_module.emit_smtlib = broken_emit
    try:
        report = differential_check(corpus_source("hse1_hardhat_harness"), config)
    finally:
        engine_module.emit_smtlib = original
    assert report.defects


# -- model extraction / validation ----------------------------------------------


@pytest.mark.parametrize(
    "case_id",
    ["trace2_cherokee_delegation", "sat02_hardhat_compliance", "sat03_parent_child", "sat05_scheduling"],
)
def test_smt_models_revalidate(case_id, solver_config):
    config = EngineConfig(solver=solver_config)
    tp = corpus_program(case_id)
    goal = tp.goals[0].formula
    extraction = extract_smt_model(tp, goal, config)
    assert extraction is not None
    assignment, domains, extra_ints = extraction
    assert verify_model(tp, goal, assignment, domains, extra_ints) == []


def test_enum_models_revalidate():
    tp = corpus_program("sat04_transitive_relation")
    domains = ground_domains(tp)
    outcome = enumerate_check(tp, tp.goals[0].formula, domains)
    assert outcome.status == "SAT"
    assert verify_model(tp, tp.goals[0].formula, outcome.assignment, domains) == []
