import sys
from fractions import Fraction

import pytest

from folcheck.solver import (
    SolverConfig,
    SolverError,
    parse_sexprs,
    run_solver,
    sexpr_to_value,
)


def python_solver(body: str, timeout_ms: int = 10_000) -> SolverConfig:
    """A stub honoring the child-process contract: script on stdin, result on
    stdout."""
    return SolverConfig(sys.executable, ("-c", body), timeout_ms)


def test_stub_sat_with_model_text():
    config = python_solver(
        "import sys; sys.stdin.read(); print('sat'); print('(model (define-fun x () Int 3))')"
    )
    outcome = run_solver("(check-sat)", config)
    assert outcome.status == "SAT"
    assert "define-fun x" in outcome.model_text


def test_stub_unsat():
    outcome = run_solver("x", python_solver("import sys; sys.stdin.read(); print('unsat')"))
    assert outcome.status == "UNSAT"
    assert outcome.model_text is None


def test_stub_unknown():
    outcome = run_solver("x", python_solver("import sys; sys.stdin.read(); print('unknown')"))
    assert outcome.status == "UNKNOWN"


def test_script_is_delivered_on_stdin():
    config = python_solver(
        "import sys; text = sys.stdin.read(); print('sat' if '(check-sat)' in text else 'unsat')"
    )
    assert run_solver("(check-sat)", config).status == "SAT"
    assert run_solver("nothing", config).status == "UNSAT"


def test_timeout_returns_unknown_with_diagnostic():
    config = python_solver("import time; time.sleep(60)", timeout_ms=300)
    outcome = run_solver("x", config)
    assert outcome.status == "UNKNOWN"
    assert outcome.diagnostics[0].category == "Timeout"


def test_spawn_failure_raises_solver_error():
    config = SolverConfig("/nonexistent/solver-binary", (), 1000)
    with pytest.raises(SolverError):
        run_solver("(check-sat)", config)


def test_garbage_output_raises_solver_error():
    config = python_solver("import sys; sys.stdin.read(); print('segfault imminent')")
    with pytest.raises(SolverError) as excinfo:
        run_solver("x", config)
    assert excinfo.value.diagnostic.category == "SolverFailure"


def test_error_line_before_verdict_raises():
    config = python_solver(
        "import sys; sys.stdin.read(); print('(error \"unknown constant x\")'); print('sat')"
    )
    with pytest.raises(SolverError):
        run_solver("x", config)


def test_objectives_block_extracted():
    body = (
        "import sys; sys.stdin.read(); print('sat'); "
        "print('(objectives'); print(' ((+ a b) 80)'); print(')')"
    )
    outcome = run_solver("x", python_solver(body))
    assert outcome.objectives_text == "(objectives\n ((+ a b) 80)\n)"


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig("", (), 1000)
    with pytest.raises(ValueError):
        SolverConfig("z3", (), 0)


def test_real_solver_round_trip(solver_config):
    outcome = run_solver("(check-sat)\n", solver_config)
    assert outcome.status == "SAT"
    outcome = run_solver(
        "(declare-const p Bool)(assert (and p (not p)))(check-sat)\n", solver_config
    )
    assert outcome.status == "UNSAT"


# -- s-expression values -------------------------------------------------------


def test_parse_sexprs_nested():
    parsed = parse_sexprs("((x 3) (y (- 2)))")
    assert parsed == [[["x", "3"], ["y", ["-", "2"]]]]


def test_sexpr_values():
    assert sexpr_to_value("true") is True
    assert sexpr_to_value("false") is False
    assert sexpr_to_value("42") == 42
    assert sexpr_to_value(["-", "5"]) == -5
    assert sexpr_to_value(["/", "49.0", "20.0"]) == Fraction(49, 20)
    assert sexpr_to_value(["-", ["/", "1", "3"]]) == Fraction(-1, 3)
    assert sexpr_to_value("h2") == "h2"
    assert sexpr_to_value("Person!val!0") == "Person!val!0"
    assert sexpr_to_value("|quoted atom|".replace(" ", "_")) == "quoted_atom"


def test_sexpr_infinity_is_not_a_value():
    assert sexpr_to_value("oo") is None
    assert sexpr_to_value(["*", ["-", "1"], "oo"]) is None


def test_sexpr_comments_skipped():
    parsed = parse_sexprs("; a comment\n(x 1)")
    assert parsed == [["x", "1"]]
