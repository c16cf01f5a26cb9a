import json

import pytest

from folcheck.cli import cli_main

from conftest import CORPUS_DIR


def run_cli(capsys, *argv):
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def corpus_file(case_id: str) -> str:
    return str(CORPUS_DIR / f"{case_id}.json")


def test_verify_trace1_prints_unsat_false_and_exits_1(capsys):
    code, out = run_cli(
        capsys, "verify", corpus_file("trace1_sotomayor_giraffe"), "--backend", "enum"
    )
    assert "UNSAT (False)" in out
    assert code == 1


def test_verify_trace2_exits_0(capsys):
    code, out = run_cli(
        capsys, "verify", corpus_file("trace2_cherokee_delegation"), "--backend", "enum"
    )
    assert "SAT (True)" in out
    assert code == 0


def test_verify_json_format(capsys):
    code, out = run_cli(
        capsys,
        "verify",
        corpus_file("trace1_sotomayor_giraffe"),
        "--backend",
        "enum",
        "--format",
        "json",
    )
    payload = json.loads(out)
    assert payload["base_consistent"] is True
    assert payload["verifications"][0]["status"] == "UNSAT"
    assert code == 1


def test_check_clean_program(capsys):
    code, out = run_cli(capsys, "check", corpus_file("sat04_transitive_relation"))
    assert code == 0
    assert out.strip() == "ok"


def test_check_reports_diagnostics_and_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"knowledge_base": ["ghost(1)"], "actions": ["verify_conditions"]}))
    code, out = run_cli(capsys, "check", str(bad))
    assert code == 2
    assert "UndefinedSymbol" in out


def test_emit_smt_outputs_script(capsys):
    code, out = run_cli(capsys, "emit-smt", corpus_file("unsat04_boolean_cnf"))
    assert code == 0
    assert "(assert (and A (not A)))" in out
    assert out.startswith("(set-logic ALL)")


def test_emit_smt_multi_verification_separators(capsys):
    code, out = run_cli(capsys, "emit-smt", corpus_file("hse1_hardhat_harness"))
    assert code == 0
    assert "; verification: Verify Hard Hat Compliance" in out
    assert "; verification: Verify Harness Compliance" in out


def test_optimize_exit_codes(capsys):
    code, out = run_cli(
        capsys,
        "optimize",
        corpus_file("sat10_resource_allocation"),
        "--backend",
        "enum",
        "--int-window=-512:512",
    )
    assert code == 0
    assert "OPTIMAL (80)" in out
    code, out = run_cli(
        capsys, "optimize", corpus_file("unsat09_impossible_optimization"), "--backend", "enum"
    )
    assert code == 1
    assert "INFEASIBLE" in out


def test_bench_text_and_exit(capsys):
    code, out = run_cli(
        capsys,
        "bench",
        str(CORPUS_DIR),
        "--labels",
        str(CORPUS_DIR / "labels.json"),
        "--backend",
        "enum",
    )
    assert code == 0
    assert "total 24, compiled 24" in out


def test_bench_json_deterministic(capsys):
    argv = (
        "bench",
        str(CORPUS_DIR),
        "--labels",
        str(CORPUS_DIR / "labels.json"),
        "--backend",
        "enum",
        "--format",
        "json",
    )
    code1, out1 = run_cli(capsys, *argv)
    code2, out2 = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_diff_enum_vs_smt_exit(capsys, solver_config):
    code, out = run_cli(capsys, "diff", corpus_file("unsat03_contradictory_constraints"))
    assert code == 0
    assert "agree" in out


def test_int_window_flag_validation(capsys):
    with pytest.raises(SystemExit):
        cli_main(["verify", corpus_file("sat01_simple_arithmetic"), "--int-window", "zz"])


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as excinfo:
        cli_main(["no-such-command"])
    assert excinfo.value.code == 2


def test_missing_file_is_infrastructure_failure(capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli_main(["verify", "/nonexistent/prog.json"])
    assert excinfo.value.code == 3


def test_repair_without_reviser(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"knowledge_base": ["ghost(1)"], "actions": ["verify_conditions"]}))
    code, out = run_cli(capsys, "repair", str(bad), "--backend", "enum")
    assert code == 2
    assert "attempts used: 1" in out
