"""Command-line entry point.

Subcommands: check, verify, optimize, emit-smt, diff, bench, repair.
Exit codes: 0 success (SAT / true / all-expected), 1 UNSAT-or-false (or
bench mismatches / diff defects), 2 diagnostics or usage errors, 3
infrastructure failures (no solver, UNKNOWN verdicts).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checker import check_program
from .diagnostics import ProgramError
from .engine import (
    EngineConfig,
    Report,
    differential_check,
    repair_loop,
    report_to_json_text,
    verify_program,
)
from .harness import load_labels, run_corpus
from .loader import parse_program
from .smtlib import emit_optimize, emit_smtlib
from .solver import SolverConfig

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_DIAGNOSTICS = 2
EXIT_INFRASTRUCTURE = 3


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=("smt", "enum", "both"), default="both")
    common.add_argument("--solver-cmd", help="external solver executable (default: discover z3, then the bundled node wrapper)")
    common.add_argument("--solver-arg", action="append", default=[], help="argument for the solver command (repeatable)")
    common.add_argument("--timeout-ms", type=int, default=30_000)
    common.add_argument("--int-window", default="-16:16", metavar="LO:HI", help="integer window for the enum backend (use --int-window=-512:512 for negatives)")
    common.add_argument("--enum-budget", type=int, default=10_000_000)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--max-attempts", type=int, default=3)
    common.add_argument("--jobs", type=int, default=1)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="folcheck", description=__doc__)
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("check", "parse and type-check only"),
        ("verify", "run every verification and report verdicts"),
        ("optimize", "run the optimization block"),
        ("emit-smt", "print the SMT-LIB2 script(s)"),
        ("diff", "compare the SMT and enum backends"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=helptext)
        cmd.add_argument("file")
    bench = sub.add_parser("bench", parents=[common], help="run a labeled corpus and compute metrics")
    bench.add_argument("directory")
    bench.add_argument("--labels", required=True)
    repair = sub.add_parser("repair", parents=[common], help="run the bounded repair loop against a reviser endpoint")
    repair.add_argument("file")
    repair.add_argument("--reviser-url")
    return parser


def _parse_window(text: str) -> tuple[int, int]:
    try:
        lo_text, hi_text = text.split(":", 1)
        lo, hi = int(lo_text), int(hi_text)
    except ValueError:
        raise SystemExit(f"folcheck: bad --int-window {text!r}; expected LO:HI")
    if lo > hi:
        raise SystemExit(f"folcheck: bad --int-window {text!r}; LO must not exceed HI")
    return lo, hi


def _config(args: argparse.Namespace) -> EngineConfig:
    solver = None
    if args.solver_cmd:
        solver = SolverConfig(args.solver_cmd, tuple(args.solver_arg), args.timeout_ms)
    return EngineConfig(
        backend=args.backend,
        solver=solver,
        int_window=_parse_window(args.int_window),
        enum_budget=args.enum_budget,
        max_attempts=args.max_attempts,
        jobs=args.jobs,
        timeout_ms=args.timeout_ms,
    )


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        print(f"folcheck: cannot read {path}: {err}", file=sys.stderr)
        raise SystemExit(EXIT_INFRASTRUCTURE)


def _print_diagnostics(err: ProgramError, fmt: str) -> int:
    if fmt == "json":
        print(report_to_json_text([d.to_json() for d in err.diagnostics]), end="")
    else:
        for diag in err.diagnostics:
            print(diag)
    return EXIT_DIAGNOSTICS


def _verdict_exit(report: Report) -> int:
    if report.diagnostics:
        return EXIT_DIAGNOSTICS
    statuses = [v.verdict.status for v in report.verifications]
    if any(s == "UNKNOWN" for s in statuses):
        return EXIT_INFRASTRUCTURE
    if any(s == "UNSAT" for s in statuses):
        return EXIT_NEGATIVE
    return EXIT_OK


def _print_report(report: Report, fmt: str) -> None:
    if fmt == "json":
        print(report_to_json_text(report.to_json()), end="")
        return
    for diag in report.diagnostics:
        print(diag)
    if report.base_consistent is not None or report.verifications:
        base = {True: "true", False: "false", None: "unknown"}[report.base_consistent]
        print(f"base consistent: {base}")
    for outcome in report.verifications:
        print(f"{outcome.name}: {outcome.verdict.status}")
    if report.optimization is not None:
        opt = report.optimization
        if opt.status == "OPTIMAL":
            values = ", ".join(str(v) for v in opt.values)
            print(f"OPTIMAL ({values}) [backend {opt.backend}]")
        else:
            print(opt.status)
    if report.answer is not None:
        status = report.verifications[0].verdict.status
        print(f"{status} ({report.answer})")


def cmd_check(args: argparse.Namespace) -> int:
    try:
        check_program(parse_program(_read(args.file)))
    except ProgramError as err:
        return _print_diagnostics(err, args.format)
    if args.format == "json":
        print(report_to_json_text([]), end="")
    else:
        print("ok")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = _config(args)
    try:
        tp = check_program(parse_program(_read(args.file)))
    except ProgramError as err:
        return _print_diagnostics(err, args.format)
    report = verify_program(tp, config)
    _print_report(report, args.format)
    return _verdict_exit(report)


def cmd_optimize(args: argparse.Namespace) -> int:
    from .engine import optimize_program

    config = _config(args)
    try:
        tp = check_program(parse_program(_read(args.file)))
    except ProgramError as err:
        return _print_diagnostics(err, args.format)
    report = Report(optimization=optimize_program(tp, config))
    _print_report(report, args.format)
    status = report.optimization.status  # type: ignore[union-attr]
    if report.optimization.diagnostics and status == "UNKNOWN":  # type: ignore[union-attr]
        return EXIT_INFRASTRUCTURE
    return {"OPTIMAL": EXIT_OK, "INFEASIBLE": EXIT_NEGATIVE}.get(status, EXIT_INFRASTRUCTURE)


def cmd_emit_smt(args: argparse.Namespace) -> int:
    try:
        tp = check_program(parse_program(_read(args.file)))
    except ProgramError as err:
        return _print_diagnostics(err, args.format)
    scripts: list[str] = []
    if tp.goals:
        if len(tp.goals) == 1:
            scripts.append(emit_smtlib(tp, tp.goals[0].formula))
        else:
            for goal in tp.goals:
                scripts.append(f"; verification: {goal.name}\n" + emit_smtlib(tp, goal.formula))
    if tp.optimization is not None and tp.optimization.objectives:
        scripts.append(emit_optimize(tp))
    if not scripts:
        scripts.append(emit_smtlib(tp))
    sys.stdout.write("\n".join(scripts))
    return EXIT_OK


def cmd_diff(args: argparse.Namespace) -> int:
    config = _config(args)
    report = differential_check(_read(args.file), config)
    if args.format == "json":
        print(report_to_json_text(report.to_json()), end="")
    else:
        for diag in report.diagnostics:
            print(diag)
        for case in report.cases:
            if case.skipped:
                print(f"{case.name}: skipped ({case.reason})")
            else:
                marker = {True: "agree", False: "DISAGREE", None: "undecided"}[case.agrees]
                print(f"{case.name}: smt={case.smt_status} enum={case.enum_status} {marker}")
    if report.diagnostics:
        return EXIT_DIAGNOSTICS
    return EXIT_NEGATIVE if report.defects else EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = _config(args)
    try:
        labels = load_labels(args.labels)
    except (OSError, ValueError) as err:
        print(f"folcheck: bad labels file: {err}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    summary, results, diagnostics = run_corpus(args.directory, labels, config)
    if args.format == "json":
        payload = {
            "summary": summary.to_json(),
            "cases": [r.to_json() for r in results],
            "diagnostics": [d.to_json() for d in diagnostics],
        }
        print(report_to_json_text(payload), end="")
    else:
        for diag in diagnostics:
            print(diag)
        for result in results:
            marker = "ok" if result.matched else "MISMATCH"
            print(f"{result.case.id}: expected {result.case.expected}, got {result.outcome} [{marker}]")
        rates = summary.to_json()
        print(
            f"total {summary.total}, compiled {summary.compiled}, "
            f"accuracy {rates['accuracy']}, precision {rates['precision']}, recall {rates['recall']}"
        )
    return EXIT_OK if all(r.matched for r in results) else EXIT_NEGATIVE


def cmd_repair(args: argparse.Namespace) -> int:
    config = _config(args)
    outcome = repair_loop(_read(args.file), args.reviser_url, config)
    if args.format == "json":
        print(report_to_json_text(outcome.to_json()), end="")
    else:
        print(f"attempts used: {outcome.attempts_used}")
        if outcome.reviser_error:
            print(f"reviser error: {outcome.reviser_error}")
        _print_report(outcome.report, args.format)
    if not outcome.succeeded:
        return EXIT_DIAGNOSTICS
    return _verdict_exit(outcome.report)


_COMMANDS = {
    "check": cmd_check,
    "verify": cmd_verify,
    "optimize": cmd_optimize,
    "emit-smt": cmd_emit_smt,
    "diff": cmd_diff,
    "bench": cmd_bench,
    "repair": cmd_repair,
}


def cli_main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
