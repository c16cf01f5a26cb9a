"""folcheck: a verifier for a JSON-based first-order-logic DSL.

Programs declare sorts, functions, constants, a knowledge base, rules,
verifications and an optional optimization block; the engine discharges
them through an external SMT solver (SMT-LIB2 over a child process) or an
internal finite-domain enumerator, maps SAT/UNSAT to boolean answers, and
feeds structured diagnostics to a bounded repair loop.
"""

from .checker import TypedProgram, check_program, check_term
from .diagnostics import Diagnostic, ProgramError, SourceSpan
from .engine import (
    AgreementReport,
    EngineConfig,
    Report,
    differential_check,
    optimize_program,
    repair_loop,
    run_actions,
    verify_program,
)
from .exprparse import parse_expression
from .finite import (
    Assignment,
    DomainMap,
    enumerate_check,
    enumerate_optimize,
    eval_ground_term,
    ground_domains,
)
from .loader import parse_program
from .program import Program, Verdict, canonicalize
from .rewrite import simplify, to_prenex
from .smtlib import emit_optimize, emit_smtlib
from .solver import SolverConfig, SolverOutcome, run_solver
from .symtab import SymbolTable, build_symbol_table
from .terms import Term, format_term

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "Assignment",
    "Diagnostic",
    "DomainMap",
    "EngineConfig",
    "Program",
    "ProgramError",
    "Report",
    "SolverConfig",
    "SolverOutcome",
    "SourceSpan",
    "SymbolTable",
    "Term",
    "TypedProgram",
    "Verdict",
    "build_symbol_table",
    "canonicalize",
    "check_program",
    "check_term",
    "differential_check",
    "emit_optimize",
    "emit_smtlib",
    "enumerate_check",
    "enumerate_optimize",
    "eval_ground_term",
    "format_term",
    "ground_domains",
    "optimize_program",
    "parse_expression",
    "parse_program",
    "repair_loop",
    "run_actions",
    "run_solver",
    "simplify",
    "to_prenex",
    "verify_program",
]
