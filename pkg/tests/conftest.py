from __future__ import annotations

import json
from pathlib import Path

import pytest

from folcheck.checker import check_program
from folcheck.loader import parse_program
from folcheck.solver import default_solver_config

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

CORPUS_IDS = [
    "trace1_sotomayor_giraffe",
    "trace2_cherokee_delegation",
    "hse1_hardhat_harness",
    "hse2_forklift_pallet",
    "hse3_fall_protection",
    "sat01_simple_arithmetic",
    "sat02_hardhat_compliance",
    "sat03_parent_child",
    "sat04_transitive_relation",
    "sat05_scheduling",
    "sat06_graph_coloring",
    "sat07_fall_protection_height",
    "sat08_electrical_safety",
    "sat09_chemical_handling",
    "sat10_resource_allocation",
    "unsat01_pigeonhole",
    "unsat02_graph_coloring_k4",
    "unsat03_contradictory_constraints",
    "unsat04_boolean_cnf",
    "unsat05_mutual_exclusivity",
    "unsat06_inconsistent_equations",
    "unsat07_scheduling_conflict",
    "unsat08_self_parenting",
    "unsat09_impossible_optimization",
]


def corpus_source(case_id: str) -> str:
    return (CORPUS_DIR / f"{case_id}.json").read_text()


def corpus_program(case_id: str):
    return check_program(parse_program(corpus_source(case_id)))


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture(scope="session")
def solver_config():
    config = default_solver_config()
    if config is None:
        pytest.skip("no SMT solver available (install z3 or `npm install -g z3-solver`)")
    return config


@pytest.fixture(scope="session")
def corpus_labels() -> list[dict]:
    return json.loads((CORPUS_DIR / "labels.json").read_text())
