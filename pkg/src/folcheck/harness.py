"""Corpus/benchmark runner: labeled cases in, per-case results and a
MetricsSummary out.

The labels file is a JSON array of cases: {"id", "path", "expected",
"overrides"?}. Expected labels: "SAT", "UNSAT", "True", "False",
"OPTIMAL(<value>)", "INFEASIBLE", "COMPILE_ERROR". Paths are relative to
the corpus directory; overrides may pin a per-case int window or budget
(e.g. the 480-volt electrical example needs a wider window than the
default). Boolean-labeled cases feed the confusion matrix with answer=True
as the positive class.
"""

from __future__ import annotations

import dataclasses
import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .diagnostics import Diagnostic
from .engine import EngineConfig, Report, run_actions
from .metrics import MetricsSummary, confusion_summary

_EXPECTED_SIMPLE = frozenset({"SAT", "UNSAT", "True", "False", "INFEASIBLE", "COMPILE_ERROR"})
_OPTIMAL_RE = re.compile(r"OPTIMAL\((?P<value>-?\d+(?:/\d+)?(?:\.\d+)?)\)\Z")


@dataclass(frozen=True)
class CorpusCase:
    id: str
    path: str
    expected: str
    optimal_value: Fraction | None = None
    overrides: dict[str, Any] = dataclasses.field(default_factory=dict)

    def apply_overrides(self, config: EngineConfig) -> EngineConfig:
        updates: dict[str, Any] = {}
        if "int_window" in self.overrides:
            lo, hi = self.overrides["int_window"]
            updates["int_window"] = (int(lo), int(hi))
        if "enum_budget" in self.overrides:
            updates["enum_budget"] = int(self.overrides["enum_budget"])
        if "backend" in self.overrides:
            updates["backend"] = str(self.overrides["backend"])
        return dataclasses.replace(config, **updates) if updates else config


@dataclass(frozen=True)
class CaseResult:
    case: CorpusCase
    compiled: bool
    matched: bool
    outcome: str
    attempts_used: int
    answer: bool | None = None
    diagnostics: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.case.id,
            "expected": self.case.expected,
            "outcome": self.outcome,
            "compiled": self.compiled,
            "matched": self.matched,
            "answer": self.answer,
            "attempts_used": self.attempts_used,
            "diagnostics": list(self.diagnostics),
        }


def parse_expected(label: str) -> tuple[str, Fraction | None]:
    if label in _EXPECTED_SIMPLE:
        return label, None
    match = _OPTIMAL_RE.match(label)
    if match:
        text = match.group("value")
        return "OPTIMAL", Fraction(text)
    raise ValueError(f"unknown expected label {label!r}")


def load_labels(labels_path: str | Path) -> list[CorpusCase]:
    raw = json.loads(Path(labels_path).read_text())
    if not isinstance(raw, list):
        raise ValueError("labels file must be a JSON array of cases")
    cases = []
    for index, item in enumerate(raw):
        if not isinstance(item, dict) or not {"id", "path", "expected"} <= set(item):
            raise ValueError(f"labels entry {index} must carry id, path and expected")
        expected, value = parse_expected(str(item["expected"]))
        overrides = item.get("overrides", {})
        if not isinstance(overrides, dict):
            raise ValueError(f"labels entry {index}: overrides must be an object")
        cases.append(CorpusCase(str(item["id"]), str(item["path"]), expected if value is None else item["expected"], value, overrides))
    ids = [case.id for case in cases]
    if len(set(ids)) != len(ids):
        raise ValueError("case ids must be unique")
    return cases


def _expected_kind(case: CorpusCase) -> str:
    return "OPTIMAL" if case.optimal_value is not None else case.expected


def _describe(report: Report) -> str:
    if report.diagnostics:
        return "COMPILE_ERROR(" + ",".join(sorted({d.category for d in report.diagnostics})) + ")"
    parts = []
    if report.verifications:
        statuses = {v.verdict.status for v in report.verifications}
        parts.append(next(iter(statuses)) if len(statuses) == 1 else "MIXED")
    if report.optimization is not None:
        if report.optimization.status == "OPTIMAL":
            values = ",".join(str(v) for v in report.optimization.values)
            parts.append(f"OPTIMAL({values})")
        else:
            parts.append(report.optimization.status)
    return "+".join(parts) if parts else "NO-OP"


def _matches(case: CorpusCase, report: Report) -> bool:
    kind = _expected_kind(case)
    if kind == "COMPILE_ERROR":
        return bool(report.diagnostics)
    if report.diagnostics:
        return False
    if kind in ("True", "False"):
        return report.answer == (kind == "True")
    if kind in ("SAT", "UNSAT"):
        return bool(report.verifications) and all(
            v.verdict.status == kind for v in report.verifications
        )
    if kind == "OPTIMAL":
        opt = report.optimization
        return (
            opt is not None
            and opt.status == "OPTIMAL"
            and len(opt.values) >= 1
            and Fraction(opt.values[0]) == case.optimal_value
        )
    if kind == "INFEASIBLE":
        return report.optimization is not None and report.optimization.status == "INFEASIBLE"
    return False


def run_case(case: CorpusCase, root: Path, config: EngineConfig) -> CaseResult:
    config = case.apply_overrides(config)
    path = root / case.path
    try:
        source = path.read_text()
    except OSError as err:
        return CaseResult(case, False, False, f"unreadable: {err}", 0, None, ("SchemaViolation",))
    report = run_actions(source, config)
    compiled = not report.diagnostics
    return CaseResult(
        case,
        compiled,
        _matches(case, report),
        _describe(report),
        report.attempts_used,
        report.answer,
        tuple(d.category for d in report.diagnostics),
    )


def run_corpus(
    directory: str | Path,
    labels: list[CorpusCase],
    config: EngineConfig,
) -> tuple[MetricsSummary, list[CaseResult], list[Diagnostic]]:
    """Run every labeled case (in parallel up to config.jobs), merge results
    deterministically by case id, and flag unlabeled program files."""
    root = Path(directory)
    ordered = sorted(labels, key=lambda c: c.id)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(lambda c: run_case(c, root, config), ordered))
    else:
        results = [run_case(case, root, config) for case in ordered]

    diagnostics: list[Diagnostic] = []
    labeled_paths = {str((root / case.path).resolve()) for case in ordered}
    for candidate in sorted(root.glob("*.json")):
        if candidate.name == "labels.json":
            continue
        if str(candidate.resolve()) not in labeled_paths:
            diagnostics.append(
                Diagnostic(
                    "SchemaViolation",
                    f"program file {candidate.name} has no label; case skipped",
                )
            )

    pairs: list[tuple[bool, bool | None]] = []
    per_attempt: dict[int, int] = {}
    unresolved = 0
    compiled = 0
    for result in results:
        if result.compiled:
            compiled += 1
            per_attempt[result.attempts_used] = per_attempt.get(result.attempts_used, 0) + 1
        else:
            unresolved += 1
        if result.case.expected in ("True", "False"):
            expected = result.case.expected == "True"
            pairs.append((expected, result.answer if result.compiled else None))
    summary = confusion_summary(pairs, len(results), compiled, per_attempt, unresolved)
    return summary, results, diagnostics
