"""Benchmark metrics: compile rate, confusion matrix, and derived rates.

Rates are exact rationals (Fraction), never floats: the acceptance suite
compares them by exact equality, and JSON output renders them as reduced
fraction strings ("3/4") so two runs are byte-identical. A rate whose
denominator is empty (no labeled cases, no predicted positives, ...) is
reported absent (null), not NaN; F1 is defined as 0 when precision and
recall are both present but sum to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


@dataclass(frozen=True)
class MetricsSummary:
    total: int
    compiled: int
    tp: int
    fp: int
    tn: int
    fn: int
    per_attempt: dict[int, int] = field(default_factory=dict)
    unresolved: int = 0

    @property
    def compile_rate(self) -> Fraction | None:
        return Fraction(self.compiled, self.total) if self.total else None

    @property
    def labeled(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> Fraction | None:
        return Fraction(self.tp + self.tn, self.labeled) if self.labeled else None

    @property
    def precision(self) -> Fraction | None:
        denom = self.tp + self.fp
        return Fraction(self.tp, denom) if denom else None

    @property
    def recall(self) -> Fraction | None:
        denom = self.tp + self.fn
        return Fraction(self.tp, denom) if denom else None

    @property
    def f1(self) -> Fraction | None:
        precision, recall = self.precision, self.recall
        if precision is None or recall is None:
            return None
        if precision + recall == 0:
            return Fraction(0)
        return 2 * precision * recall / (precision + recall)

    @property
    def specificity(self) -> Fraction | None:
        denom = self.tn + self.fp
        return Fraction(self.tn, denom) if denom else None

    @property
    def false_positive_rate(self) -> Fraction | None:
        denom = self.fp + self.tn
        return Fraction(self.fp, denom) if denom else None

    def to_json(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "compiled": self.compiled,
            "compile_rate": _rate(self.compile_rate),
            "confusion": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
            "accuracy": _rate(self.accuracy),
            "precision": _rate(self.precision),
            "recall": _rate(self.recall),
            "f1": _rate(self.f1),
            "specificity": _rate(self.specificity),
            "false_positive_rate": _rate(self.false_positive_rate),
            "per_attempt": {str(k): v for k, v in sorted(self.per_attempt.items())},
            "unresolved": self.unresolved,
        }


def _rate(value: Fraction | None) -> str | None:
    if value is None:
        return None
    return str(value)


def confusion_summary(
    pairs: list[tuple[bool, bool | None]],
    total: int,
    compiled: int,
    per_attempt: dict[int, int] | None = None,
    unresolved: int = 0,
) -> MetricsSummary:
    """Counts from (expected, predicted) pairs over boolean-labeled cases;
    a case with no prediction (None) is excluded from the matrix."""
    tp = fp = tn = fn = 0
    for expected, predicted in pairs:
        if predicted is None:
            continue
        if expected and predicted:
            tp += 1
        elif expected and not predicted:
            fn += 1
        elif not expected and predicted:
            fp += 1
        else:
            tn += 1
    return MetricsSummary(total, compiled, tp, fp, tn, fn, dict(per_attempt or {}), unresolved)
