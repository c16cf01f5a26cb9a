"""Structured, machine-consumable error records.

Diagnostics are the payload of the repair loop: every category is drawn from
a fixed vocabulary, and source-derived diagnostics always carry a location
(a JSON-pointer path into the document plus a character-offset range within
the expression string at that path).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

CATEGORIES = frozenset(
    {
        "JsonSyntax",
        "SchemaViolation",
        "ExpressionSyntax",
        "UnknownSort",
        "UndefinedSymbol",
        "ArityMismatch",
        "SortMismatch",
        "UnboundVariable",
        "DuplicateName",
        "UnknownAction",
        "UnsupportedConstruct",
        "SolverFailure",
        "Timeout",
        "NotFiniteDomain",
        "Infeasible",
        "NoActions",
    }
)


@dataclass(frozen=True)
class SourceSpan:
    """Location of a construct: JSON-pointer path, plus start/end character
    offsets within the expression string found at that path (0,0 when the
    whole node is meant)."""

    path: str
    start: int = 0
    end: int = 0

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"span start {self.start} > end {self.end}")


@dataclass(frozen=True)
class Diagnostic:
    category: str
    message: str
    span: SourceSpan | None = None
    hint: str | None = None

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown diagnostic category {self.category!r}")

    def to_json(self) -> dict[str, Any]:
        span = self.span or SourceSpan("")
        return {
            "category": self.category,
            "message": self.message,
            "path": span.path,
            "span": [span.start, span.end],
            "hint": self.hint,
        }

    def __str__(self) -> str:
        where = f" at {self.span.path}[{self.span.start}:{self.span.end}]" if self.span else ""
        hint = f" (hint: {self.hint})" if self.hint else ""
        return f"{self.category}{where}: {self.message}{hint}"


def sort_diagnostics(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    """Stable order by (path, start offset); span-less entries sort first."""
    indexed = list(enumerate(diags))
    indexed.sort(key=lambda p: (p[1].span.path if p[1].span else "", p[1].span.start if p[1].span else -1, p[0]))
    return [d for _, d in indexed]


class ProgramError(Exception):
    """Raised by pipeline stages; carries the full collected diagnostic list."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "program error")
