"""Symbol table: identifier -> definition mapping with lexical scopes.

Name resolution order for a bare identifier is innermost scope first, then
constants, then functions (a nullary function referenced bare is an
application). Quantifier binders may therefore shadow constants — the K4
coloring corpus program binds rule variables over enum value names — while
the top-level `variables` section may not collide with other declarations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, ProgramError, SourceSpan
from .program import Program
from .terms import BOOL, BUILTIN_SORT_KEYWORDS, INT, REAL, Sort, SortKind

_BUILTINS = {"Bool": BOOL, "Int": INT, "Real": REAL}


@dataclass(frozen=True)
class ResolvedFunction:
    name: str
    domain: tuple[Sort | None, ...]  # None marks an unresolvable reference
    range: Sort | None
    path: str = ""


@dataclass
class SymbolTable:
    sorts: dict[str, Sort] = field(default_factory=lambda: dict(_BUILTINS))
    functions: dict[str, ResolvedFunction] = field(default_factory=dict)
    constants: dict[str, Sort | None] = field(default_factory=dict)
    enum_values: dict[str, Sort] = field(default_factory=dict)
    var_templates: dict[str, Sort | None] = field(default_factory=dict)
    scopes: list[dict[str, Sort | None]] = field(default_factory=list)
    constant_order: list[str] = field(default_factory=list)

    def resolve_sort(self, ref: str) -> Sort | None:
        """A sort reference names a declared sort or a builtin keyword
        ("Bool"/"BoolSort" and friends)."""
        if ref in self.sorts:
            return self.sorts[ref]
        return BUILTIN_SORT_KEYWORDS.get(ref)

    def push_scope(self, bindings: dict[str, Sort | None]) -> None:
        self.scopes.append(dict(bindings))

    def pop_scope(self) -> None:
        self.scopes.pop()

    @property
    def scope_depth(self) -> int:
        return len(self.scopes)

    def lookup_variable(self, name: str) -> tuple[bool, Sort | None]:
        """Innermost-scope lookup; (found, sort). A found variable may carry a
        poisoned (None) sort when its declaration failed to resolve."""
        for frame in reversed(self.scopes):
            if name in frame:
                return True, frame[name]
        return False, None

    def declared_constants(self, sort: Sort) -> list[str]:
        """Constant-group members of a declared sort, in declaration order;
        the finite backend uses these as the sort's closed universe."""
        return [
            name
            for name in self.constant_order
            if name not in self.enum_values and self.constants.get(name) == sort
        ]


def try_build_symbol_table(program: Program) -> tuple[SymbolTable, list[Diagnostic]]:
    """Best-effort construction: every problem becomes a diagnostic, and the
    offending entry is registered with a poisoned (None) sort where that
    avoids cascading errors downstream."""
    table = SymbolTable()
    diags: list[Diagnostic] = []

    def dup(name: str, path: str, what: str) -> None:
        diags.append(Diagnostic("DuplicateName", f"{what} {name!r} is already defined", SourceSpan(path)))

    declared: set[str] = set()
    for decl in program.sorts:
        existing = table.sorts.get(decl.name)
        sort = Sort(decl.name, decl.kind, decl.width)
        # Re-declaring a builtin name with its own kind is the corpus's
        # alias idiom ({"name": "Real", "type": "RealSort"}); everything else
        # that collides is a duplicate.
        if decl.name in declared or (existing is not None and existing != sort):
            dup(decl.name, decl.path, "sort")
            continue
        declared.add(decl.name)
        table.sorts[decl.name] = sort
        if decl.kind is SortKind.ENUM:
            for value in decl.values:
                if value in table.constants or value in table.functions:
                    dup(value, decl.path, "enum value")
                    continue
                table.constants[value] = sort
                table.enum_values[value] = sort
                table.constant_order.append(value)

    for decl in program.functions:
        if decl.name in table.functions or decl.name in table.constants:
            dup(decl.name, decl.path, "function")
            continue
        domain = []
        for index, ref in enumerate(decl.domain):
            sort = table.resolve_sort(ref)
            if sort is None:
                diags.append(
                    Diagnostic("UnknownSort", f"unknown sort {ref!r}", SourceSpan(f"{decl.path}/domain/{index}"))
                )
            domain.append(sort)
        range_ = table.resolve_sort(decl.range)
        if range_ is None:
            diags.append(Diagnostic("UnknownSort", f"unknown sort {decl.range!r}", SourceSpan(f"{decl.path}/range")))
        table.functions[decl.name] = ResolvedFunction(decl.name, tuple(domain), range_, decl.path)

    for group in program.constants:
        sort = table.resolve_sort(group.sort)
        if sort is None:
            diags.append(Diagnostic("UnknownSort", f"unknown sort {group.sort!r}", SourceSpan(f"{group.path}/sort")))
        for index, member in enumerate(group.members):
            if member in table.constants or member in table.functions:
                dup(member, f"{group.path}/members/{index}", "constant")
                continue
            table.constants[member] = sort
            table.constant_order.append(member)

    for decl in program.variables:
        if decl.name in table.var_templates:
            dup(decl.name, decl.path, "variable")
            continue
        if decl.name in table.constants or decl.name in table.functions:
            diags.append(
                Diagnostic(
                    "DuplicateName",
                    f"variable {decl.name!r} shadows a constant or function",
                    SourceSpan(decl.path),
                )
            )
            continue
        sort = table.resolve_sort(decl.sort)
        if sort is None:
            diags.append(Diagnostic("UnknownSort", f"unknown sort {decl.sort!r}", SourceSpan(f"{decl.path}/sort")))
        table.var_templates[decl.name] = sort

    return table, diags


def build_symbol_table(program: Program) -> SymbolTable:
    """Raises ProgramError carrying DuplicateName/UnknownSort diagnostics."""
    table, diags = try_build_symbol_table(program)
    if diags:
        raise ProgramError(diags)
    return table
