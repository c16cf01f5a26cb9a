"""Recursive-descent parser for DSL expression strings.

Grammar, lowest to highest precedence:

    expression  := comparison
    comparison  := additive ((== | != | <= | >= | < | >) additive)?
    additive    := multiplicative ((+ | -) multiplicative)*
    multiplicative := unary (* unary)*
    unary       := - unary | atom
    atom        := numeral | bool literal | identifier | call | ( expression )

Comparisons are non-associative: a chained ``a < b < c`` is a syntax error
rather than a silent conjunction. ``And``, ``Or``, ``Not``, ``Implies``,
``Distinct``, ``ForAll`` and ``Exists`` are reserved call-forms — they cannot
be used as plain identifiers, and the quantifiers take a bracketed variable
list as their first argument: ``ForAll([x, y], body)``.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from fractions import Fraction

from .diagnostics import Diagnostic, ProgramError, SourceSpan
from .terms import (
    Add,
    And,
    BoolLit,
    Distinct,
    Eq,
    Exists,
    ForAll,
    Ge,
    Gt,
    Implies,
    IntLit,
    Le,
    Lt,
    Mul,
    Neg,
    Neq,
    Not,
    Or,
    RatLit,
    Sub,
    SymbolRef,
    Term,
    Apply,
    VarBind,
)

RESERVED_CALL_FORMS = frozenset({"And", "Or", "Not", "Implies", "Distinct", "ForAll", "Exists"})
_BOOL_LITERALS = {"true": True, "True": True, "false": False, "False": False}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+\.\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|<|>|\+|-|\*|\(|\)|\[|\]|,)
    """,
    re.VERBOSE,
)

_COMPARISONS = {"==": Eq, "!=": Neq, "<": Lt, "<=": Le, ">": Gt, ">=": Ge}


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "eof"
    text: str
    start: int
    end: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise _error(text, pos, pos + 1, f"unexpected character {text[pos]!r}")
        pos = match.end()
        if match.lastgroup == "ws":
            continue
        tokens.append(_Token(match.lastgroup or "", match.group(), match.start(), match.end()))
    tokens.append(_Token("eof", "", len(text), len(text)))
    return tokens


def _error(text: str, start: int, end: int, message: str, expected: tuple[str, ...] = ()) -> ProgramError:
    if expected:
        message = f"{message}; expected {', '.join(expected)}"
    return ProgramError([Diagnostic("ExpressionSyntax", message, SourceSpan("", start, end))])


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, kind: str, text: str | None = None) -> _Token:
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            want = text if text is not None else kind
            raise _error(self.text, token.start, token.end, f"unexpected {self._describe(token)}", (want,))
        return self.advance()

    @staticmethod
    def _describe(token: _Token) -> str:
        return "end of input" if token.kind == "eof" else f"{token.text!r}"

    def parse(self) -> Term:
        term = self.comparison()
        token = self.current
        if token.kind != "eof":
            if token.kind == "op" and token.text in _COMPARISONS:
                raise _error(
                    self.text,
                    token.start,
                    token.end,
                    "chained comparisons are not allowed; use And(a < b, b < c)",
                )
            raise _error(self.text, token.start, token.end, f"unexpected {self._describe(token)}", ("end of input",))
        return term

    def comparison(self) -> Term:
        left = self.additive()
        token = self.current
        if token.kind == "op" and token.text in _COMPARISONS:
            self.advance()
            right = self.additive()
            node_type = _COMPARISONS[token.text]
            return node_type(left, right, span=(left.span[0], right.span[1]))  # type: ignore[index]
        return left

    def additive(self) -> Term:
        left = self.multiplicative()
        while self.current.kind == "op" and self.current.text in ("+", "-"):
            op = self.advance()
            right = self.multiplicative()
            node_type = Add if op.text == "+" else Sub
            left = node_type(left, right, span=(left.span[0], right.span[1]))  # type: ignore[index]
        return left

    def multiplicative(self) -> Term:
        left = self.unary()
        while self.current.kind == "op" and self.current.text == "*":
            self.advance()
            right = self.unary()
            left = Mul(left, right, span=(left.span[0], right.span[1]))  # type: ignore[index]
        return left

    def unary(self) -> Term:
        token = self.current
        if token.kind == "op" and token.text == "-":
            self.advance()
            operand = self.unary()
            return Neg(operand, span=(token.start, operand.span[1]))  # type: ignore[index]
        return self.atom()

    def atom(self) -> Term:
        token = self.current
        if token.kind == "number":
            self.advance()
            if "." in token.text:
                return RatLit(Fraction(token.text), span=(token.start, token.end))
            return IntLit(int(token.text), span=(token.start, token.end))
        if token.kind == "ident":
            if token.text in _BOOL_LITERALS:
                self.advance()
                return BoolLit(_BOOL_LITERALS[token.text], span=(token.start, token.end))
            if token.text in RESERVED_CALL_FORMS:
                return self.call_form()
            self.advance()
            if self.current.kind == "op" and self.current.text == "(":
                args, end = self.argument_list()
                return Apply(token.text, args, span=(token.start, end))
            return SymbolRef(token.text, span=(token.start, token.end))
        if token.kind == "op" and token.text == "(":
            self.advance()
            inner = self.comparison()
            close = self.expect("op", ")")
            return replace_span(inner, (token.start, close.end))
        raise _error(self.text, token.start, token.end, f"unexpected {self._describe(token)}", ("expression",))

    def argument_list(self) -> tuple[tuple[Term, ...], int]:
        self.expect("op", "(")
        args: list[Term] = []
        if self.current.kind == "op" and self.current.text == ")":
            end = self.advance().end
            return tuple(args), end
        args.append(self.comparison())
        while self.current.kind == "op" and self.current.text == ",":
            self.advance()
            args.append(self.comparison())
        end = self.expect("op", ")").end
        return tuple(args), end

    def call_form(self) -> Term:
        name = self.advance()
        if not (self.current.kind == "op" and self.current.text == "("):
            raise _error(
                self.text,
                name.start,
                name.end,
                f"{name.text!r} is a reserved name and cannot be used as an identifier",
            )
        if name.text in ("ForAll", "Exists"):
            return self.quantifier(name)
        args, end = self.argument_list()
        span = (name.start, end)
        if name.text == "Not":
            self._check_arity(name, args, exactly=1)
            return Not(args[0], span=span)
        if name.text == "Implies":
            self._check_arity(name, args, exactly=2)
            return Implies(args[0], args[1], span=span)
        self._check_arity(name, args, at_least=1)
        if name.text == "And":
            return And(args, span=span)
        if name.text == "Or":
            return Or(args, span=span)
        return Distinct(args, span=span)

    def _check_arity(self, name: _Token, args: tuple[Term, ...], exactly: int | None = None, at_least: int | None = None) -> None:
        if exactly is not None and len(args) != exactly:
            raise _error(self.text, name.start, name.end, f"{name.text} takes exactly {exactly} argument(s), got {len(args)}")
        if at_least is not None and len(args) < at_least:
            raise _error(self.text, name.start, name.end, f"{name.text} takes at least {at_least} argument(s), got {len(args)}")

    def quantifier(self, name: _Token) -> Term:
        self.expect("op", "(")
        self.expect("op", "[")
        binders: list[VarBind] = []
        var = self.expect("ident")
        self._check_binder_name(var)
        binders.append(VarBind(var.text))
        while self.current.kind == "op" and self.current.text == ",":
            self.advance()
            var = self.expect("ident")
            self._check_binder_name(var)
            binders.append(VarBind(var.text))
        self.expect("op", "]")
        self.expect("op", ",")
        body = self.comparison()
        close = self.expect("op", ")")
        node_type = ForAll if name.text == "ForAll" else Exists
        return node_type(tuple(binders), body, span=(name.start, close.end))

    def _check_binder_name(self, var: _Token) -> None:
        if var.text in RESERVED_CALL_FORMS or var.text in _BOOL_LITERALS:
            raise _error(self.text, var.start, var.end, f"{var.text!r} cannot be used as a variable name")


def replace_span(term: Term, span: tuple[int, int]) -> Term:
    return dataclasses.replace(term, span=span)


def parse_expression(text: str) -> Term:
    """Parse one expression string into a surface term (no sorts attached).

    Raises ProgramError carrying a single ExpressionSyntax diagnostic whose
    span holds character offsets within ``text`` (the caller contributes the
    JSON-pointer path)."""
    return _Parser(text).parse()
