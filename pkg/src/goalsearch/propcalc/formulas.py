"""Propositional formulas: AST, parser, and canonical printer.

Grammar (fully parenthesised binary connectives)::

    formula : ATOM | '¬' formula | '(' formula BINOP formula ')'
    ATOM    : 'A' .. 'Z'
    BINOP   : '∧' | '∨' | '→'

ASCII aliases ``&``, ``|``, ``->``, ``!`` are accepted on input; the
printer always emits the Unicode forms, and ``parse(print(f)) == f``
holds for every formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

ATOM_NAMES = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZ")


class ParseError(ValueError):
    """Formula text rejected; ``column`` is 1-based."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, And, Or, Imp]

_BINOP_SYMBOL = {And: "∧", Or: "∨", Imp: "→"}


def format_formula(f: Formula) -> str:
    """Canonical text form; round-trips through :func:`parse_formula`."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "¬" + format_formula(f.operand)
    sym = _BINOP_SYMBOL[type(f)]
    return f"({format_formula(f.left)} {sym} {format_formula(f.right)})"


class _Parser:
    # Columns are counted per character of the raw input, 1-based.

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def formula(self) -> Formula:
        self.skip_ws()
        ch = self.peek()
        if ch is None:
            raise self.error("expected a formula")
        if ch in ATOM_NAMES:
            self.pos += 1
            return Atom(ch)
        if ch in ("¬", "!", "~"):
            self.pos += 1
            return Not(self.formula())
        if ch == "(":
            self.pos += 1
            left = self.formula()
            op = self.binop()
            right = self.formula()
            self.skip_ws()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
            return op(left, right)
        raise self.error(f"unexpected character {ch!r}")

    def binop(self) -> type:
        self.skip_ws()
        ch = self.peek()
        if ch == "∧" or ch == "&":
            self.pos += 1
            return And
        if ch == "∨" or ch == "|":
            self.pos += 1
            return Or
        if ch == "→":
            self.pos += 1
            return Imp
        if ch == "-" and self.text[self.pos : self.pos + 2] == "->":
            self.pos += 2
            return Imp
        raise self.error("expected a binary connective")


def parse_formula(text: str) -> Formula:
    """Parse canonical (or ASCII-aliased) formula text into an AST."""
    parser = _Parser(text)
    f = parser.formula()
    parser.skip_ws()
    if parser.peek() is not None:
        raise parser.error("trailing input after formula")
    return f


def subformulas(f: Formula) -> list[Formula]:
    """All subformulas in preorder, including ``f`` itself."""
    out: list[Formula] = [f]
    if isinstance(f, Not):
        out.extend(subformulas(f.operand))
    elif isinstance(f, (And, Or, Imp)):
        out.extend(subformulas(f.left))
        out.extend(subformulas(f.right))
    return out


def atoms_of(f: Formula) -> frozenset[str]:
    return frozenset(a.name for a in subformulas(f) if isinstance(a, Atom))
