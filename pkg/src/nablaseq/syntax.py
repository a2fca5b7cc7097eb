"""Formulas, sequents, concrete syntax, and structural measures.

The connective set is {T, F, atoms, &, |, -> (dynamic implication),
=> (Heyting implication), # (nabla)}.  `!A` is input sugar for `T -> A`
and never appears in the AST.
"""

from __future__ import annotations

import re
from bisect import insort
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Optional, Union

ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")


class ParseError(Exception):
    """Syntax error with position and the set of expected tokens."""

    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected
        where = f"line {line}, col {col}"
        if expected:
            super().__init__(f"{message} at {where} (expected one of: {', '.join(expected)})")
        else:
            super().__init__(f"{message} at {where}")


def _cached_hash(self):
    # deep structures are hashed constantly by the search memo tables; the
    # hash is computed once per instance
    try:
        return self._hash
    except AttributeError:
        h = hash(self._hash_parts())
        object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True)
class Atom:
    name: str
    __hash__ = _cached_hash

    def __post_init__(self):
        if not ATOM_RE.fullmatch(self.name):
            raise ValueError(f"invalid atom name: {self.name!r}")

    def _hash_parts(self):
        return ("atom", self.name)


@dataclass(frozen=True)
class Top:
    __hash__ = _cached_hash

    def _hash_parts(self):
        return ("top",)


@dataclass(frozen=True)
class Bot:
    __hash__ = _cached_hash

    def _hash_parts(self):
        return ("bot",)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    __hash__ = _cached_hash

    def _hash_parts(self):
        return ("and", self.left, self.right)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    __hash__ = _cached_hash

    def _hash_parts(self):
        return ("or", self.left, self.right)


@dataclass(frozen=True)
class DynImp:
    left: "Formula"
    right: "Formula"
    __hash__ = _cached_hash

    def _hash_parts(self):
        return ("dynimp", self.left, self.right)


@dataclass(frozen=True)
class HeytImp:
    left: "Formula"
    right: "Formula"
    __hash__ = _cached_hash

    def _hash_parts(self):
        return ("heytimp", self.left, self.right)


@dataclass(frozen=True)
class Nabla:
    body: "Formula"
    __hash__ = _cached_hash

    def _hash_parts(self):
        return ("nabla", self.body)


Formula = Union[Atom, Top, Bot, And, Or, DynImp, HeytImp, Nabla]

TOP = Top()
BOT = Bot()


def box(f: Formula) -> Formula:
    """The modality `!f`, i.e. T -> f."""
    return DynImp(TOP, f)


def nabla_n(f: Formula, n: int) -> Formula:
    for _ in range(n):
        f = Nabla(f)
    return f


def is_lstar(f: Formula) -> bool:
    """True iff no Heyting implication occurs anywhere in f."""
    if isinstance(f, HeytImp):
        return False
    if isinstance(f, (And, Or, DynImp)):
        return is_lstar(f.left) and is_lstar(f.right)
    if isinstance(f, Nabla):
        return is_lstar(f.body)
    return True


def rank(f: Formula) -> int:
    """Connective-counting measure; wrapping in nabla does not increase it."""
    if isinstance(f, (Atom, Top, Bot)):
        return 1
    if isinstance(f, Nabla):
        return rank(f.body)
    return max(rank(f.left), rank(f.right)) + 1


def atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, Nabla):
        return atoms(f.body)
    return atoms(f.left) | atoms(f.right)


@dataclass(frozen=True)
class NablaPrefix:
    depth: int
    core: Formula

    def rewrap(self) -> Formula:
        return nabla_n(self.core, self.depth)


def strip_nabla(f: Formula) -> NablaPrefix:
    """Maximal n and core with f = nabla^n core, core not nabla-headed."""
    try:
        return f._stripped
    except AttributeError:
        g, n = f, 0
        while isinstance(g, Nabla):
            g = g.body
            n += 1
        pre = NablaPrefix(n, g)
        object.__setattr__(f, "_stripped", pre)
        return pre


def variants_up_to(f: Formula, d: int) -> frozenset[Formula]:
    """All formulas reachable from f by at most d applications of # and !."""
    layer: set[Formula] = {f}
    seen: set[Formula] = {f}
    for _ in range(d):
        layer = {g for v in layer for g in (Nabla(v), box(v))} - seen
        seen |= layer
    return frozenset(seen)


def is_variant(g: Formula, f: Formula) -> bool:
    """True iff g is obtained from f by wrapping in # and ! only."""
    while True:
        if g == f:
            return True
        if isinstance(g, Nabla):
            g = g.body
        elif isinstance(g, DynImp) and g.left == TOP:
            g = g.right
        else:
            return False


# ---------------------------------------------------------------------------
# Printer.  Precedence: implications (0) < | (1) < & (2) < unary (3).
# & and | parse left-associatively over unary operands; -> and => share one
# right-associative level.

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 0, 1, 2, 3


def _prec(f: Formula) -> int:
    if isinstance(f, (DynImp, HeytImp)):
        return _PREC_IMP
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    return _PREC_UNARY


def _render(f: Formula, minimum: int) -> str:
    p = _prec(f)
    if isinstance(f, Atom):
        s = f.name
    elif isinstance(f, Top):
        s = "T"
    elif isinstance(f, Bot):
        s = "F"
    elif isinstance(f, Nabla):
        s = "#" + _render(f.body, _PREC_UNARY)
    elif isinstance(f, And):
        s = _render(f.left, _PREC_AND) + " & " + _render(f.right, _PREC_AND + 1)
    elif isinstance(f, Or):
        s = _render(f.left, _PREC_OR) + " | " + _render(f.right, _PREC_OR + 1)
    elif isinstance(f, DynImp):
        s = _render(f.left, _PREC_IMP + 1) + " -> " + _render(f.right, _PREC_IMP)
    else:
        s = _render(f.left, _PREC_IMP + 1) + " => " + _render(f.right, _PREC_IMP)
    return "(" + s + ")" if p < minimum else s


def print_formula(f: Formula) -> str:
    """Minimal-parenthesis rendering; parse_formula(print_formula(f)) == f."""
    try:
        return f._printed
    except AttributeError:
        s = _render(f, _PREC_IMP)
        object.__setattr__(f, "_printed", s)
        return s


def formula_key(f: Formula) -> str:
    """Canonical total order on formulas (by printed form)."""
    return print_formula(f)


# ---------------------------------------------------------------------------
# Multisets of formulas, kept in canonical sorted order.


class Multiset:
    """Immutable multiset of formulas; equality is order-insensitive and
    multiplicity-preserving."""

    __slots__ = ("items", "_hash")

    def __init__(self, items: Iterable[Formula] = ()):
        object.__setattr__(self, "items", tuple(sorted(items, key=formula_key)))
        object.__setattr__(self, "_hash", None)

    @staticmethod
    def _from_sorted(items: tuple) -> "Multiset":
        ms = object.__new__(Multiset)
        object.__setattr__(ms, "items", items)
        object.__setattr__(ms, "_hash", None)
        return ms

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, f: Formula) -> bool:
        return f in self.items

    def __eq__(self, other) -> bool:
        return isinstance(other, Multiset) and self.items == other.items

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(self.items)
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"Multiset({list(self.items)!r})"

    def count(self, f: Formula) -> int:
        return self.items.count(f)

    def distinct(self) -> Iterator[Formula]:
        prev = None
        for f in self.items:
            if f != prev:
                yield f
                prev = f

    def add(self, *fs: Formula) -> "Multiset":
        lst = list(self.items)
        for f in fs:
            insort(lst, f, key=formula_key)
        return Multiset._from_sorted(tuple(lst))

    def union(self, other: Iterable[Formula]) -> "Multiset":
        return Multiset(self.items + tuple(other))

    def remove(self, f: Formula) -> "Multiset":
        """Remove one occurrence; raises KeyError if absent."""
        try:
            i = self.items.index(f)
        except ValueError:
            raise KeyError(f"{print_formula(f)} not in multiset")
        return Multiset._from_sorted(self.items[:i] + self.items[i + 1:])

    def difference(self, other: Iterable[Formula]) -> "Multiset":
        """Multiset difference; every occurrence in other must be present."""
        lst = list(self.items)
        for f in other:
            try:
                lst.remove(f)
            except ValueError:
                raise KeyError(f"{print_formula(f)} not in multiset")
        return Multiset(lst)

    def contains_all(self, other: Iterable[Formula]) -> bool:
        lst = list(self.items)
        for f in other:
            try:
                lst.remove(f)
            except ValueError:
                return False
        return True

    def sup(self, other: "Multiset") -> "Multiset":
        """Pointwise maximum of multiplicities."""
        out = list(self.items)
        for f in other.distinct():
            out.extend([f] * max(other.count(f) - self.count(f), 0))
        return Multiset(out)

    def map_nabla(self) -> "Multiset":
        return Multiset(Nabla(f) for f in self.items)

    def map(self, fn) -> "Multiset":
        return Multiset(fn(f) for f in self.items)


EMPTY = Multiset()


@dataclass(frozen=True)
class Sequent:
    """Multiset antecedent, at-most-one-formula succedent."""

    ant: Multiset
    suc: tuple[Formula, ...]
    __hash__ = _cached_hash

    def _hash_parts(self):
        return (self.ant, self.suc)

    def __post_init__(self):
        if len(self.suc) > 1:
            raise ValueError("succedent holds at most one formula")

    @staticmethod
    def make(ant: Iterable[Formula], suc: Optional[Formula] = None) -> "Sequent":
        return Sequent(Multiset(ant), () if suc is None else (suc,))

    @property
    def suc_formula(self) -> Optional[Formula]:
        return self.suc[0] if self.suc else None

    def all_formulas(self) -> Iterator[Formula]:
        yield from self.ant
        yield from self.suc

    def is_lstar(self) -> bool:
        return all(is_lstar(f) for f in self.all_formulas())


def print_sequent(s: Sequent) -> str:
    left = ", ".join(print_formula(f) for f in s.ant)
    right = (" " + print_formula(s.suc[0])) if s.suc else ""
    return (left + " |-" if left else "|-") + right


def sequent_atoms(fs: Iterable[Formula]) -> frozenset[str]:
    return reduce(frozenset.union, (atoms(f) for f in fs), frozenset())


# ---------------------------------------------------------------------------
# Parser: recursive descent over the grammar
#
#   sequent := ant "|-" suc?        ant := (formula ("," formula)*)?
#   formula := or (("->" | "=>") formula)?
#   or      := and ("|" and)* ;  and := unary ("&" unary)*
#   unary   := "#" unary | "!" unary | "T" | "F" | ident | "(" formula ")"


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<turnstile>\|-)"
    r"|(?P<arrow>->)"
    r"|(?P<harrow>=>)"
    r"|(?P<ident>[a-z][a-zA-Z0-9_]*)"
    r"|(?P<top>T)"
    r"|(?P<bot>F)"
    r"|(?P<punct>[#!&|(),])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind != "ws":
            tok_kind = lexeme if kind == "punct" else kind
            tokens.append(_Token(tok_kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


_UNARY_STARTERS = ("#", "!", "T", "F", "identifier", "(")


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: tuple[str, ...]):
        tok = self.peek()
        got = tok.text if tok.kind != "eof" else "end of input"
        raise ParseError(f"unexpected {got!r}", tok.line, tok.col, expected)

    def expect(self, kind: str, expected: tuple[str, ...]):
        if self.peek().kind != kind:
            self.fail(expected)
        return self.next()

    def formula(self) -> Formula:
        left = self.or_()
        kind = self.peek().kind
        if kind == "arrow":
            self.next()
            return DynImp(left, self.formula())
        if kind == "harrow":
            self.next()
            return HeytImp(left, self.formula())
        return left

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek().kind == "|":
            self.next()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "#":
            self.next()
            return Nabla(self.unary())
        if tok.kind == "!":
            self.next()
            return box(self.unary())
        if tok.kind == "top":
            self.next()
            return TOP
        if tok.kind == "bot":
            self.next()
            return BOT
        if tok.kind == "ident":
            self.next()
            return Atom(tok.text)
        if tok.kind == "(":
            self.next()
            f = self.formula()
            self.expect(")", (")",))
            return f
        self.fail(_UNARY_STARTERS)

    def sequent(self) -> Sequent:
        ant: list[Formula] = []
        if self.peek().kind != "turnstile":
            ant.append(self.formula())
            while self.peek().kind == ",":
                self.next()
                ant.append(self.formula())
        self.expect("turnstile", ("|-", ","))
        suc: Optional[Formula] = None
        if self.peek().kind != "eof":
            suc = self.formula()
            if self.peek().kind == ",":
                tok = self.peek()
                raise ParseError("succedent holds at most one formula", tok.line, tok.col)
        self.expect("eof", ("end of input",))
        return Sequent.make(ant, suc)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.expect("eof", ("end of input",))
    return f


def parse_sequent(text: str) -> Sequent:
    return _Parser(text).sequent()
