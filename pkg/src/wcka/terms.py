"""Term syntax over ``0, 1, actions, +, ., *, ||`` and its compilation to automata.

Precedence from tightest to loosest: ``*``, ``.`` (or juxtaposition), ``||``,
``+``. All binary operators associate to the left. A parallel composition may
carry its own frame, written ``||{a,b}``; without one the alphabet's frame is
used.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Iterable, Union

from . import automata as am
from .automata import Alphabet, AlphabetError, Automaton, ProbSpec, StateCapExceeded


class TermError(ValueError):
    pass


class ParseError(TermError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class UndeclaredActionError(TermError):
    def __init__(self, name: str, position: int | None = None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"action {name!r} is not declared{where}")
        self.name = name
        self.position = position


class _Ops:
    def __add__(self, other: Term) -> Term:
        return Plus(self, other)

    def __mul__(self, other: Term) -> Term:
        return Seq(self, other)

    def __or__(self, other: Term) -> Term:
        return Par(self, other)

    def star(self) -> Term:
        return Star(self)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Zero(_Ops):
    def __repr__(self) -> str:
        return "Zero()"


@dataclass(frozen=True, repr=False)
class One(_Ops):
    def __repr__(self) -> str:
        return "One()"


@dataclass(frozen=True, repr=False)
class Act(_Ops):
    name: str

    def __repr__(self) -> str:
        return f"Act({self.name!r})"


@dataclass(frozen=True, repr=False)
class Plus(_Ops):
    left: Term
    right: Term

    def __repr__(self) -> str:
        return f"Plus({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Seq(_Ops):
    left: Term
    right: Term

    def __repr__(self) -> str:
        return f"Seq({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Par(_Ops):
    left: Term
    right: Term
    frame: frozenset[str] | None = None

    def __repr__(self) -> str:
        extra = "" if self.frame is None else f", frame={set(sorted(self.frame))!r}"
        return f"Par({self.left!r}, {self.right!r}{extra})"


@dataclass(frozen=True, repr=False)
class Star(_Ops):
    body: Term

    def __repr__(self) -> str:
        return f"Star({self.body!r})"


Term = Union[Zero, One, Act, Plus, Seq, Par, Star]


def sum_of(terms: Iterable[Term]) -> Term:
    terms = list(terms)
    return reduce(Plus, terms) if terms else Zero()


def seq_of(terms: Iterable[Term]) -> Term:
    terms = list(terms)
    return reduce(Seq, terms) if terms else One()


def power(t: Term, n: int) -> Term:
    return seq_of([t] * n)


def actions_of(t: Term) -> set[str]:
    if isinstance(t, Act):
        return {t.name}
    if isinstance(t, (Plus, Seq, Par)):
        return actions_of(t.left) | actions_of(t.right)
    if isinstance(t, Star):
        return actions_of(t.body)
    return set()


def size(t: Term) -> int:
    if isinstance(t, (Plus, Seq, Par)):
        return 1 + size(t.left) + size(t.right)
    if isinstance(t, Star):
        return 1 + size(t.body)
    return 1


# -- lexer / parser ----------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<comment>#[^\n]*)|(?P<par>\|\|)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<const>[01])(?![0-9])|(?P<sym>[+.*(){},]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind is None:
            break
        if kind != "comment":
            tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.text = text
        self.alphabet = alphabet
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value or kind not in ("sym", "par"):
            raise ParseError(f"expected {value!r} but found {val or 'end of input'!r}", pos, self.text)

    def parse(self) -> Term:
        t = self.expr()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {val!r}", pos, self.text)
        return t

    def expr(self) -> Term:
        t = self.par_chain()
        while self.peek()[1] == "+":
            self.take()
            t = Plus(t, self.par_chain())
        return t

    def par_chain(self) -> Term:
        t = self.seq_chain()
        while self.peek()[0] == "par":
            self.take()
            frame = self.frame() if self.peek()[1] == "{" else None
            t = Par(t, self.seq_chain(), frame)
        return t

    def frame(self) -> frozenset[str]:
        self.expect("{")
        names: list[str] = []
        if self.peek()[1] != "}":
            while True:
                kind, val, pos = self.take()
                if kind != "ident":
                    raise ParseError(f"expected an action name but found {val!r}", pos, self.text)
                if val not in self.alphabet.actions:
                    raise UndeclaredActionError(val, pos)
                names.append(val)
                if self.peek()[1] != ",":
                    break
                self.take()
        self.expect("}")
        return frozenset(names)

    def _starts_atom(self) -> bool:
        kind, val, _ = self.peek()
        return kind in ("ident", "const") or val == "("

    def seq_chain(self) -> Term:
        t = self.starred()
        while True:
            if self.peek()[1] == ".":
                self.take()
            elif not self._starts_atom():
                return t
            t = Seq(t, self.starred())

    def starred(self) -> Term:
        t = self.atom()
        while self.peek()[1] == "*":
            self.take()
            t = Star(t)
        return t

    def atom(self) -> Term:
        kind, val, pos = self.take()
        if kind == "const":
            return Zero() if val == "0" else One()
        if kind == "ident":
            return self.identifier(val, pos)
        if val == "(":
            t = self.expr()
            self.expect(")")
            return t
        raise ParseError(f"expected a term but found {val or 'end of input'!r}", pos, self.text)

    def identifier(self, name: str, pos: int) -> Term:
        actions = self.alphabet.actions
        if name in actions:
            return Act(name)
        # juxtaposition of single-character actions, e.g. "ab" for a.b
        if len(name) > 1 and all(ch in actions for ch in name):
            return seq_of(Act(ch) for ch in name)
        raise UndeclaredActionError(name, pos)


def parse(text: str, alphabet: Alphabet) -> Term:
    return _Parser(text, alphabet).parse()


_PREC = {Plus: 1, Par: 2, Seq: 3, Star: 4}


def _prec(t: Term) -> int:
    return _PREC.get(type(t), 5)


def to_text(t: Term) -> str:
    """Print with the fewest parentheses that parse back to the same tree."""
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Act):
        return t.name
    if isinstance(t, Star):
        inner = to_text(t.body)
        return (f"({inner})" if _prec(t.body) < 4 else inner) + "*"
    p = _prec(t)
    left, right = to_text(t.left), to_text(t.right)
    if _prec(t.left) < p:
        left = f"({left})"
    if _prec(t.right) <= p:
        right = f"({right})"
    if isinstance(t, Plus):
        return f"{left} + {right}"
    if isinstance(t, Seq):
        return f"{left}.{right}"
    op = "||" if t.frame is None else "||{" + ",".join(sorted(t.frame)) + "}"
    return f"{left} {op} {right}"


# -- compilation -------------------------------------------------------------


def check_declared(t: Term, alphabet: Alphabet) -> None:
    missing = actions_of(t) - alphabet.actions
    if missing:
        raise UndeclaredActionError(sorted(missing)[0])


def compile(t: Term, alphabet: Alphabet, cap: int | None = None) -> Automaton:  # noqa: A001
    """Build the automaton of ``t`` by structural recursion.

    ``cap`` bounds the number of states of every intermediate automaton.
    """
    check_declared(t, alphabet)
    cache: dict[Term, Automaton] = {}

    def go(t: Term) -> Automaton:
        if t in cache:
            return cache[t]
        if isinstance(t, Zero):
            out = am.mk_zero(alphabet)
        elif isinstance(t, One):
            out = am.mk_one(alphabet)
        elif isinstance(t, Act):
            out = am.mk_action(t.name, alphabet)
        elif isinstance(t, Plus):
            out = am.plus(go(t.left), go(t.right))
        elif isinstance(t, Seq):
            out = am.seq(go(t.left), go(t.right))
        elif isinstance(t, Star):
            out = am.star(go(t.body))
        elif isinstance(t, Par):
            out = am.par(go(t.left), go(t.right), t.frame, cap=cap)
        else:
            raise TypeError(f"not a term: {t!r}")
        if cap is not None and len(out) > cap:
            raise StateCapExceeded(len(out), cap, f"automaton of {type(t).__name__}")
        cache[t] = out
        return out

    return go(t)


# -- alphabet configuration ----------------------------------------------------

_STATEMENT = re.compile(r"^(internal|external|prob|sync)\b(.*)$", re.S)
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _names(text: str, where: str) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if not _NAME.match(n):
            raise AlphabetError(f"bad action name {n!r} in {where}")
    return names


def load_alphabet(config_text: str) -> Alphabet:
    """Read the line-oriented alphabet format::

        internal t;
        external a, b, c;
        prob flip: 1/2 th, 1/2 tt;
        sync {a, b};

    Guards of a ``prob`` declaration are internal, the flip is external.
    Names in ``sync`` that are not declared elsewhere become external.
    """
    lines = [line.split("#", 1)[0] for line in config_text.splitlines()]
    body = " ".join(lines)
    internal: list[str] = []
    external: list[str] = []
    probs: list[ProbSpec] = []
    frame: list[str] = []
    for raw in body.split(";"):
        stmt = raw.strip()
        if not stmt:
            continue
        m = _STATEMENT.match(stmt)
        if m is None:
            raise AlphabetError(f"cannot read alphabet statement {stmt!r}")
        keyword, rest = m.group(1), m.group(2).strip()
        if keyword == "internal":
            internal += _names(rest, stmt)
        elif keyword == "external":
            external += _names(rest, stmt)
        elif keyword == "sync":
            if not (rest.startswith("{") and rest.endswith("}")):
                raise AlphabetError(f"sync expects {{...}}: {stmt!r}")
            frame += _names(rest[1:-1], stmt)
        else:
            flip, sep, branches = rest.partition(":")
            flip = flip.strip()
            if not sep or not _NAME.match(flip):
                raise AlphabetError(f"prob expects 'name: p guard, ...': {stmt!r}")
            parsed = []
            for part in branches.split(","):
                bits = part.split()
                if len(bits) != 2:
                    raise AlphabetError(f"bad branch {part.strip()!r} in {stmt!r}")
                try:
                    weight = Fraction(bits[0])
                except (ValueError, ZeroDivisionError) as exc:
                    raise AlphabetError(f"bad weight {bits[0]!r}") from exc
                parsed.append((weight, _names(bits[1], stmt)[0]))
            probs.append(ProbSpec(flip, tuple(parsed)))
    guards = [g for s in probs for g in s.guards]
    flips = [s.flip for s in probs]
    declared = internal + external + flips
    dupes = sorted({n for n in declared if declared.count(n) > 1})
    dupes += sorted({g for g in guards if guards.count(g) > 1 or g in external or g in flips})
    if dupes:
        raise AlphabetError(f"duplicate action names: {sorted(set(dupes))}")
    bad = set(frame) & (set(internal) | set(guards))
    if bad:
        raise AlphabetError(f"internal actions cannot be synchronised: {sorted(bad)}")
    extra = [n for n in frame if n not in declared]
    return Alphabet(
        internal=frozenset(internal),
        external=frozenset(external + extra),
        prob=tuple(probs),
        frame=frozenset(frame),
    )


def alphabet_to_config(alphabet: Alphabet) -> str:
    guards = set(alphabet.guard_owner)
    lines = []
    plain_internal = sorted(alphabet.internal - guards)
    plain_external = sorted(alphabet.external - alphabet.flips)
    if plain_internal:
        lines.append("internal " + ", ".join(plain_internal) + ";")
    if plain_external:
        lines.append("external " + ", ".join(plain_external) + ";")
    for s in alphabet.prob:
        lines.append(f"prob {s.flip}: " + ", ".join(f"{p} {g}" for p, g in s.branches) + ";")
    if alphabet.frame:
        lines.append("sync {" + ", ".join(sorted(alphabet.frame)) + "};")
    return "\n".join(lines) + "\n"


def load_term_file(path: str | Path) -> tuple[Term, Alphabet]:
    """Read a ``.wcka`` file: a ``%alphabet <path>`` header line, then a term."""
    path = Path(path)
    text = path.read_text()
    header, _, rest = text.partition("\n")
    if not header.startswith("%alphabet"):
        raise TermError(f"{path}: first line must be '%alphabet <path>'")
    cfg = Path(header[len("%alphabet"):].strip())
    if not cfg.is_absolute():
        cfg = path.parent / cfg
    alphabet = load_alphabet(cfg.read_text())
    return parse(rest, alphabet), alphabet
