"""Finite automata with the reachability/initiality conditions and the
operator constructions 0, 1, a, +, ., * and framed parallel composition.

Automata are immutable. Every construction renames states to fresh integers
``0..n-1`` (the initial state is always ``0``) and records where each new
state came from in ``Automaton.origin``.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping

log = logging.getLogger(__name__)

INTERNAL = "internal"
EXTERNAL = "external"


class AlphabetError(ValueError):
    """Inconsistent alphabet declaration or illegal frame."""


class StateCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int, what: str = "automaton"):
        super().__init__(f"{what} has {size} states, exceeding the cap of {cap}")
        self.size = size
        self.cap = cap
        self.what = what


@dataclass(frozen=True)
class ProbSpec:
    """A probabilistic action together with its weighted internal guards."""

    flip: str
    branches: tuple[tuple[Fraction, str], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "branches", tuple((Fraction(p), str(g)) for p, g in self.branches)
        )
        if not self.branches:
            raise AlphabetError(f"probabilistic action {self.flip!r} has no branches")
        for p, _ in self.branches:
            if not 0 < p <= 1:
                raise AlphabetError(f"weight {p} of {self.flip!r} is outside (0, 1]")
        total = sum(p for p, _ in self.branches)
        if total != 1:
            raise AlphabetError(f"weights of {self.flip!r} sum to {total}, not 1")
        guards = self.guards
        if len(set(guards)) != len(guards):
            raise AlphabetError(f"guards of {self.flip!r} are not pairwise distinct")

    @property
    def guards(self) -> tuple[str, ...]:
        return tuple(g for _, g in self.branches)

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(p for p, _ in self.branches)


@dataclass(frozen=True)
class ActionLabel:
    name: str
    kind: str
    prob_group: ProbSpec | None = None


@dataclass(frozen=True)
class Alphabet:
    """Action classification plus the synchronisation frame.

    Probabilistic (flip) actions are external and may never be synchronised;
    their guards are internal.
    """

    internal: frozenset[str] = frozenset()
    external: frozenset[str] = frozenset()
    prob: tuple[ProbSpec, ...] = ()
    frame: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        internal = frozenset(self.internal) | {g for s in self.prob for g in s.guards}
        external = frozenset(self.external) | {s.flip for s in self.prob}
        object.__setattr__(self, "internal", internal)
        object.__setattr__(self, "external", external)
        object.__setattr__(self, "frame", frozenset(self.frame))
        object.__setattr__(self, "prob", tuple(self.prob))
        clash = internal & external
        if clash:
            raise AlphabetError(f"actions declared both internal and external: {sorted(clash)}")
        flips = [s.flip for s in self.prob]
        if len(set(flips)) != len(flips):
            raise AlphabetError("a probabilistic action is declared twice")
        owners: dict[str, str] = {}
        for s in self.prob:
            for g in s.guards:
                if g in owners:
                    raise AlphabetError(f"guard {g!r} is shared by {owners[g]!r} and {s.flip!r}")
                owners[g] = s.flip
        self.check_frame(self.frame)

    def check_frame(self, frame: Iterable[str]) -> frozenset[str]:
        frame = frozenset(frame)
        bad_internal = frame & self.internal
        if bad_internal:
            raise AlphabetError(f"internal actions cannot be synchronised: {sorted(bad_internal)}")
        bad_prob = frame & self.flips
        if bad_prob:
            raise AlphabetError(f"probabilistic actions cannot be synchronised: {sorted(bad_prob)}")
        unknown = frame - self.external
        if unknown:
            raise AlphabetError(f"frame contains undeclared actions: {sorted(unknown)}")
        return frame

    @property
    def actions(self) -> frozenset[str]:
        return self.internal | self.external

    @cached_property
    def flips(self) -> frozenset[str]:
        return frozenset(s.flip for s in self.prob)

    @cached_property
    def guard_owner(self) -> dict[str, ProbSpec]:
        return {g: s for s in self.prob for g in s.guards}

    def spec_for(self, flip: str) -> ProbSpec | None:
        for s in self.prob:
            if s.flip == flip:
                return s
        return None

    def is_internal(self, name: str) -> bool:
        return name in self.internal

    def label(self, name: str) -> ActionLabel:
        if name in self.internal:
            return ActionLabel(name, INTERNAL)
        if name in self.external:
            return ActionLabel(name, EXTERNAL, self.spec_for(name))
        raise KeyError(name)

    def with_frame(self, frame: Iterable[str]) -> Alphabet:
        return Alphabet(self.internal, self.external, self.prob, frozenset(frame))

    def extend(self, internal: Iterable[str] = (), external: Iterable[str] = ()) -> Alphabet:
        return Alphabet(
            self.internal | frozenset(internal),
            self.external | frozenset(external),
            self.prob,
            self.frame,
        )


@dataclass(frozen=True)
class Automaton:
    """``(states, transitions, initial, finals)`` over a fixed alphabet.

    The constructor does not enforce well-formedness; use :func:`validate`.
    """

    states: frozenset[int]
    transitions: frozenset[tuple[int, str, int]]
    initial: int
    finals: frozenset[int]
    alphabet: Alphabet = field(default_factory=Alphabet)
    origin: Mapping[int, Any] | None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        if not self.finals <= self.states:
            raise ValueError("final states must be states")
        for src, a, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition {(src, a, dst)!r} leaves the state set")
            if a not in self.alphabet.actions:
                raise ValueError(f"action {a!r} is not in the alphabet")

    def __len__(self) -> int:
        return len(self.states)

    @cached_property
    def succ(self) -> dict[int, tuple[tuple[str, int], ...]]:
        out: dict[int, list[tuple[str, int]]] = {s: [] for s in self.states}
        for src, a, dst in sorted(self.transitions):
            out[src].append((a, dst))
        return {s: tuple(v) for s, v in out.items()}

    @cached_property
    def pred(self) -> dict[int, tuple[tuple[str, int], ...]]:
        out: dict[int, list[tuple[str, int]]] = {s: [] for s in self.states}
        for src, a, dst in sorted(self.transitions):
            out[dst].append((a, src))
        return {s: tuple(v) for s, v in out.items()}

    def initial_moves(self) -> tuple[tuple[str, int], ...]:
        return self.succ[self.initial]

    def reachable(self, start: Iterable[int] | None = None) -> set[int]:
        todo = deque([self.initial] if start is None else start)
        seen = set(todo)
        while todo:
            s = todo.popleft()
            for _, t in self.succ[s]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    def is_acyclic(self) -> bool:
        indeg = {s: 0 for s in self.states}
        for _, _, d in self.transitions:
            indeg[d] += 1
        todo = [s for s, k in indeg.items() if k == 0]
        seen = 0
        while todo:
            s = todo.pop()
            seen += 1
            for _, t in self.succ[s]:
                indeg[t] -= 1
                if indeg[t] == 0:
                    todo.append(t)
        return seen == len(self.states)


@dataclass(frozen=True)
class ValidationReport:
    unreachable: tuple[int, ...] = ()
    into_initial: tuple[tuple[int, str, int], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.unreachable and not self.into_initial

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.unreachable:
            parts.append(f"unreachable states {list(self.unreachable)}")
        if self.into_initial:
            parts.append(f"transitions into the initial state {list(self.into_initial)}")
        return "; ".join(parts)


def validate(P: Automaton) -> ValidationReport:
    """Check reachability of every state and the absence of edges into the initial state."""
    reach = P.reachable()
    return ValidationReport(
        unreachable=tuple(sorted(P.states - reach)),
        into_initial=tuple(sorted(t for t in P.transitions if t[2] == P.initial)),
    )


def _build(
    alphabet: Alphabet,
    initial: Hashable,
    transitions: Iterable[tuple[Hashable, str, Hashable]],
    finals: Iterable[Hashable],
    states: Iterable[Hashable] = (),
) -> Automaton:
    """Renumber arbitrary (sortable) state tags to ``0..n-1`` in BFS order from ``initial``.

    States not reachable from ``initial`` are dropped.
    """
    succ: dict[Hashable, list[tuple[str, Hashable]]] = {}
    for src, a, dst in transitions:
        succ.setdefault(src, []).append((a, dst))
    for v in succ.values():
        v.sort(key=lambda e: (e[0], repr(e[1])))
    number = {initial: 0}
    order = [initial]
    todo = deque([initial])
    while todo:
        s = todo.popleft()
        for _, t in succ.get(s, ()):
            if t not in number:
                number[t] = len(order)
                order.append(t)
                todo.append(t)
    trans = {
        (number[s], a, number[t])
        for s in order
        for a, t in succ.get(s, ())
    }
    return Automaton(
        states=frozenset(range(len(order))),
        transitions=frozenset(trans),
        initial=0,
        finals=frozenset(number[f] for f in finals if f in number),
        alphabet=alphabet,
        origin={number[s]: s for s in order},
    )


def _same_alphabet(P: Automaton, Q: Automaton) -> Alphabet:
    if P.alphabet != Q.alphabet:
        raise AlphabetError("automata over different alphabets cannot be combined")
    return P.alphabet


def mk_zero(alphabet: Alphabet = Alphabet()) -> Automaton:
    return Automaton(frozenset({0}), frozenset(), 0, frozenset(), alphabet, {0: "i"})


def mk_one(alphabet: Alphabet = Alphabet()) -> Automaton:
    return Automaton(frozenset({0}), frozenset(), 0, frozenset({0}), alphabet, {0: "i"})


def mk_action(a: str | ActionLabel, alphabet: Alphabet | None = None) -> Automaton:
    if isinstance(a, ActionLabel):
        name = a.name
        if alphabet is None:
            alphabet = (
                Alphabet(internal={name})
                if a.kind == INTERNAL
                else Alphabet(external={name}, prob=(a.prob_group,) if a.prob_group else ())
            )
    else:
        name = a
        if alphabet is None:
            alphabet = Alphabet(external={name})
    return Automaton(
        frozenset({0, 1}), frozenset({(0, name, 1)}), 0, frozenset({1}), alphabet, {0: "i", 1: "o"}
    )


def plus(P: Automaton, Q: Automaton) -> Automaton:
    """Sum: the two initial states are merged into a fresh one."""
    alphabet = _same_alphabet(P, Q)
    i = ("i",)

    def tag(side: int, s: int) -> Hashable:
        return i if s == (P.initial, Q.initial)[side] else (side, s)

    trans = [(tag(0, s), a, tag(0, t)) for s, a, t in P.transitions]
    trans += [(tag(1, s), a, tag(1, t)) for s, a, t in Q.transitions]
    finals = [tag(0, f) for f in P.finals] + [tag(1, f) for f in Q.finals]
    return _build(alphabet, i, trans, finals)


def seq(P: Automaton, Q: Automaton) -> Automaton:
    """Sequential composition: every final state of ``P`` takes over the
    initial transitions of ``Q``; it stays final iff ``Q``'s initial state is."""
    alphabet = _same_alphabet(P, Q)
    trans: list[tuple[Hashable, str, Hashable]] = [((0, s), a, (0, t)) for s, a, t in P.transitions]
    trans += [((1, s), a, (1, t)) for s, a, t in Q.transitions if s != Q.initial]
    for f in P.finals:
        trans += [((0, f), a, (1, z)) for a, z in Q.initial_moves()]
    finals = [(1, f) for f in Q.finals if f != Q.initial]
    if Q.initial in Q.finals:
        finals += [(0, f) for f in P.finals]
    return _build(alphabet, (0, P.initial), trans, finals)


def star(P: Automaton) -> Automaton:
    """Kleene star: a fresh final initial state; every final state of ``P``
    gets a copy of ``P``'s initial transitions."""
    i = ("i",)

    def tag(s: int) -> Hashable:
        return i if s == P.initial else (0, s)

    trans = [(tag(s), a, tag(t)) for s, a, t in P.transitions]
    for f in P.finals:
        if f != P.initial:
            trans += [((0, f), a, tag(z)) for a, z in P.initial_moves()]
    finals = [i] + [(0, f) for f in P.finals if f != P.initial]
    return _build(P.alphabet, i, trans, finals)


def par(
    P: Automaton,
    Q: Automaton,
    frame: Iterable[str] | None = None,
    cap: int | None = None,
) -> Automaton:
    """CSP-style parallel composition restricted to the reachable product.

    Actions in ``frame`` (default: the alphabet's frame) synchronise; all
    others, internal ones included, interleave.
    """
    alphabet = _same_alphabet(P, Q)
    A = alphabet.check_frame(alphabet.frame if frame is None else frame)
    start = (P.initial, Q.initial)
    seen = {start}
    todo = deque([start])
    trans = []
    q_by_action: dict[int, dict[str, list[int]]] = {}
    for q in Q.states:
        d: dict[str, list[int]] = {}
        for a, q2 in Q.succ[q]:
            d.setdefault(a, []).append(q2)
        q_by_action[q] = d
    while todo:
        p, q = todo.popleft()
        moves = []
        for a, p2 in P.succ[p]:
            if a in A:
                moves += [(a, (p2, q2)) for q2 in q_by_action[q].get(a, ())]
            else:
                moves.append((a, (p2, q)))
        for a, q2 in Q.succ[q]:
            if a not in A:
                moves.append((a, (p, q2)))
        for a, nxt in moves:
            trans.append(((p, q), a, nxt))
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
                if cap is not None and len(seen) > cap:
                    raise StateCapExceeded(len(seen), cap, "parallel product")
    finals = [(p, q) for p, q in seen if p in P.finals and q in Q.finals]
    return _build(alphabet, start, trans, finals)


def power(P: Automaton, n: int) -> Automaton:
    """``P`` composed sequentially ``n`` times; ``power(P, 0)`` is 1."""
    out = mk_one(P.alphabet)
    for _ in range(n):
        out = seq(out, P)
    return out


def relabel_alphabet(P: Automaton, alphabet: Alphabet) -> Automaton:
    """The same automaton viewed over a larger alphabet."""
    return Automaton(P.states, P.transitions, P.initial, P.finals, alphabet, P.origin)


def summary(P: Automaton) -> dict[str, int]:
    return {
        "states": len(P.states),
        "transitions": len(P.transitions),
        "finals": len(P.finals),
    }
