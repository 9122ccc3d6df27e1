"""Testing semantics: the o function, trace languages and may testing.

Traces only record frame actions. Internal actions, probabilistic actions
and unsynchronised external actions are all erased to silent moves, so a
trace is a word over the frame.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from functools import total_ordering
from itertools import product
from typing import Iterable, Iterator

from .automata import AlphabetError, Automaton, par
from .terms import Act, One, Plus, Seq, Term, Zero, compile, to_text


@total_ordering
class Observation(enum.Enum):
    """Values of ``o``, ordered ``zero < tau < one``."""

    ZERO = 0
    TAU = 1
    ONE = 2

    def __lt__(self, other: Observation) -> bool:
        if not isinstance(other, Observation):
            return NotImplemented
        return self.value < other.value

    def __mul__(self, other: Observation) -> Observation:
        # 0x = 0, 1x = x, tau tau = tau
        return Observation(min(self.value, other.value))

    def __add__(self, other: Observation) -> Observation:
        return max(self, other)

    def __str__(self) -> str:
        return {0: "0", 1: "tau", 2: "1"}[self.value]


def observe(P: Automaton) -> Observation:
    if P.initial in P.finals:
        return Observation.ONE
    if P.finals & P.reachable():
        return Observation.TAU
    return Observation.ZERO


# -- trace languages -----------------------------------------------------------


@dataclass(frozen=True)
class TraceLanguage:
    """Erased NFA: edges carry a frame action or ``None`` (silent)."""

    states: frozenset[int]
    initial: int
    finals: frozenset[int]
    edges: tuple[tuple[int, str | None, int], ...]
    frame: frozenset[str]

    def __post_init__(self) -> None:
        silent: dict[int, list[int]] = {s: [] for s in self.states}
        loud: dict[int, dict[str, list[int]]] = {s: {} for s in self.states}
        for s, a, t in self.edges:
            if a is None:
                silent[s].append(t)
            else:
                loud[s].setdefault(a, []).append(t)
        object.__setattr__(self, "_silent", silent)
        object.__setattr__(self, "_loud", loud)

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        todo = list(seen)
        while todo:
            s = todo.pop()
            for t in self._silent[s]:  # type: ignore[attr-defined]
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return frozenset(seen)

    def step(self, states: Iterable[int], a: str) -> frozenset[int]:
        out: set[int] = set()
        for s in states:
            out.update(self._loud[s].get(a, ()))  # type: ignore[attr-defined]
        return self.closure(out)

    def start(self) -> frozenset[int]:
        return self.closure([self.initial])

    def accepts(self, word: Iterable[str]) -> bool:
        cur = self.start()
        for a in word:
            cur = self.step(cur, a)
            if not cur:
                return False
        return bool(cur & self.finals)

    def determinize(self) -> tuple[list[frozenset[int]], dict[tuple[int, str], int]]:
        """Reachable subset automaton; index 0 is the start set."""
        sets = [self.start()]
        index = {sets[0]: 0}
        delta: dict[tuple[int, str], int] = {}
        todo = deque([0])
        letters = sorted(self.frame)
        while todo:
            i = todo.popleft()
            for a in letters:
                nxt = self.step(sets[i], a)
                if nxt not in index:
                    index[nxt] = len(sets)
                    sets.append(nxt)
                    todo.append(index[nxt])
                delta[(i, a)] = index[nxt]
        return sets, delta

    def canonical(self) -> tuple:
        """A key equal for two languages iff they accept the same words.

        Minimal complete DFA (Moore refinement) renumbered in BFS order.
        """
        sets, delta = self.determinize()
        letters = sorted(self.frame)
        n = len(sets)
        block = [1 if s & self.finals else 0 for s in sets]
        while True:
            sig = [(block[i],) + tuple(block[delta[(i, a)]] for a in letters) for i in range(n)]
            ids: dict[tuple, int] = {}
            new = [ids.setdefault(s, len(ids)) for s in sig]
            if len(ids) == len(set(block)):
                break
            block = new
        order = {block[0]: 0}
        todo = deque([0])
        rep = {block[0]: 0}
        while todo:
            i = todo.popleft()
            for a in letters:
                j = delta[(i, a)]
                if block[j] not in order:
                    order[block[j]] = len(order)
                    rep[block[j]] = j
                    todo.append(j)
        finals = tuple(sorted(order[b] for b, i in rep.items() if sets[i] & self.finals))
        table = tuple(
            tuple(order[block[delta[(rep[b], a)]]] for a in letters)
            for b in sorted(order, key=order.get)
        )
        return (tuple(letters), finals, table)

    def is_finite(self) -> bool:
        """True iff finitely many words are accepted."""
        sets, delta = self.determinize()
        letters = sorted(self.frame)
        live = {i for i, s in enumerate(sets) if s & self.finals}
        changed = True
        while changed:
            changed = False
            for i in range(len(sets)):
                if i not in live and any(delta[(i, a)] in live for a in letters):
                    live.add(i)
                    changed = True
        # any cycle among live states gives infinitely many words
        color: dict[int, int] = {}

        def cyclic(i: int) -> bool:
            color[i] = 1
            for a in letters:
                j = delta[(i, a)]
                if j not in live:
                    continue
                if color.get(j) == 1 or (j not in color and cyclic(j)):
                    return True
            color[i] = 2
            return False

        return not (0 in live and cyclic(0))

    def words(self, max_len: int) -> list[tuple[str, ...]]:
        """All accepted words of length at most ``max_len``, shortest first."""
        out = []
        layer = [((), self.start())]
        for n in range(max_len + 1):
            nxt = []
            for w, cur in layer:
                if cur & self.finals:
                    out.append(w)
                if n < max_len:
                    for a in sorted(self.frame):
                        s = self.step(cur, a)
                        if s:
                            nxt.append((w + (a,), s))
            layer = nxt
        return out

    def describe(self) -> str:
        lines = [f"initial {self.initial}", f"finals {sorted(self.finals)}"]
        for s, a, t in self.edges:
            lines.append(f"{s} -{a if a is not None else '~'}-> {t}")
        return "\n".join(lines)


def trace_language(P: Automaton, frame: Iterable[str] | None = None) -> TraceLanguage:
    A = P.alphabet.frame if frame is None else frozenset(frame)
    edges = tuple(sorted(((s, a if a in A else None, t) for s, a, t in P.transitions), key=repr))
    return TraceLanguage(P.states, P.initial, P.finals, edges, A)


def _check_frames(P: Automaton, Q: Automaton) -> frozenset[str]:
    if P.alphabet.frame != Q.alphabet.frame:
        raise AlphabetError("trace comparison needs the same frame on both sides")
    return P.alphabet.frame


def trace_witness(P: Automaton, Q: Automaton) -> tuple[str, ...] | None:
    """A shortest word in ``Tr(P)`` but not in ``Tr(Q)``, or ``None``."""
    _check_frames(P, Q)
    return language_witness(trace_language(P), trace_language(Q))


def language_witness(L: TraceLanguage, M: TraceLanguage) -> tuple[str, ...] | None:
    """Shortest word accepted by ``L`` and rejected by ``M``: ``L``'s silent
    closure is explored state by state against the subset construction of ``M``."""
    start = (L.start(), M.start())
    seen = {start}
    todo = deque([(start, ())])
    letters = sorted(L.frame)
    while todo:
        (ps, qs), word = todo.popleft()
        if ps & L.finals and not qs & M.finals:
            return word
        for a in letters:
            nps = L.step(ps, a)
            if not nps:
                continue
            nxt = (nps, M.step(qs, a))
            if nxt not in seen:
                seen.add(nxt)
                todo.append((nxt, word + (a,)))
    return None


def trace_leq(P: Automaton, Q: Automaton) -> bool:
    return trace_witness(P, Q) is None


def trace_equiv(P: Automaton, Q: Automaton) -> bool:
    return trace_leq(P, Q) and trace_leq(Q, P)


# -- may testing ---------------------------------------------------------------
#
# Test terms are built from 0, 1 and frame actions with + and . only. The
# depth of a test counts operator nesting: atoms have depth 0, so tests of
# depth d are words of length up to 2**d (summed).


def test_terms(frame: Iterable[str], depth: int) -> Iterator[Term]:
    """Every test term of depth at most ``depth`` (no deduplication)."""
    level: list[Term] = [Zero(), One()] + [Act(a) for a in sorted(frame)]
    yield from level
    for _ in range(depth):
        new: list[Term] = list(level)
        for x, y in product(level, repeat=2):
            new.append(Plus(x, y))
            new.append(Seq(x, y))
        for t in new[len(level):]:
            yield t
        level = new


def count_test_terms(n_actions: int, depth: int) -> int:
    k = n_actions + 2
    for _ in range(depth):
        k = k + 2 * k * k
    return k


def _frame_alphabet_check(P: Automaton, Q: Automaton) -> frozenset[str]:
    A = _check_frames(P, Q)
    if P.alphabet != Q.alphabet:
        raise AlphabetError("may testing needs both automata over the same alphabet")
    return A


def may_witness_literal(P: Automaton, Q: Automaton, test_depth: int) -> Term | None:
    """Search every test term, composing and observing each one in full."""
    A = _frame_alphabet_check(P, Q)
    seen: set[Automaton] = set()
    for t in test_terms(A, test_depth):
        T = compile(t, P.alphabet)
        if T in seen:
            continue
        seen.add(T)
        if observe(par(Q, T)) is Observation.ZERO and observe(par(P, T)) is not Observation.ZERO:
            return t
    return None


class _Rel:
    """Relations of one automaton induced by tests.

    ``(p, p')`` is in the relation of test ``t`` iff ``P || t`` can run from
    ``(p, i_t)`` to ``(p', f)`` with ``f`` final in ``t``. These compose:
    sums give unions and sequential composition gives relational
    composition, so a test's effect can be computed without building the
    product.
    """

    def __init__(self, P: Automaton, frame: frozenset[str]):
        self.n = len(P.states)
        idx = {s: i for i, s in enumerate(sorted(P.states))}
        self.idx = idx
        silent = [0] * self.n
        for i in range(self.n):
            silent[i] = 1 << i
        loud: dict[str, list[int]] = {a: [0] * self.n for a in frame}
        step = [0] * self.n
        for s, a, t in P.transitions:
            if a in frame:
                loud[a][idx[s]] |= 1 << idx[t]
            else:
                step[idx[s]] |= 1 << idx[t]
        # reflexive-transitive closure of silent steps
        changed = True
        while changed:
            changed = False
            for i in range(self.n):
                new = silent[i]
                for j in _bits(silent[i]):
                    new |= step[j]
                if new != silent[i]:
                    silent[i] = new
                    changed = True
        self.one = tuple(silent)
        self.zero = tuple([0] * self.n)
        self.atoms = {a: self.compose(self.compose(self.one, tuple(rows)), self.one) for a, rows in loud.items()}
        self.init = idx[P.initial]
        self.finals = sum(1 << idx[f] for f in P.finals)

    def compose(self, r: tuple[int, ...], s: tuple[int, ...]) -> tuple[int, ...]:
        out = []
        for row in r:
            acc = 0
            for j in _bits(row):
                acc |= s[j]
            out.append(acc)
        return tuple(out)

    @staticmethod
    def union(r: tuple[int, ...], s: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(x | y for x, y in zip(r, s))

    def succeeds(self, r: tuple[int, ...]) -> bool:
        return bool(r[self.init] & self.finals)

    def atom(self, t: Term) -> tuple[int, ...]:
        if isinstance(t, Zero):
            return self.zero
        if isinstance(t, One):
            return self.one
        return self.atoms[t.name]

    def of(self, t: Term) -> tuple[int, ...]:
        if isinstance(t, Plus):
            return self.union(self.of(t.left), self.of(t.right))
        if isinstance(t, Seq):
            return self.compose(self.of(t.left), self.of(t.right))
        return self.atom(t)


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def test_succeeds(P: Automaton, t: Term) -> bool:
    """``o(P || t) != 0`` for a test term, computed through relations."""
    rel = _Rel(P, P.alphabet.frame)
    return rel.succeeds(rel.of(t))


def may_witness(P: Automaton, Q: Automaton, test_depth: int) -> Term | None:
    """A test ``t`` of depth at most ``test_depth`` with ``o(Q||t) = 0`` and
    ``o(P||t) != 0``, or ``None`` if there is none.

    All tests are enumerated level by level; two tests inducing the same
    pair of relations on ``P`` and ``Q`` behave identically in every larger
    test, so only one representative per pair is kept.
    """
    if test_depth < 1:
        raise ValueError("test depth must be positive")
    A = _frame_alphabet_check(P, Q)
    rp, rq = _Rel(P, A), _Rel(Q, A)
    level: dict[tuple, Term] = {}
    for t in [Zero(), One()] + [Act(a) for a in sorted(A)]:
        level.setdefault((rp.atom(t), rq.atom(t)), t)

    def found(key: tuple) -> bool:
        return rp.succeeds(key[0]) and not rq.succeeds(key[1])

    for key, t in level.items():
        if found(key):
            return t
    for _ in range(test_depth):
        items = list(level.items())
        new = dict(level)
        for (k1, t1), (k2, t2) in product(items, repeat=2):
            for key, t in (
                ((rp.union(k1[0], k2[0]), rq.union(k1[1], k2[1])), Plus(t1, t2)),
                ((rp.compose(k1[0], k2[0]), rq.compose(k1[1], k2[1])), Seq(t1, t2)),
            ):
                if key not in new:
                    if found(key):
                        return t
                    new[key] = t
        level = new
    return None


def may_leq_bruteforce(P: Automaton, Q: Automaton, test_depth: int) -> bool:
    """``P`` may-below ``Q`` for every test of depth at most ``test_depth``."""
    return may_witness(P, Q, test_depth) is None


def may_equiv_bruteforce(P: Automaton, Q: Automaton, test_depth: int) -> bool:
    return may_leq_bruteforce(P, Q, test_depth) and may_leq_bruteforce(Q, P, test_depth)


def explain_may(P: Automaton, Q: Automaton, test_depth: int) -> str:
    t = may_witness(P, Q, test_depth)
    if t is None:
        return f"no test of depth <= {test_depth} separates them"
    return f"test {to_text(t)} succeeds with the left side only"
