"""Random and exhaustive automata for property checks and cross-validation."""

from __future__ import annotations

import random
from itertools import combinations, permutations
from typing import Iterator, Sequence

from .automata import Alphabet, Automaton, validate


def canonical_key(P: Automaton) -> tuple:
    """Isomorphism-invariant key: lexicographically least relabelling that
    keeps the initial state first."""
    others = sorted(P.states - {P.initial})
    best = None
    for perm in permutations(range(1, len(others) + 1)):
        ren = {P.initial: 0, **dict(zip(others, perm))}
        key = (
            len(P.states),
            tuple(sorted((ren[s], a, ren[t]) for s, a, t in P.transitions)),
            tuple(sorted(ren[f] for f in P.finals)),
        )
        if best is None or key < best:
            best = key
    return best


def from_key(key: tuple, alphabet: Alphabet) -> Automaton:
    n, trans, finals = key
    return Automaton(frozenset(range(n)), frozenset(trans), 0, frozenset(finals), alphabet)


def _reachable(n: int, trans: Sequence[tuple[int, str, int]]) -> bool:
    seen = {0}
    todo = [0]
    while todo:
        s = todo.pop()
        for src, _, dst in trans:
            if src == s and dst not in seen:
                seen.add(dst)
                todo.append(dst)
    return len(seen) == n


def _acyclic(n: int, trans: Sequence[tuple[int, str, int]]) -> bool:
    indeg = [0] * n
    for _, _, d in trans:
        indeg[d] += 1
    todo = [s for s in range(n) if indeg[s] == 0]
    seen = 0
    while todo:
        s = todo.pop()
        seen += 1
        for src, _, dst in trans:
            if src == s:
                indeg[dst] -= 1
                if indeg[dst] == 0:
                    todo.append(dst)
    return seen == n


def enumerate_automata(
    alphabet: Alphabet,
    labels: Sequence[str],
    max_states: int,
    max_transitions: int | None = None,
    *,
    acyclic: bool = False,
    one_label_per_pair: bool = False,
) -> Iterator[Automaton]:
    """Every well-formed automaton up to isomorphism within the given bounds.

    ``one_label_per_pair`` allows at most one transition between any ordered
    pair of states.
    """
    labels = sorted(labels)
    seen: set[tuple] = set()
    for n in range(1, max_states + 1):
        slots = [(s, a, t) for s in range(n) for t in range(1, n) for a in labels]
        if acyclic:
            slots = [x for x in slots if x[0] != x[2]]
        cap = len(slots) if max_transitions is None else min(max_transitions, len(slots))
        for k in range(n - 1, cap + 1):
            for trans in combinations(slots, k):
                if one_label_per_pair and len({(s, t) for s, _, t in trans}) < k:
                    continue
                if not _reachable(n, trans):
                    continue
                if acyclic and not _acyclic(n, trans):
                    continue
                for mask in range(1 << n):
                    finals = frozenset(i for i in range(n) if mask >> i & 1)
                    P = Automaton(frozenset(range(n)), frozenset(trans), 0, finals, alphabet)
                    key = canonical_key(P)
                    if key in seen:
                        continue
                    seen.add(key)
                    yield P


def random_automaton(
    rng: random.Random,
    alphabet: Alphabet,
    labels: Sequence[str] | None = None,
    max_states: int = 5,
    density: float = 0.3,
    final_prob: float = 0.4,
) -> Automaton:
    """A random well-formed automaton: a spanning tree from the initial state
    plus extra edges that avoid the initial state."""
    labels = sorted(labels if labels is not None else alphabet.actions - alphabet.flips)
    n = rng.randint(1, max_states)
    trans = set()
    for s in range(1, n):
        trans.add((rng.randrange(s), rng.choice(labels), s))
    for s in range(n):
        for t in range(1, n):
            if rng.random() < density / len(labels):
                trans.add((s, rng.choice(labels), t))
    finals = {s for s in range(n) if rng.random() < final_prob}
    P = Automaton(frozenset(range(n)), frozenset(trans), 0, frozenset(finals), alphabet)
    assert validate(P).ok
    return P
