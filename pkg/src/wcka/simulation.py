"""Rooted eta-simulation: decision procedure and an independent tree oracle.

``P <= Q`` holds when a relation ``S`` between the states of ``P`` and ``Q``
relates the initial states, relates ``i_P`` to nothing but ``i_Q``, maps
finals to finals, and answers every move of ``P``:

* an internal move ``x -> x'`` by some ``y => y'`` with ``(x', y') in S``;
* an external move ``x -a-> x'`` by ``y => y1 -a-> y'`` with both
  ``(x, y1)`` and ``(x', y')`` in ``S``.

Here ``=>`` is the reflexive-transitive closure of internal moves. The
greatest such relation is computed by deleting violating pairs until stable.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .automata import AlphabetError, Automaton

Pair = tuple[int, int]


class TauClosure:
    """The relation ``x => y`` of one automaton (paths of internal actions only)."""

    def __init__(self, P: Automaton):
        internal = P.alphabet.internal
        step: dict[int, list[int]] = {s: [] for s in P.states}
        for s, a, t in P.transitions:
            if a in internal:
                step[s].append(t)
        reach: dict[int, frozenset[int]] = {}
        for s in P.states:
            seen = {s}
            todo = [s]
            while todo:
                u = todo.pop()
                for v in step[u]:
                    if v not in seen:
                        seen.add(v)
                        todo.append(v)
            reach[s] = frozenset(seen)
        self.reach = reach
        back: dict[int, set[int]] = {s: set() for s in P.states}
        for s, targets in reach.items():
            for t in targets:
                back[t].add(s)
        self.back = {s: frozenset(v) for s, v in back.items()}

    def __getitem__(self, x: int) -> frozenset[int]:
        return self.reach[x]

    def __contains__(self, pair: Pair) -> bool:
        x, y = pair
        return y in self.reach.get(x, ())

    def pairs(self) -> set[Pair]:
        return {(x, y) for x, ys in self.reach.items() for y in ys}


def tau_closure(P: Automaton) -> TauClosure:
    # automata are immutable, so the closure is computed once per object
    cached = P.__dict__.get("_tau_closure")
    if cached is None:
        cached = TauClosure(P)
        P.__dict__["_tau_closure"] = cached
    return cached


def _moves_by_action(Q: Automaton) -> tuple[dict, dict]:
    cached = Q.__dict__.get("_moves_by_action")
    if cached is None:
        internal = Q.alphabet.internal
        tau = tau_closure(Q)
        q_moves: dict[int, dict[str, tuple[int, ...]]] = {}
        for y in Q.states:
            d: dict[str, list[int]] = {}
            for a, y2 in Q.succ[y]:
                d.setdefault(a, []).append(y2)
            q_moves[y] = {a: tuple(v) for a, v in d.items()}
        # y -> states that reach y by "=> then one visible step"
        back_step: dict[int, set[int]] = {y: set() for y in Q.states}
        for y1, a, y2 in Q.transitions:
            if a not in internal:
                back_step[y2] |= tau.back[y1]
        cached = (q_moves, back_step)
        Q.__dict__["_moves_by_action"] = cached
    return cached


@dataclass(frozen=True)
class SimRelation:
    pairs: frozenset[Pair]

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def to_json(self) -> list[list[int]]:
        return [[x, y] for x, y in sorted(self.pairs)]


def check_compatible(P: Automaton, Q: Automaton) -> None:
    a, b = P.alphabet, Q.alphabet
    if a.internal != b.internal or a.external != b.external:
        raise AlphabetError("simulation needs both automata over the same actions")


class SimulationGame:
    """Pair-deletion engine for the greatest rooted eta-simulation.

    Subclasses may add constraints through :meth:`extra_ok`,
    :meth:`extra_deps` and :meth:`extra_affected`.
    """

    def __init__(self, P: Automaton, Q: Automaton):
        check_compatible(P, Q)
        self.P, self.Q = P, Q
        self.internal = P.alphabet.internal
        self.tauQ = tau_closure(Q)
        self.q_moves, self.back_step = _moves_by_action(Q)

    def local_ok(self, x: int, y: int) -> bool:
        if x == self.P.initial and y != self.Q.initial:
            return False
        if x in self.P.finals and y not in self.Q.finals:
            return False
        return True

    def ok(self, x: int, y: int, R: set[Pair]) -> bool:
        tau = self.tauQ.reach[y]
        for a, x2 in self.P.succ[x]:
            if a in self.internal:
                if not any((x2, y2) in R for y2 in tau):
                    return False
            else:
                if not any(
                    (x, y1) in R and any((x2, y2) in R for y2 in self.q_moves[y1].get(a, ()))
                    for y1 in tau
                ):
                    return False
        return self.extra_ok(x, y, R)

    def deps(self, x: int, y: int) -> Iterator[Pair]:
        tau = self.tauQ.reach[y]
        for a, x2 in self.P.succ[x]:
            if a in self.internal:
                for y2 in tau:
                    yield (x2, y2)
            else:
                for y1 in tau:
                    yield (x, y1)
                    for y2 in self.q_moves[y1].get(a, ()):
                        yield (x2, y2)
        yield from self.extra_deps(x, y)

    def affected(self, u: int, v: int, R: set[Pair]) -> Iterator[Pair]:
        xs = {u} | {x for _, x in self.P.pred[u]}
        ys = self.tauQ.back[v] | self.back_step[v]
        for x in xs:
            for y in ys:
                if (x, y) in R:
                    yield (x, y)
        for pair in self.extra_affected(u, v):
            if pair in R:
                yield pair

    def extra_ok(self, x: int, y: int, R: set[Pair]) -> bool:
        return True

    def extra_deps(self, x: int, y: int) -> Iterable[Pair]:
        return ()

    def extra_affected(self, u: int, v: int) -> Iterable[Pair]:
        return ()

    def candidates(self, on_the_fly: bool) -> set[Pair]:
        if not on_the_fly:
            return {(x, y) for x in self.P.states for y in self.Q.states if self.local_ok(x, y)}
        root = (self.P.initial, self.Q.initial)
        if not self.local_ok(*root):
            return set()
        seen = {root}
        todo = [root]
        while todo:
            x, y = todo.pop()
            for pair in self.deps(x, y):
                if pair not in seen and self.local_ok(*pair):
                    seen.add(pair)
                    todo.append(pair)
        return seen

    def solve(self, on_the_fly: bool = False, seed: int | None = None) -> set[Pair]:
        R = self.candidates(on_the_fly)
        order = sorted(R)
        if seed is not None:
            random.Random(seed).shuffle(order)
        work = deque(order)
        queued = set(order)
        while work:
            pair = work.popleft()
            queued.discard(pair)
            if pair not in R or self.ok(pair[0], pair[1], R):
                continue
            R.discard(pair)
            for other in self.affected(pair[0], pair[1], R):
                if other not in queued:
                    queued.add(other)
                    work.append(other)
        return R


def greatest_simulation(
    P: Automaton,
    Q: Automaton,
    *,
    on_the_fly: bool = False,
    seed: int | None = None,
) -> SimRelation | None:
    """The greatest rooted eta-simulation from ``P`` to ``Q``, or ``None``.

    With ``on_the_fly`` only pairs the root can depend on are explored; the
    result is then the greatest simulation restricted to those pairs.
    ``seed`` shuffles the deletion order (the result does not depend on it).
    """
    R = SimulationGame(P, Q).solve(on_the_fly=on_the_fly, seed=seed)
    if (P.initial, Q.initial) not in R:
        return None
    return SimRelation(frozenset(R))


def _bitsets(Q: Automaton) -> tuple:
    cached = Q.__dict__.get("_bitsets")
    if cached is None:
        pos = {y: i for i, y in enumerate(sorted(Q.states))}
        tau = [0] * len(pos)
        for y, ys in tau_closure(Q).reach.items():
            tau[pos[y]] = sum(1 << pos[z] for z in ys)
        step: dict[str, list[tuple[int, int]]] = {}
        for y1, a, y2 in sorted(Q.transitions):
            step.setdefault(a, []).append((pos[y1], 1 << pos[y2]))
        finals = sum(1 << pos[y] for y in Q.finals)
        cached = (len(pos), pos, tau, step, finals)
        Q.__dict__["_bitsets"] = cached
    return cached


def leq(P: Automaton, Q: Automaton) -> bool:
    """Decide ``P <= Q``.

    Same fixpoint as :class:`SimulationGame`, with the candidate ``y`` of each
    ``x`` kept as a bit mask. Whether the root pair survives does not depend
    on the evaluation order.
    """
    check_compatible(P, Q)
    n, pos, tau, step, finals = _bitsets(Q)
    R = {x: (finals if x in P.finals else (1 << n) - 1) for x in P.states}
    R[P.initial] &= 1 << pos[Q.initial]
    internal = P.alphabet.internal
    moves = {x: P.succ[x] for x in P.states if P.succ[x]}
    changed = True
    while changed and R[P.initial]:
        changed = False
        for x, xs in moves.items():
            keep = R[x]
            for a, x2 in xs:
                target = R[x2]
                if a not in internal:
                    # y1 able to do a into the target, and still related to x
                    pre = 0
                    for y1, m in step.get(a, ()):
                        if m & target:
                            pre |= 1 << y1
                    target = pre & R[x]
                ok = 0
                for i, m in enumerate(tau):
                    if m & target:
                        ok |= 1 << i
                keep &= ok
                if not keep:
                    break
            if keep != R[x]:
                R[x] = keep
                changed = True
    return bool(R[P.initial])


def equiv(P: Automaton, Q: Automaton) -> bool:
    return leq(P, Q) and leq(Q, P)


def is_simulation(P: Automaton, Q: Automaton, S: Iterable[Pair]) -> bool:
    """Check every clause of the definition for a given relation."""
    R = set(S)
    game = SimulationGame(P, Q)
    if (P.initial, Q.initial) not in R:
        return False
    return all(game.local_ok(x, y) and game.ok(x, y, R) for x, y in R)


# -- bounded tree-language oracle -------------------------------------------


@dataclass(frozen=True)
class Tree:
    """A finite tree: finality marker and labelled children."""

    final: bool
    children: tuple[tuple[str, "Tree"], ...] = ()

    def depth(self) -> int:
        return 1 + max((c.depth() for _, c in self.children), default=-1)

    def size(self) -> int:
        return 1 + sum(c.size() for _, c in self.children)


class TreeTable:
    """Hash-consing of tree nodes: equal subtrees become one object."""

    def __init__(self) -> None:
        self._nodes: dict[tuple, Tree] = {}

    def node(self, final: bool, children: tuple[tuple[str, Tree], ...]) -> Tree:
        key = (final, tuple((a, id(c)) for a, c in children))
        t = self._nodes.get(key)
        if t is None:
            t = self._nodes[key] = Tree(final, children)
        return t

    def __len__(self) -> int:
        return len(self._nodes)


def unfold(P: Automaton, depth: int, state: int | None = None, table: TreeTable | None = None) -> Tree:
    """Loop-free unfolding of ``P`` cut off after ``depth`` transitions.

    Equal subtrees are shared, so the result is a DAG of ``Tree`` nodes;
    pass a ``table`` to share them across automata too.
    """
    table = TreeTable() if table is None else table
    memo: dict[tuple[int, int], Tree] = {}

    def go(s: int, d: int) -> Tree:
        key = (s, d)
        if key not in memo:
            kids = () if d == 0 else tuple((a, go(t, d - 1)) for a, t in P.succ[s])
            memo[key] = table.node(s in P.finals, kids)
        return memo[key]

    return go(P.initial if state is None else state, depth)


def _silent_reach(Q: Automaton) -> dict[int, frozenset[int]]:
    # deliberately separate from TauClosure so the oracle shares no code with leq
    cached = Q.__dict__.get("_silent_reach")
    if cached is None:
        internal = Q.alphabet.internal
        cached = {}
        for y in Q.states:
            seen = {y}
            todo = [y]
            while todo:
                u = todo.pop()
                for a, v in Q.succ[u]:
                    if a in internal and v not in seen:
                        seen.add(v)
                        todo.append(v)
            cached[y] = frozenset(seen)
        Q.__dict__["_silent_reach"] = cached
    return cached


class TreeOracle:
    """Decides ``t <= Q`` for trees ``t`` by recursion on the tree.

    For every tree node, bottom-up, the set of ``Q`` states able to simulate
    it is a greatest fixpoint over ``Q`` alone (the only same-node
    dependency is the stuttering pair ``(x, y1)``). Results are memoised per
    node object, so trees from one :class:`TreeTable` share the work.
    """

    def __init__(self, Q: Automaton):
        self.Q = Q
        self.internal = Q.alphabet.internal
        self.reach = _silent_reach(Q)
        self.memo: dict[tuple[int, bool], frozenset[int]] = {}

    def good(self, node: Tree, is_root: bool) -> frozenset[int]:
        key = (id(node), is_root)
        if key in self.memo:
            return self.memo[key]
        Q, reach = self.Q, self.reach
        kids = [(a, self.good(c, False)) for a, c in node.children]
        G = {
            y for y in Q.states
            if (not is_root or y == Q.initial) and (not node.final or y in Q.finals)
        }
        changed = True
        while changed:
            changed = False
            for y in list(G):
                for a, Gc in kids:
                    if a in self.internal:
                        fine = any(y2 in Gc for y2 in reach[y])
                    else:
                        fine = any(
                            y1 in G and any(b == a and y2 in Gc for b, y2 in Q.succ[y1])
                            for y1 in reach[y]
                        )
                    if not fine:
                        G.discard(y)
                        changed = True
                        break
        self.memo[key] = frozenset(G)
        return self.memo[key]

    def simulates(self, t: Tree) -> bool:
        return self.Q.initial in self.good(t, True)


def tree_simulated(t: Tree, Q: Automaton) -> bool:
    return TreeOracle(Q).simulates(t)


def bounded_tree_language_leq(P: Automaton, Q: Automaton, depth: int) -> bool:
    """Check that every unfolding of ``P`` up to ``depth`` is simulated by ``Q``.

    A necessary condition for ``P <= Q``; exact for acyclic ``P`` once
    ``depth`` reaches its longest path. Only the deepest unfolding is
    checked: cutting a simulated tree shorter only drops obligations.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    check_compatible(P, Q)
    return tree_simulated(unfold(P, depth), Q)


def longest_path(P: Automaton) -> int:
    """Length of the longest path of an acyclic automaton."""
    memo: dict[int, int] = {}

    def go(s: int) -> int:
        if s not in memo:
            memo[s] = max((1 + go(t) for _, t in P.succ[s]), default=0)
        return memo[s]

    if not P.is_acyclic():
        raise ValueError("automaton has a cycle")
    return go(P.initial)
