"""Exhaustive cross-validation harnesses.

``may_vs_traces`` compares brute-force may testing with trace inclusion on
every pair of a finite universe of automata; ``tree_oracle_vs_leq`` compares
the tree-language oracle with the simulation checker.

The may side never looks at trace languages. For every automaton it records
how each test of depth at most two relates its states (see
``observation._Rel``); a depth-three test is a sum or a product of two such
tests, and a separating sum always has a separating summand, so products
``u.v`` (with ``u``, ``v`` of depth at most two, ``1`` included) decide the
order. ``o(P || u.v) != 0`` iff some state reached by ``u`` from the initial
state can finish ``v`` in a final state.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .automata import Automaton
from .observation import _Rel, language_witness, may_witness, test_terms, trace_language
from .simulation import TreeOracle, TreeTable, leq, longest_path, unfold
from .terms import Seq, to_text


def _level_arrays(P: Automaton, frame: frozenset[str]) -> tuple[np.ndarray, np.ndarray]:
    """Reach masks ``R`` and co-reach masks ``C`` of every depth-two test, in
    the order of :func:`test_terms`."""
    rel = _Rel(P, frame)
    atoms = [rel.zero, rel.one] + [rel.atoms[a] for a in sorted(frame)]
    level1 = list(atoms)
    for x, y in product(atoms, repeat=2):
        level1.append(rel.union(x, y))
        level1.append(rel.compose(x, y))
    n = rel.n
    M = np.array(level1, dtype=np.uint16).reshape(len(level1), n)
    R1 = M[:, rel.init].copy()
    C1 = np.zeros(len(level1), np.uint16)
    for p in range(n):
        C1 |= ((M[:, p] & rel.finals) != 0).astype(np.uint16) << p
    k = len(level1)
    Rp = R1[:, None] | R1[None, :]
    Cp = C1[:, None] | C1[None, :]
    Rs = np.zeros((k, k), np.uint16)
    Cs = np.zeros((k, k), np.uint16)
    for p in range(n):
        Rs |= ((R1[:, None] >> p) & 1) * M[None, :, p]
        Cs |= ((M[:, p][:, None] & C1[None, :]) != 0).astype(np.uint16) << p
    R2 = np.stack([Rp, Rs], axis=2).reshape(-1)
    C2 = np.stack([Cp, Cs], axis=2).reshape(-1)
    return np.concatenate([R1, R2]), np.concatenate([C1, C2])


@dataclass
class Disagreement:
    left: Automaton
    right: Automaton
    may: bool
    traces: bool
    detail: str = ""


@dataclass
class MayTraceReport:
    automata: int
    pairs: int
    trace_classes: int
    distinct_tests: int
    disagreements: list[Disagreement] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements


def may_vs_traces(universe: Sequence[Automaton], spot_checks: int = 0) -> MayTraceReport:
    """Compare ``may_leq_bruteforce(P, Q, 3)`` with ``trace_leq(P, Q)`` for
    every ordered pair of ``universe`` (one shared alphabet)."""
    start = time.perf_counter()
    frame = universe[0].alphabet.frame
    tests = list(test_terms(frame, 2))
    R = np.zeros((len(universe), len(tests)), np.uint16)
    C = np.zeros_like(R)
    for i, P in enumerate(universe):
        R[i], C[i] = _level_arrays(P, frame)
    # keep one test per column behaviour over the whole universe
    cols = np.ascontiguousarray(np.vstack([R, C]).T)
    _, keep = np.unique(cols.view(np.dtype((np.void, cols.shape[1] * cols.itemsize))).ravel(), return_index=True)
    keep = np.sort(keep)
    R, C = R[:, keep], C[:, keep]
    kept = [tests[i] for i in keep]

    def passed(i: int) -> np.ndarray:
        # success of u.v for every kept pair (u, v), flattened
        return ((R[i, :, None] & C[i, None, :]) != 0).ravel()

    langs = [trace_language(P) for P in universe]
    classes: dict[tuple, list[int]] = {}
    for i, L in enumerate(langs):
        classes.setdefault(L.canonical(), []).append(i)
    report = MayTraceReport(len(universe), len(universe) ** 2, len(classes), len(kept))

    # inside a trace class every member must pass exactly the same tests
    reps = [members[0] for members in classes.values()]
    NZ = np.array([passed(r) for r in reps])
    for c, members in enumerate(classes.values()):
        for m in members[1:]:
            row = passed(m)
            if not np.array_equal(NZ[c], row):
                diff = np.flatnonzero(NZ[c] != row)[0]
                u, v = divmod(int(diff), len(kept))
                report.disagreements.append(
                    Disagreement(universe[members[0]], universe[m], False, True, f"test {to_text(Seq(kept[u], kept[v]))}")
                )
    # across classes: P may-below Q iff every test passed by P is passed by Q
    Z = NZ.astype(np.float32)
    missing = Z @ (1.0 - Z).T  # tests passed by row but not by column
    for a, ra in enumerate(reps):
        for b, rb in enumerate(reps):
            may = missing[a, b] == 0
            traces = language_witness(langs[ra], langs[rb]) is None
            if may != traces:
                report.disagreements.append(Disagreement(universe[ra], universe[rb], may, traces))
    # tie the fast path to the direct search
    if spot_checks:
        rng = np.random.default_rng(0)
        for _ in range(spot_checks):
            a, b = (int(x) for x in rng.integers(len(reps), size=2))
            ra, rb = reps[a], reps[b]
            direct = may_witness(universe[ra], universe[rb], 3) is None
            if direct != (missing[a, b] == 0):
                report.disagreements.append(
                    Disagreement(universe[ra], universe[rb], direct, missing[a, b] == 0, "fast path mismatch")
                )
    report.seconds = time.perf_counter() - start
    return report


@dataclass
class OracleReport:
    automata: int
    pairs: int
    related: int
    disagreements: list[tuple[Automaton, Automaton, bool, bool]] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements


def tree_oracle_vs_leq(universe: Sequence[Automaton]) -> OracleReport:
    """Compare ``bounded_tree_language_leq`` at saturating depth with ``leq``
    on every ordered pair of ``universe`` (acyclic automata)."""
    start = time.perf_counter()
    report = OracleReport(len(universe), len(universe) ** 2, 0)
    table = TreeTable()
    roots = [unfold(P, max(1, longest_path(P)), table=table) for P in universe]
    for Q in universe:
        oracle = TreeOracle(Q)
        for P, t in zip(universe, roots):
            a = leq(P, Q)
            b = oracle.simulates(t)
            report.related += a
            if a != b:
                report.disagreements.append((P, Q, a, b))
    report.seconds = time.perf_counter() - start
    return report


@dataclass
class BridgeReport:
    pairs: int
    attempts: int
    failures: list[tuple[Automaton, Automaton]] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures


def p_related_pairs(seed: int, count: int, max_depth: int = 3) -> tuple[list[tuple[Automaton, Automaton]], int]:
    """``count`` seeded pairs of p-automata with ``p_leq(P, Q)``.

    Half of the right sides are ``P + R`` for a random ``R``, the other half
    are independent samples kept only when related. Returns the pairs and
    the number of candidate pairs drawn.
    """
    from .laws import TermGenerator
    from .probability import is_p_automaton, p_leq
    from .terms import Plus, compile

    gen = TermGenerator(seed=seed, max_depth=max_depth, weights={"atom": 3, "plus": 3, "seq": 3, "star": 1, "flip": 4})
    rng = gen.rng_for("bridge")
    out: list[tuple[Automaton, Automaton]] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        s = gen.sample(rng)
        t = Plus(s, gen.sample(rng)) if attempts % 2 else gen.sample(rng)
        P, Q = compile(s, gen.alphabet), compile(t, gen.alphabet)
        if is_p_automaton(P) and is_p_automaton(Q) and p_leq(P, Q):
            out.append((P, Q))
    return out, attempts


def bridge_check(pairs: Sequence[tuple[Automaton, Automaton]], weak_bound: int = 2) -> BridgeReport:
    """``prob_leq(eps(P), eps(Q))`` for p-related pairs."""
    from .probability import epsilon, prob_leq

    start = time.perf_counter()
    report = BridgeReport(len(pairs), len(pairs))
    for P, Q in pairs:
        if not prob_leq(epsilon(P), epsilon(Q), weak_bound):
            report.failures.append((P, Q))
    report.seconds = time.perf_counter() - start
    return report
