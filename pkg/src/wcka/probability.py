"""p-automata, p-simulation, the translation to probabilistic automata and
a bounded probabilistic simulation check.

In a p-automaton every probabilistic action ``flip`` is immediately followed
by exactly one transition per guard of its ProbSpec. The translation
``epsilon`` collapses each such ``flip``-then-guards pattern into one internal
transition (labelled ``tau``) into the weighted distribution over the guard
targets.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from . import lp
from .automata import AlphabetError, Automaton
from .simulation import SimRelation, SimulationGame

TAU = "tau"


class PAutomatonError(ValueError):
    """The automaton breaks the flip-then-guards discipline."""


@dataclass(frozen=True)
class Distribution:
    """Finitely supported distribution with exact rational weights."""

    weights: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        merged: dict[int, Fraction] = {}
        for s, p in self.weights:
            merged[s] = merged.get(s, Fraction(0)) + Fraction(p)
        for s, p in merged.items():
            if p <= 0:
                raise ValueError(f"weight {p} of state {s} is not positive")
        total = sum(merged.values())
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "weights", tuple(sorted(merged.items())))

    @classmethod
    def point(cls, s: int) -> Distribution:
        return cls(((s, Fraction(1)),))

    @classmethod
    def of(cls, mapping: Mapping[int, Fraction | int | str]) -> Distribution:
        return cls(tuple((s, Fraction(p)) for s, p in mapping.items()))

    @property
    def support(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.weights)

    def __getitem__(self, s: int) -> Fraction:
        for t, p in self.weights:
            if t == s:
                return p
        return Fraction(0)

    def is_point(self) -> bool:
        return len(self.weights) == 1

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.weights)

    def __str__(self) -> str:
        return " + ".join(f"{p}*d{s}" for s, p in self.weights)


def mix(parts: Iterable[tuple[Fraction, Distribution]]) -> Distribution:
    acc: dict[int, Fraction] = {}
    for w, d in parts:
        for s, p in d.weights:
            acc[s] = acc.get(s, Fraction(0)) + w * p
    return Distribution(tuple((s, p) for s, p in acc.items() if p))


@dataclass(frozen=True)
class ProbAutomaton:
    states: frozenset[int]
    transitions: frozenset[tuple[int, str, Distribution]]
    initial: Distribution
    finals: frozenset[int]
    internal: frozenset[str] = frozenset({TAU})

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "internal", frozenset(self.internal))
        if not self.initial.support <= self.states:
            raise ValueError("initial distribution leaves the state set")
        for s, _, d in self.transitions:
            if s not in self.states or not d.support <= self.states:
                raise ValueError(f"transition from {s} leaves the state set")

    @property
    def succ(self) -> dict[int, list[tuple[str, Distribution]]]:
        cached = self.__dict__.get("_succ")
        if cached is None:
            cached = {s: [] for s in self.states}
            for s, a, d in sorted(self.transitions, key=lambda t: (t[0], t[1], t[2].weights)):
                cached[s].append((a, d))
            self.__dict__["_succ"] = cached
        return cached

    def labels(self) -> frozenset[str]:
        return frozenset(a for _, a, _ in self.transitions)


# -- p-automata --------------------------------------------------------------


def p_violations(P: Automaton) -> list[str]:
    """Reasons why ``P`` is not a p-automaton (empty if it is one)."""
    A = P.alphabet
    problems = []
    flip_targets: dict[int, str] = {}
    for x, a, y in sorted(P.transitions):
        if a not in A.flips:
            continue
        if flip_targets.get(y, a) != a:
            problems.append(f"state {y} follows two different probabilistic actions")
        flip_targets[y] = a
    for y, flip in sorted(flip_targets.items()):
        spec = A.spec_for(flip)
        assert spec is not None
        if y in P.finals:
            problems.append(f"state {y} after {flip} is final")
        for a, _ in P.pred[y]:
            if a != flip:
                problems.append(f"state {y} after {flip} is also entered by {a}")
        out = [a for a, _ in P.succ[y]]
        if sorted(out) != sorted(spec.guards):
            problems.append(f"state {y} after {flip} has moves {sorted(out)}, expected one per guard {list(spec.guards)}")
    for x, a, _ in sorted(P.transitions):
        owner = A.guard_owner.get(a)
        if owner is not None and flip_targets.get(x) != owner.flip:
            problems.append(f"guard {a} at state {x} does not directly follow {owner.flip}")
    return problems


def is_p_automaton(P: Automaton) -> bool:
    return not p_violations(P)


def _branches(P: Automaton) -> list[tuple[int, str, int, tuple[int, ...]]]:
    """``(x, flip, x', (x''_1, ..., x''_n))`` for every flip transition, with
    the targets listed in ProbSpec order."""
    out = []
    for x, a, y in sorted(P.transitions):
        spec = P.alphabet.spec_for(a)
        if spec is None:
            continue
        by_guard = {g: t for g, t in P.succ[y]}
        out.append((x, a, y, tuple(by_guard[g] for g in spec.guards)))
    return out


def check_specs(P: Automaton, Q: Automaton) -> None:
    """Raise on ProbSpecs that cannot be paired; warn when guards only permute."""
    for sp in P.alphabet.prob:
        sq = Q.alphabet.spec_for(sp.flip)
        if sq is None or sq == sp:
            continue
        if sq.weights == sp.weights and sorted(sq.guards) == sorted(sp.guards):
            warnings.warn(f"guards of {sp.flip} are permuted between the two sides; pairing branches by index", stacklevel=3)
        else:
            raise AlphabetError(f"probabilistic action {sp.flip} has different specifications")
    extra = Q.alphabet.flips - P.alphabet.flips
    if extra:
        raise AlphabetError(f"probabilistic actions {sorted(extra)} only on one side")


class PSimulationGame(SimulationGame):
    """Rooted eta-simulation that also pairs flip branches by index."""

    def __init__(self, P: Automaton, Q: Automaton):
        super().__init__(P, Q)
        self.p_branches: dict[int, list[tuple[str, tuple[int, ...]]]] = {}
        self.q_branches: dict[int, list[tuple[str, tuple[int, ...]]]] = {}
        rev_p: dict[int, list[tuple[int, str, int]]] = {}
        rev_q: dict[int, list[tuple[int, str, int]]] = {}
        for x, f, _, targets in _branches(P):
            self.p_branches.setdefault(x, []).append((f, targets))
            for i, t in enumerate(targets):
                rev_p.setdefault(t, []).append((x, f, i))
        for y, f, _, targets in _branches(Q):
            self.q_branches.setdefault(y, []).append((f, targets))
            for i, t in enumerate(targets):
                rev_q.setdefault(t, []).append((y, f, i))
        self.rev_p, self.rev_q = rev_p, rev_q

    def _pairs(self, x: int, y: int) -> Iterator[tuple[int, int]]:
        for f, xs in self.p_branches.get(x, ()):
            for g, ys in self.q_branches.get(y, ()):
                if f == g:
                    yield from zip(xs, ys)

    def extra_ok(self, x: int, y: int, R: set) -> bool:
        return all(pair in R for pair in self._pairs(x, y))

    def extra_deps(self, x: int, y: int) -> Iterable[tuple[int, int]]:
        return self._pairs(x, y)

    def extra_affected(self, u: int, v: int) -> Iterable[tuple[int, int]]:
        for x, f, i in self.rev_p.get(u, ()):
            for y, g, j in self.rev_q.get(v, ()):
                if f == g and i == j:
                    yield (x, y)


def greatest_p_simulation(P: Automaton, Q: Automaton, *, on_the_fly: bool = True) -> SimRelation | None:
    for side, A in (("left", P), ("right", Q)):
        bad = p_violations(A)
        if bad:
            raise PAutomatonError(f"{side} side is not a p-automaton: {bad[0]}")
    check_specs(P, Q)
    R = PSimulationGame(P, Q).solve(on_the_fly=on_the_fly)
    if (P.initial, Q.initial) not in R:
        return None
    return SimRelation(frozenset(R))


def p_leq(P: Automaton, Q: Automaton) -> bool:
    return greatest_p_simulation(P, Q) is not None


def p_equiv(P: Automaton, Q: Automaton) -> bool:
    return p_leq(P, Q) and p_leq(Q, P)


# -- translation ---------------------------------------------------------------


def epsilon(P: Automaton) -> ProbAutomaton:
    """Collapse every flip-then-guards pattern into one ``tau`` transition."""
    bad = p_violations(P)
    if bad:
        raise PAutomatonError(bad[0])
    A = P.alphabet
    if TAU in A.actions:
        raise AlphabetError(f"action name {TAU!r} is reserved for collapsed probabilistic steps")
    trans: dict[int, list[tuple[str, Distribution]]] = {s: [] for s in P.states}
    for x, a, y in sorted(P.transitions):
        spec = A.spec_for(a)
        if spec is not None:
            by_guard = {g: t for g, t in P.succ[y]}
            dist = Distribution(tuple((by_guard[g], p) for p, g in spec.branches))
            trans[x].append((TAU, dist))
        elif a in A.guard_owner:
            continue  # consumed by the collapse above
        else:
            trans[x].append((a, Distribution.point(y)))
    keep = {P.initial}
    todo = [P.initial]
    while todo:
        s = todo.pop()
        for _, d in trans[s]:
            for t in d.support:
                if t not in keep:
                    keep.add(t)
                    todo.append(t)
    internal = (A.internal - set(A.guard_owner)) | {TAU}
    return ProbAutomaton(
        states=frozenset(keep),
        transitions=frozenset((s, a, d) for s in keep for a, d in trans[s]),
        initial=Distribution.point(P.initial),
        finals=P.finals & keep,
        internal=frozenset(internal),
    )


# -- lifting and probabilistic simulation -------------------------------------

Relation = Mapping[int, Iterable[Distribution]]


def lift_witness(S: Relation, phi: Distribution, psi: Distribution) -> dict[tuple[int, Distribution], Fraction] | None:
    """Weights ``w[x, c]`` with ``sum_c w[x, c] = phi(x)`` for candidates
    ``x S c`` and ``sum w[x, c] * c = psi``; ``None`` if no such split exists."""
    cands = {x: sorted(set(S.get(x, ())), key=lambda d: d.weights) for x in phi.support}
    if any(not c for c in cands.values()):
        return None
    # fast path: one candidate per state forces the mixture
    if all(len(c) == 1 for c in cands.values()):
        if mix((phi[x], c[0]) for x, c in cands.items()) == psi:
            return {(x, c[0]): phi[x] for x, c in cands.items()}
        return None
    cols = [(x, c) for x in sorted(cands) for c in cands[x]]
    targets = sorted(psi.support | {s for _, c in cols for s in c.support})
    A = []
    b = []
    for x in sorted(cands):
        A.append([1 if cx == x else 0 for cx, _ in cols])
        b.append(phi[x])
    for q in targets:
        A.append([c[q] for _, c in cols])
        b.append(psi[q])
    sol = lp.feasible(A, b)
    if sol is None:
        return None
    return {col: w for col, w in zip(cols, sol) if w}


def lift_check(S: Relation, phi: Distribution, psi: Distribution) -> bool:
    return lift_witness(S, phi, psi) is not None


def _pure_steps(Q: ProbAutomaton, psi: Distribution, labels: frozenset[str] | None, optional: bool) -> set[Distribution]:
    """Lifted steps of ``psi``: every support state independently picks one
    move labelled in ``labels`` (``None``: internal moves). With ``optional``
    a state may also stay where it is."""
    choices = []
    for s, p in psi.weights:
        opts: list[Distribution] = []
        for a, d in Q.succ[s]:
            if (a in Q.internal) if labels is None else (a in labels):
                opts.append(d)
        if optional:
            opts.append(Distribution.point(s))
        if not opts:
            return set()
        choices.append([(p, d) for d in opts])
    return {mix(combo) for combo in itertools.product(*choices)}


def weak_successors(Q: ProbAutomaton, psi: Distribution, a: str, weak_bound: int) -> set[Distribution]:
    """Every ``psi'`` with ``psi`` going by at most ``weak_bound`` lifted
    internal steps and then one lifted ``a`` step. An internal ``a`` may be
    answered by the internal steps alone, none at all included."""
    reach = {psi}
    frontier = {psi}
    for _ in range(weak_bound):
        nxt = set()
        for d in frontier:
            nxt |= _pure_steps(Q, d, None, optional=True)
        frontier = nxt - reach
        reach |= nxt
        if not frontier:
            break
    if a in Q.internal:
        return reach
    out: set[Distribution] = set()
    for d in reach:
        out |= _pure_steps(Q, d, frozenset({a}), optional=False)
    return out


def candidate_distributions(Q: ProbAutomaton) -> list[Distribution]:
    cands = {Distribution.point(s) for s in Q.states} | {Q.initial}
    cands |= {d for _, _, d in Q.transitions}
    return sorted(cands, key=lambda d: d.weights)


@dataclass
class ProbSimResult:
    holds: bool
    relation: dict[int, list[Distribution]] = field(default_factory=dict)


def greatest_prob_simulation(P: ProbAutomaton, Q: ProbAutomaton, weak_bound: int = 2) -> ProbSimResult:
    """Greatest relation ``S`` between states of ``P`` and candidate
    distributions of ``Q`` meeting the transfer and final-state clauses; the
    result holds iff the initial distributions are related by its lifting."""
    if weak_bound < 1:
        raise ValueError("weak bound must be positive")
    cands = candidate_distributions(Q)
    S: dict[int, list[Distribution]] = {
        x: [c for c in cands if x not in P.finals or c.support <= Q.finals] for x in sorted(P.states)
    }
    succ_cache: dict[tuple[Distribution, str], set[Distribution]] = {}

    def succs(psi: Distribution, a: str) -> set[Distribution]:
        key = (psi, a)
        if key not in succ_cache:
            succ_cache[key] = weak_successors(Q, psi, a, weak_bound)
        return succ_cache[key]

    def ok(x: int, psi: Distribution) -> bool:
        for a, phi in P.succ[x]:
            if not any(lift_check(S, phi, psi2) for psi2 in succs(psi, a)):
                return False
        return True

    changed = True
    while changed:
        changed = False
        for x in sorted(S):
            keep = [c for c in S[x] if ok(x, c)]
            if len(keep) != len(S[x]):
                S[x] = keep
                changed = True
    holds = lift_check(S, P.initial, Q.initial)
    return ProbSimResult(holds, S)


def prob_leq(P: ProbAutomaton, Q: ProbAutomaton, weak_bound: int = 2) -> bool:
    return greatest_prob_simulation(P, Q, weak_bound).holds


def is_prob_simulation(P: ProbAutomaton, Q: ProbAutomaton, S: Relation, weak_bound: int = 2) -> bool:
    """Check every clause for a given relation (states of ``P`` to distributions)."""
    if not lift_check(S, P.initial, Q.initial):
        return False
    for x, ds in S.items():
        for psi in ds:
            if x in P.finals and not psi.support <= Q.finals:
                return False
            for a, phi in P.succ[x]:
                if not any(lift_check(S, phi, psi2) for psi2 in weak_successors(Q, psi, a, weak_bound)):
                    return False
    return True


def image_relation(sim: SimRelation, P: ProbAutomaton, Q: ProbAutomaton) -> dict[int, list[Distribution]]:
    """A state relation restricted to the translated state spaces, with
    right-hand states read as point distributions."""
    out: dict[int, list[Distribution]] = {}
    for x, y in sim:
        if x in P.states and y in Q.states:
            out.setdefault(x, []).append(Distribution.point(y))
    return out

