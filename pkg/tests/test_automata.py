from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcka.automata import (
    Alphabet,
    AlphabetError,
    Automaton,
    ProbSpec,
    StateCapExceeded,
    mk_action,
    mk_one,
    mk_zero,
    par,
    plus,
    power,
    seq,
    star,
    summary,
    validate,
)
from wcka.generate import canonical_key, enumerate_automata, from_key, random_automaton

AB = Alphabet(internal=frozenset({"t"}), external=frozenset({"a", "b"}), frame=frozenset({"a", "b"}))


def act(a):
    return mk_action(a, AB)


def edges(P):
    return sorted(P.transitions)


def test_constants():
    assert summary(mk_zero(AB)) == {"states": 1, "transitions": 0, "finals": 0}
    assert summary(mk_one(AB)) == {"states": 1, "transitions": 0, "finals": 1}
    a = act("a")
    assert edges(a) == [(0, "a", 1)] and a.finals == {1}


def test_plus_merges_initial_states():
    P = plus(act("a"), act("b"))
    assert len(P.states) == 3
    assert {a for a, _ in P.initial_moves()} == {"a", "b"}
    assert P.initial not in P.finals
    assert plus(mk_one(AB), act("a")).initial in plus(mk_one(AB), act("a")).finals


def test_seq_splices_at_finals():
    P = seq(act("a"), act("b"))
    assert edges(P) == [(0, "a", 1), (1, "b", 2)] and P.finals == {2}
    # a final initial state on the right keeps the left finals
    Q = seq(act("a"), plus(mk_one(AB), act("b")))
    assert Q.finals == {1, 2}


def test_star_has_fresh_final_initial():
    P = star(act("a"))
    assert edges(P) == [(0, "a", 1), (1, "a", 1)]
    assert P.finals == {0, 1}
    assert validate(P).ok


def test_par_synchronises_frame_actions():
    assert summary(par(act("a"), act("a"))) == {"states": 2, "transitions": 1, "finals": 1}
    # a and b both in the frame: nobody can move
    assert summary(par(act("a"), act("b"))) == {"states": 1, "transitions": 0, "finals": 0}
    # empty frame: the diamond
    assert summary(par(act("a"), act("b"), frame=())) == {"states": 4, "transitions": 4, "finals": 1}
    # internal actions always interleave
    assert summary(par(act("t"), act("t"))) == {"states": 4, "transitions": 4, "finals": 1}


def test_par_cap():
    P = star(plus(act("a"), act("t")))
    with pytest.raises(StateCapExceeded):
        par(par(P, P, frame=()), P, frame=(), cap=3)


def test_power():
    assert summary(power(act("a"), 0)) == summary(mk_one(AB))
    assert summary(power(act("a"), 3)) == {"states": 4, "transitions": 3, "finals": 1}


def test_validate_reports_problems():
    bad = Automaton(frozenset({0, 1, 2}), frozenset({(0, "a", 1), (1, "a", 0)}), 0, frozenset(), AB)
    report = validate(bad)
    assert not report.ok
    assert report.unreachable == (2,)
    assert report.into_initial == ((1, "a", 0),)


def test_automaton_rejects_foreign_states():
    with pytest.raises(ValueError):
        Automaton(frozenset({0}), frozenset({(0, "a", 1)}), 0, frozenset(), AB)


def test_alphabet_rules():
    coin = ProbSpec("flip", ((Fraction(1, 2), "h"), (Fraction(1, 2), "g")))
    A = Alphabet(external=frozenset({"a"}), prob=(coin,))
    assert A.internal == {"h", "g"} and A.external == {"a", "flip"}
    with pytest.raises(AlphabetError):
        A.with_frame({"flip"})
    with pytest.raises(AlphabetError):
        A.with_frame({"h"})
    with pytest.raises(AlphabetError):
        A.with_frame({"zzz"})
    with pytest.raises(AlphabetError):
        Alphabet(internal=frozenset({"a"}), external=frozenset({"a"}))
    with pytest.raises(AlphabetError):
        ProbSpec("flip", ((Fraction(1, 2), "h"), (Fraction(1, 3), "g")))
    with pytest.raises(AlphabetError):
        ProbSpec("flip", ((Fraction(1, 2), "h"), (Fraction(1, 2), "h")))


def test_mixed_alphabets_are_rejected():
    other = Alphabet(external=frozenset({"a"}))
    with pytest.raises(AlphabetError):
        plus(act("a"), mk_action("a", other))


def test_enumeration_counts():
    # frozen from the enumerator, cross-checked below against a brute-force count
    assert sum(1 for _ in enumerate_automata(AB, ["a"], 2)) == 10
    assert sum(1 for _ in enumerate_automata(AB, ["a", "b", "t"], 3, acyclic=True)) == 3376


def test_enumeration_matches_brute_force():
    # every relabelled well-formed automaton with at most 2 states over {a}
    from itertools import combinations

    keys = set()
    for n in (1, 2):
        slots = [(s, "a", t) for s in range(n) for t in range(n)]
        for k in range(len(slots) + 1):
            for trans in combinations(slots, k):
                for mask in range(1 << n):
                    P = Automaton(
                        frozenset(range(n)), frozenset(trans), 0, frozenset(i for i in range(n) if mask >> i & 1), AB
                    )
                    if validate(P).ok:
                        keys.add(canonical_key(P))
    assert len(keys) == 10
    assert {canonical_key(P) for P in enumerate_automata(AB, ["a"], 2)} == keys


def test_canonical_key_roundtrip():
    P = seq(act("a"), star(act("b")))
    assert canonical_key(from_key(canonical_key(P), AB)) == canonical_key(P)


OPS = ["plus", "seq", "star", "par"]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.sampled_from(OPS), min_size=1, max_size=6))
def test_operators_preserve_well_formedness(seed, ops):
    import random

    rng = random.Random(seed)
    P = random_automaton(rng, AB, max_states=4)
    for op in ops:
        Q = random_automaton(rng, AB, max_states=3)
        if op == "plus":
            P = plus(P, Q)
        elif op == "seq":
            P = seq(P, Q)
        elif op == "star":
            P = star(P)
        else:
            P = par(P, Q, cap=2000)
        assert validate(P).ok
