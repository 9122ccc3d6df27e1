import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcka import observation as obs
from wcka.automata import par
from wcka.generate import random_automaton
from wcka.observation import (
    Observation,
    count_test_terms,
    may_witness,
    may_witness_literal,
    observe,
    test_succeeds as succeeds,
    trace_equiv,
    trace_language,
    trace_leq,
    trace_witness,
)
from wcka.terms import compile, load_alphabet, parse, to_text

O = Observation


@pytest.mark.parametrize(
    "text, value",
    [
        ("0", O.ZERO),
        ("1", O.ONE),
        ("t", O.TAU),
        ("t.1", O.TAU),
        ("a", O.TAU),
        ("t + a", O.TAU),
        ("a + 1", O.ONE),
        ("t.a + 1", O.ONE),
        ("1 || a", O.ZERO),
        ("a.0", O.ZERO),
    ],
)
def test_observe(c, text, value):
    assert observe(c(text)) is value


def test_observation_algebra():
    assert O.ZERO < O.TAU < O.ONE
    assert O.TAU * O.ONE is O.TAU and O.ZERO * O.ONE is O.ZERO
    assert O.TAU + O.ZERO is O.TAU
    assert str(O.TAU) == "tau"


def test_trace_words(c):
    L = trace_language(c("a.b + a.c + t.b"))
    assert set(L.words(3)) == {("a", "b"), ("a", "c"), ("b",)}
    assert L.is_finite()
    assert not trace_language(c("a*")).is_finite()


def test_trace_witness(c):
    P, Q = c("a.(b.a)*"), c("a + a.b.a")
    assert trace_witness(P, Q) == ("a", "b", "a", "b", "a")
    assert trace_witness(Q, P) is None
    assert trace_leq(Q, P) and not trace_equiv(P, Q)


def test_may_witness_depth(c):
    P, Q = c("a.(b.a)*"), c("a + a.b.a")
    # depth two tests reach four letters, depth three eight
    assert may_witness(P, Q, 2) is None
    assert to_text(may_witness(P, Q, 3)) == "a.(b.a.(b.a))"
    assert to_text(may_witness(c("a + b"), c("a"), 3)) == "b"
    with pytest.raises(ValueError):
        may_witness(P, Q, 0)


def test_count_test_terms():
    assert [count_test_terms(1, d) for d in range(3)] == [3, 21, 903]
    assert [count_test_terms(2, d) for d in range(3)] == [4, 36, 2628]
    A = load_alphabet("external a, b; sync {a, b};")
    assert [sum(1 for _ in obs.test_terms(A.frame, d)) for d in range(3)] == [4, 36, 2628]


AB = load_alphabet("external a, b; internal t; sync {a, b};")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_relational_success_matches_composition(seed):
    rng = random.Random(seed)
    P = random_automaton(rng, AB, max_states=4)
    tests = list(obs.test_terms(AB.frame, 1))
    for t in rng.sample(tests, 8):
        literal = observe(par(P, compile(t, AB))) is not O.ZERO
        assert succeeds(P, t) is literal


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_fast_may_matches_literal(seed):
    rng = random.Random(seed)
    P, Q = random_automaton(rng, AB, max_states=3), random_automaton(rng, AB, max_states=3)
    fast, slow = may_witness(P, Q, 1), may_witness_literal(P, Q, 1)
    assert (fast is None) is (slow is None)
    if fast is not None:
        assert succeeds(P, fast) and not succeeds(Q, fast)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_trace_inclusion_implies_may(seed):
    rng = random.Random(seed)
    P, Q = random_automaton(rng, AB, max_states=4), random_automaton(rng, AB, max_states=4)
    if trace_leq(P, Q):
        assert may_witness(P, Q, 2) is None
