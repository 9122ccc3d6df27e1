import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcka.automata import AlphabetError, Automaton, mk_action
from wcka.generate import random_automaton
from wcka.simulation import (
    Tree,
    bounded_tree_language_leq,
    equiv,
    greatest_simulation,
    is_simulation,
    leq,
    longest_path,
    tau_closure,
    tree_simulated,
    unfold,
)
from wcka.terms import load_alphabet


def test_internal_prefix_asymmetry(c):
    # frozen from the tree oracle below
    assert not leq(c("a"), c("t.a"))
    assert leq(c("t.a"), c("a"))


def test_asymmetry_by_tree_oracle(c):
    assert not tree_simulated(unfold(c("a"), 2), c("t.a"))
    assert tree_simulated(unfold(c("t.a"), 2), c("a"))


@pytest.mark.parametrize(
    "left, right, expected",
    [
        ("a", "a + b", True),
        ("a + b", "a", False),
        ("a.b + a.c", "a.(b + c)", True),
        ("a.(b + c)", "a.b + a.c", False),
        ("0", "a", True),
        ("1", "a", False),
        ("a", "a*", True),
        ("a.a", "a*", True),
        ("a*", "1 + a.a*", True),
        ("t", "1", True),
        ("1", "t", False),
        ("t.t.a", "t.a", True),
    ],
)
def test_leq_examples(c, left, right, expected):
    assert leq(c(left), c(right)) is expected


def test_root_is_special(c):
    # after the initial state a final copy is allowed, at the root it is not
    assert not leq(c("a*"), c("a.a*"))
    assert equiv(c("a.a*"), c("a.a*.a*"))


def test_tau_closure(c):
    P = c("t.t.a")
    C = tau_closure(P)
    assert C[P.initial] == {0, 1, 2}
    assert (0, 2) in C and (2, 0) not in C


def test_witness_relation(c):
    P, Q = c("a.b + a.c"), c("a.(b + c)")
    S = greatest_simulation(P, Q)
    assert S is not None and (P.initial, Q.initial) in S
    assert is_simulation(P, Q, S)
    assert not is_simulation(P, Q, set(S) - {(P.initial, Q.initial)})
    assert greatest_simulation(Q, P) is None


def test_incompatible_alphabets(c):
    other = load_alphabet("external a;")
    with pytest.raises(AlphabetError):
        leq(c("a"), mk_action("a", other))


def test_longest_path(c):
    assert longest_path(c("a.b + c")) == 2
    with pytest.raises(ValueError):
        longest_path(c("a*"))


def test_tree_shapes(c):
    t = unfold(c("a.(b + c)"), 5)
    assert t.depth() == 2 and t.size() == 4
    assert unfold(c("a*"), 3).depth() == 3
    assert Tree(True).depth() == 0


AB = load_alphabet("external a, b; internal t; sync {a, b};")


def _pairs(seed, count, max_states=4):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_automaton(rng, AB, max_states=max_states), random_automaton(rng, AB, max_states=max_states)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_bitset_leq_matches_fixpoint_game(seed):
    (P, Q), = _pairs(seed, 1, 5)
    S = greatest_simulation(P, Q)
    assert leq(P, Q) is (S is not None)
    if S is not None:
        assert is_simulation(P, Q, S)
        assert greatest_simulation(P, Q, seed=seed) == S
        on_the_fly = greatest_simulation(P, Q, on_the_fly=True)
        assert on_the_fly is not None and set(on_the_fly) <= set(S)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_reflexive_and_transitive(seed):
    rng = random.Random(seed)
    P, Q, R = (random_automaton(rng, AB, max_states=4) for _ in range(3))
    assert leq(P, P)
    if leq(P, Q) and leq(Q, R):
        assert leq(P, R)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_tree_oracle_agrees_on_acyclic(seed):
    rng = random.Random(seed)
    while True:
        P = random_automaton(rng, AB, max_states=4, density=0.0)
        if P.is_acyclic():
            break
    Q = random_automaton(rng, AB, max_states=4)
    depth = max(1, longest_path(P))
    assert bounded_tree_language_leq(P, Q, depth) is leq(P, Q)


def test_tree_oracle_is_necessary_on_cycles():
    for P, Q in _pairs(3, 300):
        if leq(P, Q):
            assert bounded_tree_language_leq(P, Q, 4)


def test_automaton_equality_is_structural():
    P = Automaton(frozenset({0, 1}), frozenset({(0, "a", 1)}), 0, frozenset({1}), AB)
    assert P == mk_action("a", AB)
