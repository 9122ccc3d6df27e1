from fractions import Fraction

import pytest

from wcka.automata import AlphabetError
from wcka.probability import (
    TAU,
    Distribution,
    PAutomatonError,
    ProbAutomaton,
    epsilon,
    greatest_p_simulation,
    greatest_prob_simulation,
    image_relation,
    is_p_automaton,
    is_prob_simulation,
    lift_check,
    lift_witness,
    mix,
    p_leq,
    p_violations,
    prob_leq,
    weak_successors,
)
from wcka.simulation import leq
from wcka.terms import compile, load_alphabet, parse

half = Fraction(1, 2)


def test_distribution_normalises():
    d = Distribution(((2, Fraction(1, 4)), (1, half), (2, Fraction(1, 4))))
    assert d.weights == ((1, half), (2, half))
    assert d[3] == 0 and d.support == {1, 2}
    assert Distribution.point(4).is_point()
    assert Distribution.of({0: "1/3", 1: "2/3"})[1] == Fraction(2, 3)
    with pytest.raises(ValueError):
        Distribution(((0, half),))
    with pytest.raises(ValueError):
        Distribution(((0, Fraction(3, 2)), (1, -half)))


def test_mix():
    d = mix([(half, Distribution.point(0)), (half, Distribution.of({0: half, 1: half}))])
    assert d == Distribution.of({0: Fraction(3, 4), 1: Fraction(1, 4)})


def test_p_violations(c):
    assert p_violations(c("flip.(h.a + g.b)")) == []
    assert p_violations(c("flip.(h + g) + a")) == []
    assert p_violations(c("h.a")) == ["guard h at state 0 does not directly follow flip"]
    assert p_violations(c("flip.h")) == ["state 1 after flip has moves ['h'], expected one per guard ['h', 'g']"]
    assert not is_p_automaton(c("flip"))


def test_epsilon_collapses_flips(c):
    E = epsilon(c("flip.(h.a + g.b)"))
    assert E.initial == Distribution.point(0)
    ((s, a, d),) = [t for t in E.transitions if t[0] == 0]
    assert a == TAU and d.weights == ((2, half), (3, half))
    assert len(E.transitions) == 3 and len(E.states) == 5
    assert E.internal == {"t", TAU}
    with pytest.raises(PAutomatonError):
        epsilon(c("flip.h"))


def test_epsilon_rejects_reserved_name():
    A = load_alphabet("external a; internal tau;")
    with pytest.raises(AlphabetError):
        epsilon(compile(parse("a", A), A))


@pytest.mark.parametrize(
    "left, right, lq, plq, prob",
    [
        # guards are internal to leq, so the branch taken is invisible to it
        ("flip.(h.a + g.a)", "flip.(h.a + g.b)", True, False, False),
        ("flip.(h.a + g.b)", "flip.(h.a + g.a)", False, False, False),
        ("flip.(h.a + g.a)", "flip.(h.a + g.b) + flip.(h.b + g.a)", True, False, False),
        ("flip.(h.a + g.b) + flip.(h.b + g.a)", "flip.(h.(a + b) + g.(a + b))", True, True, True),
        ("flip.(h.(a + b) + g.(a + b))", "flip.(h.a + g.b) + flip.(h.b + g.a)", False, False, False),
        ("a", "flip.(h.a + g.b)", False, False, False),
        ("t", "1", True, True, True),
        ("1", "t", False, False, False),
    ],
)
def test_three_orders(c, left, right, lq, plq, prob):
    P, Q = c(left), c(right)
    assert leq(P, Q) is lq
    assert p_leq(P, Q) is plq
    assert prob_leq(epsilon(P), epsilon(Q)) is prob


def test_p_simulation_refines_simulation(c):
    P, Q = c("flip.(h.a + g.a)"), c("flip.(h.a + g.b)")
    assert greatest_p_simulation(P, Q) is None
    assert p_leq(P, P)


def test_lift():
    S = {0: [Distribution.point(10), Distribution.point(11)], 1: [Distribution.point(11)]}
    phi = Distribution.of({0: half, 1: half})
    assert lift_check(S, phi, Distribution.of({10: half, 11: half}))
    assert lift_check(S, phi, Distribution.point(11))
    assert not lift_check(S, phi, Distribution.point(10))
    w = lift_witness(S, phi, Distribution.of({10: Fraction(1, 4), 11: Fraction(3, 4)}))
    assert w == {(0, Distribution.point(10)): Fraction(1, 4), (0, Distribution.point(11)): Fraction(1, 4),
                 (1, Distribution.point(11)): half}
    assert not lift_check({}, phi, phi)


def _line(*labels, final=True):
    n = len(labels)
    trans = {(i, a, Distribution.point(i + 1)) for i, a in enumerate(labels)}
    return ProbAutomaton(frozenset(range(n + 1)), frozenset(trans), Distribution.point(0),
                         frozenset({n}) if final else frozenset(), frozenset({TAU, "t"}))


def test_weak_successors_allow_zero_internal_steps():
    Q = _line("a")
    # an internal move on the left may be answered by standing still
    assert weak_successors(Q, Distribution.point(0), "t", 2) == {Distribution.point(0)}
    assert weak_successors(Q, Distribution.point(0), "a", 2) == {Distribution.point(1)}
    assert prob_leq(_line("t", "a"), Q)


def test_weak_bound_limits_internal_prefix():
    P, Q = _line("a"), _line("t", "t", "t", "a")
    assert not prob_leq(P, Q, weak_bound=2)
    assert prob_leq(P, Q, weak_bound=3)
    with pytest.raises(ValueError):
        prob_leq(P, Q, weak_bound=0)


def test_image_of_p_simulation_is_a_probabilistic_simulation(c):
    P, Q = c("flip.(h.a + g.b) + flip.(h.b + g.a)"), c("flip.(h.(a + b) + g.(a + b))")
    sim = greatest_p_simulation(P, Q)
    EP, EQ = epsilon(P), epsilon(Q)
    S = image_relation(sim, EP, EQ)
    assert is_prob_simulation(EP, EQ, S)
    assert greatest_prob_simulation(EP, EQ).holds


def test_vm_permuted_guard_pair():
    A = load_alphabet("external coin, tea, coffee; prob flip: 1/2 th, 1/2 tt; sync {coin, tea, coffee};")

    def c(text):
        return compile(parse(text, A), A)

    vm = c("(coin.(tea + 1)) || (coin.flip.(th.(tea + 1) + tt.(coffee + 1)))")
    both = c("coin.flip.(th.(tea + 1) + tt.(tea + 1))")
    assert leq(both, vm) and not p_leq(both, vm)
