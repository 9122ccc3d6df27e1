"""Automata model of weak concurrent Kleene algebra."""

from .automata import (
    ActionLabel,
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
    seq,
    star,
    validate,
)
from .probability import Distribution, ProbAutomaton, epsilon, is_p_automaton, p_leq, prob_leq
from .simulation import bounded_tree_language_leq, equiv, greatest_simulation, leq, tau_closure
from .terms import compile, load_alphabet, parse, to_text

FORMAT_VERSION = 1
__version__ = "0.1.0"

__all__ = [
    "ActionLabel",
    "Distribution",
    "ProbAutomaton",
    "epsilon",
    "is_p_automaton",
    "p_leq",
    "prob_leq",
    "Alphabet",
    "AlphabetError",
    "Automaton",
    "FORMAT_VERSION",
    "ProbSpec",
    "StateCapExceeded",
    "bounded_tree_language_leq",
    "compile",
    "equiv",
    "greatest_simulation",
    "leq",
    "load_alphabet",
    "mk_action",
    "mk_one",
    "mk_zero",
    "par",
    "parse",
    "plus",
    "seq",
    "star",
    "tau_closure",
    "to_text",
    "validate",
]
