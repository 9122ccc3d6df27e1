import random
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from wcka.lp import feasible


def test_simple():
    assert feasible([[1, 1]], [1]) is not None
    assert feasible([[1, 1]], [-1]) is None
    assert feasible([[1, -1]], [-1]) == [Fraction(0), Fraction(1)]
    assert feasible([], []) == []


def test_exact_fractions():
    x = feasible([[3, 0], [0, 7]], [1, 2])
    assert x == [Fraction(1, 3), Fraction(2, 7)]


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_agrees_with_scipy(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 4), rng.randint(1, 6)
    A = [[rng.randint(-2, 3) for _ in range(n)] for _ in range(m)]
    b = [rng.randint(-2, 4) for _ in range(m)]
    ours = feasible(A, b)
    ref = linprog(np.zeros(n), A_eq=np.array(A, float), b_eq=np.array(b, float), bounds=[(0, None)] * n,
                  method="highs")
    assert (ours is not None) is (ref.status == 0)
    if ours is not None:
        assert all(v >= 0 for v in ours)
        assert all(sum(a * v for a, v in zip(row, ours)) == bi for row, bi in zip(A, b))
