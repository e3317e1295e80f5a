import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vinolab.addcomb import (
    IntegerSet,
    UniverseMismatchError,
    all_subsets,
    diameter,
    freiman_check,
    freiman_sweep,
    green_ruzsa_check,
    green_ruzsa_sweep,
    integer_convolve,
    largest_proper_subgroup,
    pop_theorem_check,
    pop_theorem_sweep,
    popular_sums,
    regularity_count,
    rep_counts,
    rep_counts_bruteforce,
    weighted_regularity,
)
from vinolab.arithcore import primorial

small_sets = st.lists(st.integers(min_value=-30, max_value=60), min_size=1, max_size=15)


def test_rep_counts_examples():
    A = IntegerSet((1, 2, 3))
    assert rep_counts(A, A) == {2: 1, 3: 2, 4: 3, 5: 2, 6: 1}
    B = IntegerSet.cyclic(4, [0, 1])
    assert rep_counts(B, B) == {0: 1, 1: 2, 2: 1}
    assert rep_counts(IntegerSet((7,)), IntegerSet((1, 4))) == {8: 1, 11: 1}


def test_universe_mismatch():
    with pytest.raises(UniverseMismatchError):
        rep_counts(IntegerSet.cyclic(4, [1]), IntegerSet.cyclic(5, [1]))
    with pytest.raises(UniverseMismatchError):
        rep_counts(IntegerSet.cyclic(4, [1]), IntegerSet((1,)))


@given(small_sets, small_sets, st.sampled_from(["direct", "fft"]))
@settings(max_examples=150, deadline=None)
def test_rep_counts_match_enumeration(a, b, method):
    A, B = IntegerSet(tuple(a)), IntegerSet(tuple(b))
    assert rep_counts(A, B, method) == rep_counts_bruteforce(A, B)


@given(st.integers(min_value=1, max_value=40), st.data())
@settings(max_examples=100, deadline=None)
def test_cyclic_rep_counts_match_enumeration(m, data):
    elems = st.lists(st.integers(min_value=0, max_value=m - 1), max_size=m)
    A = IntegerSet.cyclic(m, data.draw(elems))
    B = IntegerSet.cyclic(m, data.draw(elems))
    assert rep_counts(A, B) == rep_counts_bruteforce(A, B)


def test_integer_convolve_large_is_exact():
    rng = np.random.default_rng(5)
    x = rng.integers(0, 3, size=20_000)
    y = rng.integers(0, 3, size=15_000)
    assert np.array_equal(integer_convolve(x, y, "fft"), np.convolve(x, y))


def test_popular_sums_examples():
    A = IntegerSet((1, 2, 3))
    rep = popular_sums(A, A, 2)
    assert rep.D_K == {3, 4, 5} and rep.size == 3
    assert popular_sums(A, A, 1).D_K == {a + b for a in A for b in A}
    assert popular_sums(A, A, 4).size == 0


def _regularity_oracle(A, N, beta):
    Y = primorial(1 / Fraction(beta).limit_denominator(10**12))
    return sum(1 for u in A if u <= beta * N for v in A if v >= (1 - beta) * N and math.gcd(v - u, Y) == 1)


def test_regularity_examples():
    assert regularity_count(IntegerSet.interval(10, range(1, 11)), 0.3) == 5
    assert regularity_count(IntegerSet.interval(10, []), 0.3) == 0
    assert regularity_count(IntegerSet.interval(50, range(1, 51)), 0.01) == 0


@given(st.integers(min_value=5, max_value=300), st.sampled_from([0.05, 0.1, 0.15, 0.3]), st.integers(0, 2**32))
@settings(max_examples=80, deadline=None)
def test_regularity_matches_pair_enumeration(N, beta, seed):
    rng = np.random.default_rng(seed)
    A = sorted(set(rng.integers(1, N + 1, size=N // 2).tolist()))
    assert regularity_count(IntegerSet.interval(N, A), beta) == _regularity_oracle(A, N, beta)


def test_weighted_regularity_reduces_to_count():
    N = 200
    A = list(range(1, N + 1, 3))
    ind = np.zeros(N)
    ind[np.array(A) - 1] = 1.0
    w = weighted_regularity(ind * 2.5, N, 0.1)
    assert w == pytest.approx(6.25 * regularity_count(IntegerSet.interval(N, A), 0.1))


@pytest.mark.parametrize("order,expected", [(1, 0), (12, 6), (13, 1), (25, 5), (24, 12)])
def test_largest_proper_subgroup(order, expected):
    assert largest_proper_subgroup(order) == expected


def test_green_ruzsa_examples():
    r = green_ruzsa_check(5, range(5), range(5), 5)
    assert r.lhs == 5 and r.rhs == pytest.approx(-10) and r.holds
    r = green_ruzsa_check(4, [0, 1], [0, 1], 1)
    assert r.lhs == 3 and r.rhs == pytest.approx(-4) and r.holds
    r = green_ruzsa_check(10, [0], [0], 2)
    assert r.skipped


@pytest.mark.parametrize("order", range(1, 7))
def test_green_ruzsa_exhaustive_small_groups(order):
    subsets = list(all_subsets(order))
    for A1, A2 in itertools.product(subsets, repeat=2):
        for K in (1, 2, 3):
            assert green_ruzsa_check(order, A1, A2, K).holds is not False


def test_green_ruzsa_sweep_smoke():
    recs = list(green_ruzsa_sweep(max_order=8, pairs=20, seed=3))
    assert len(recs) == 160 and not any(r.holds is False for r in recs)
    assert recs == list(green_ruzsa_sweep(max_order=8, pairs=20, seed=3))


def _diameter_oracle(A):
    A = sorted(set(A))
    best = None
    for s in range(1, max(A[-1] - A[0], 1) + 1):
        if all((x - A[0]) % s == 0 for x in A):
            d = (A[-1] - A[0]) // s
            best = d if best is None else min(best, d)
    return best


@given(small_sets)
@settings(max_examples=200, deadline=None)
def test_diameter_matches_brute_force(A):
    assert diameter(A) == _diameter_oracle(A)


def test_diameter_examples():
    assert diameter([5]) == 0
    assert diameter([0, 7]) == 1
    assert diameter([0, 2, 4, 10]) == 5
    with pytest.raises(ValueError):
        diameter([])


def test_freiman_examples():
    r = freiman_check([0, 1, 5], [0, 1, 5])
    assert (r.lhs, r.rhs, r.holds) == (6, 6, True)
    r = freiman_check([0], [0, 7])
    assert (r.lhs, r.rhs, r.holds) == (2, 1, True)


@pytest.mark.parametrize("k", range(1, 12))
def test_freiman_intervals_tight(k):
    r = freiman_check(range(k), range(k))
    assert r.holds
    if k >= 2:
        assert r.lhs == r.rhs == 2 * k - 1


def test_freiman_sweep_smoke():
    assert all(r.holds for r in freiman_sweep(count=500, seed=9))


def test_pop_theorem_interval():
    N = 1000
    A = IntegerSet.interval(N, range(1, N + 1))
    kappa = Fraction(regularity_count(A, 0.1), N * N)
    r = pop_theorem_check(A, A, 0.1, kappa)
    assert r.hypotheses_met and r.holds
    assert r.lhs == 1999 and r.rhs == pytest.approx(1100)


def test_pop_theorem_gates():
    N = 100
    small = IntegerSet.interval(N, [1, 2])
    full = IntegerSet.interval(N, range(1, N + 1))
    r = pop_theorem_check(small, full, 0.1, 0.001)
    assert not r.hypotheses_met and r.holds is None
    with pytest.raises(ValueError, match="beta < 1/6 required"):
        pop_theorem_check(full, full, 0.2, 0.1)
    with pytest.raises(UniverseMismatchError):
        pop_theorem_check(full, IntegerSet.interval(50, [1]), 0.1, 0.1)


def test_pop_theorem_sweep_deterministic():
    a = [r.to_dict() for r in pop_theorem_sweep(N=300, seeds=range(5), beta=0.05)]
    b = [r.to_dict() for r in pop_theorem_sweep(N=300, seeds=range(5), beta=0.05)]
    assert a == b and all(r["holds"] for r in a)
