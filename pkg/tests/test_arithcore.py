import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from vinolab.arithcore import (
    InvalidResidueError,
    ap_prime_flags,
    as_rational,
    build_prime_table,
    factorize,
    is_squarefree,
    mobius,
    primes_below,
    primes_in_ap,
    primes_upto,
    primorial,
    segmented_sieve,
    smallest_prime_factor,
    totient,
)


def test_prime_table_small():
    t = build_prime_table(30)
    assert list(t.primes()) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert 29 in t and 30 not in t and -1 not in t and 31 not in t
    with pytest.raises(ValueError):
        t.is_prime[3] = False


@pytest.mark.parametrize("limit", [0, 1, 2, 3, 100, 10_007])
def test_prime_table_matches_sympy(limit):
    t = build_prime_table(limit)
    assert list(t.primes()) == list(sympy.primerange(0, limit + 1))


def test_segmented_sieve_matches_base():
    lo, hi = 999_000, 1_003_001
    got = []
    for start, block in segmented_sieve(lo, hi, segment=1 << 10):
        got.extend(int(start + i) for i in np.flatnonzero(block))
    assert got == list(sympy.primerange(lo, hi + 1))


def test_primes_upto_vs_below():
    assert primes_upto(7) == [2, 3, 5, 7]
    assert primes_below(7) == [2, 3, 5]
    assert primes_upto(Fraction(15, 2)) == [2, 3, 5, 7]
    assert primes_upto(1.99) == []


@given(st.integers(min_value=1, max_value=10**9))
@settings(max_examples=300, deadline=None)
def test_factorize_matches_sympy(n):
    assert factorize(n) == sympy.factorint(n)


@given(st.integers(min_value=1, max_value=10**6))
@settings(max_examples=300, deadline=None)
def test_multiplicative_functions(n):
    assert mobius(n) == sympy.mobius(n)
    assert totient(n) == sympy.totient(n)
    assert is_squarefree(n) == (mobius(n) != 0)
    if n > 1:
        assert smallest_prime_factor(n) == min(sympy.factorint(n))


@pytest.mark.parametrize("bad", [0, -3])
def test_factorize_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        factorize(bad)


@pytest.mark.parametrize("y,expected", [(1, 1), (2, 2), (3, 6), (5, 30), (7, 210), (7.5, 210)])
def test_primorial(y, expected):
    assert primorial(y) == expected


def test_primorial_cap():
    with pytest.raises(OverflowError):
        primorial(10**7)


def test_as_rational():
    assert as_rational(0.1) == Fraction(1, 10)
    assert as_rational(Fraction(2, 7)) == Fraction(2, 7)
    assert as_rational(3) == 3


@pytest.mark.parametrize(
    "W,b,N,expected",
    [
        (2, 1, 9, {1, 2, 3, 5, 6, 8, 9}),
        (1, 1, 4, {1, 2, 4}),
        (6, 1, 6, {1, 2, 3, 5, 6}),
    ],
)
def test_primes_in_ap_examples(W, b, N, expected):
    assert primes_in_ap(W, b, N) == expected


@pytest.mark.parametrize("W,b", [(6, 2), (6, 7), (2, 0), (30, 15)])
def test_invalid_residue(W, b):
    with pytest.raises(InvalidResidueError):
        ap_prime_flags(W, b, 10)


@given(st.sampled_from([1, 2, 6, 30, 210]), st.data(), st.integers(min_value=1, max_value=3000))
@settings(max_examples=60, deadline=None)
def test_ap_flags_match_direct_primality(W, data, N):
    residues = [b for b in range(1, W + 1) if math.gcd(b, W) == 1]
    b = data.draw(st.sampled_from(residues))
    flags = ap_prime_flags(W, b, N)
    assert not flags[0]
    expected = [sympy.isprime(W * n + b) for n in range(1, N + 1)]
    assert flags[1:].tolist() == expected


def test_ap_keeps_small_prime_itself():
    # W n + b = 7 at n = 1 must survive although 7 sieves the class
    assert 1 in primes_in_ap(6, 1, 1)
    assert 1 in primes_in_ap(2, 1, 1)
