"""Elementary arithmetic shared by the rest of the package.

Prime tables, Moebius and Euler phi, primorials, and primes in arithmetic
progressions.  Everything here is exact integer arithmetic; numpy is only
used as a compact boolean store for sieves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

#: Above this limit :func:`build_prime_table` sieves segment by segment.
SEGMENT_THRESHOLD = 10**7
SEGMENT_SIZE = 2**20

#: Default size of the smallest-prime-factor table behind mobius/totient.
SPF_LIMIT = 2**16

#: primorial() refuses arguments above this; the product would have
#: hundreds of thousands of digits and no caller needs it.
PRIMORIAL_MAX_Y = 10**6


class InvalidResidueError(ValueError):
    """Raised when a residue class is not reduced modulo its modulus."""


def as_rational(x) -> Fraction:
    """Exact rational for ``x``; floats are read as the short decimal they
    were almost certainly typed as (``0.3`` becomes ``3/10``)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**12)


def _check_positive(n: int, name: str = "n") -> None:
    if n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n}")


def _base_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[: min(2, limit + 1)] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return is_prime


def segmented_sieve(lo: int, hi: int, segment: int = SEGMENT_SIZE) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, flags)`` blocks covering ``[lo, hi]``.

    ``flags[k]`` is True iff ``start + k`` is prime.  Peak memory is one
    segment plus the base primes up to sqrt(hi).
    """
    if hi < lo:
        return
    base = np.flatnonzero(_base_sieve(math.isqrt(hi)))
    for start in range(lo, hi + 1, segment):
        stop = min(start + segment - 1, hi)
        flags = np.ones(stop - start + 1, dtype=bool)
        for p in base:
            p = int(p)
            if p * p > stop:
                break
            first = max(p * p, -(-start // p) * p)
            flags[first - start :: p] = False
        # 0 and 1 are not prime
        for k in range(start, min(2, stop + 1)):
            flags[k - start] = False
        yield start, flags


@dataclass(frozen=True)
class PrimeTable:
    """Primality flags for ``0..limit``.

    Build with :func:`build_prime_table`; instances are read-only.
    """

    limit: int
    is_prime: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.is_prime.setflags(write=False)

    def __contains__(self, n: int) -> bool:
        return 0 <= n <= self.limit and bool(self.is_prime[n])

    def primes(self) -> np.ndarray:
        return np.flatnonzero(self.is_prime)


def build_prime_table(limit: int) -> PrimeTable:
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    if limit <= SEGMENT_THRESHOLD:
        flags = _base_sieve(limit)
    else:
        flags = np.empty(limit + 1, dtype=bool)
        for start, block in segmented_sieve(0, limit):
            flags[start : start + len(block)] = block
    return PrimeTable(limit, flags)


def _spf_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            spf[p] = p
            block = spf[p * p :: p]
            block[block == 0] = p
    return spf


@lru_cache(maxsize=4)
def _cached_spf(limit: int) -> np.ndarray:
    spf = _spf_table(limit)
    spf.setflags(write=False)
    return spf


def factorize(n: int, spf_limit: int = SPF_LIMIT) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{p: exponent}``."""
    _check_positive(n)
    out: dict[int, int] = {}
    if n <= spf_limit:
        spf = _cached_spf(spf_limit)
        while n > 1:
            p = int(spf[n])
            while n % p == 0:
                n //= p
                out[p] = out.get(p, 0) + 1
        return out
    p = 2
    while p * p <= n:
        while n % p == 0:
            n //= p
            out[p] = out.get(p, 0) + 1
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    _check_positive(n)
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def totient(n: int) -> int:
    _check_positive(n)
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def is_squarefree(n: int) -> bool:
    return mobius(n) != 0


def smallest_prime_factor(n: int) -> int:
    """Least prime dividing ``n >= 2``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return min(factorize(n))


def primes_upto(y: float) -> list[int]:
    """All primes ``p <= y`` (``y`` may be any real or Fraction)."""
    m = math.floor(y)
    if m < 2:
        return []
    return [int(p) for p in np.flatnonzero(_base_sieve(m))]


def primes_below(z: float) -> list[int]:
    """All primes ``p < z``."""
    return [p for p in primes_upto(z) if p < z]


def primorial(y: float | Fraction, max_y: float = PRIMORIAL_MAX_Y) -> int:
    """Product of all primes up to ``y``; 1 when there are none.

    Raises:
        OverflowError: if ``y`` exceeds ``max_y``.
    """
    if y < 1:
        raise ValueError("primorial needs y >= 1")
    if y > max_y:
        raise OverflowError(f"primorial({y}) exceeds the configured limit {max_y}")
    return math.prod(primes_upto(y))


def _check_residue(W: int, b: int) -> None:
    _check_positive(W, "W")
    if not 1 <= b <= W:
        raise InvalidResidueError(f"need 1 <= b <= W, got b={b}, W={W}")
    if W > 1 and math.gcd(b, W) != 1:
        raise InvalidResidueError(f"b={b} is not a reduced residue modulo W={W}")


def ap_prime_flags(W: int, b: int, N: int) -> np.ndarray:
    """Boolean array ``flags`` of length ``N + 1`` with ``flags[n]`` True iff
    ``W*n + b`` is prime (index 0 unused, always False).

    Sieves the progression directly: for each base prime ``p`` not dividing
    ``W`` the multiples of ``p`` among ``W*n + b`` form one residue class of
    ``n`` modulo ``p``.  Memory is O(N) regardless of ``W*N``.
    """
    _check_residue(W, b)
    _check_positive(N, "N")
    top = W * N + b
    flags = np.ones(N + 1, dtype=bool)
    flags[0] = False
    for p in primes_upto(math.isqrt(top)):
        if W % p == 0:
            continue
        n0 = (-b * pow(W, -1, p)) % p
        if n0 == 0:
            n0 = p
        # W*n + b == p itself is prime and must survive
        if W * n0 + b == p:
            n0 += p
        flags[n0::p] = False
    return flags


def primes_in_ap(W: int, b: int, N: int) -> set[int]:
    """``{n in [1, N] : W*n + b is prime}``."""
    return {int(n) for n in np.flatnonzero(ap_prime_flags(W, b, N))}
