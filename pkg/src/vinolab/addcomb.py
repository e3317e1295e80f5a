"""Representation counts, popular sums and the sumset inequalities around
them: Green-Ruzsa in cyclic groups, Freiman's 3k-3 bound, and the popular
sum version of the latter for regular sets.

Sweeps draw instances from ``numpy.random.default_rng(seed)`` (PCG64), so a
given seed reproduces the same instances on every platform.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np
from scipy import signal

from .arithcore import as_rational, primes_upto, smallest_prime_factor

#: Universes larger than this use FFT convolution; smaller ones count directly.
FFT_THRESHOLD = 4096


class UniverseMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class IntegerSet:
    """A finite set of integers living in ``[1, N]``, in ``Z/modulus``, or
    (both left as None) in ``Z`` itself."""

    elements: tuple[int, ...]
    N: int | None = None
    modulus: int | None = None

    def __post_init__(self):
        if self.N is not None and self.modulus is not None:
            raise ValueError("a set lives in an interval or a cyclic group, not both")
        elems = sorted(set(int(x) for x in self.elements))
        if self.modulus is not None:
            if self.modulus < 1:
                raise ValueError("modulus must be positive")
            elems = sorted(set(x % self.modulus for x in elems))
        if self.N is not None and elems and (elems[0] < 1 or elems[-1] > self.N):
            raise ValueError(f"elements must lie in [1, {self.N}]")
        object.__setattr__(self, "elements", tuple(elems))

    @classmethod
    def interval(cls, N: int, elements: Iterable[int]) -> "IntegerSet":
        return cls(tuple(elements), N=N)

    @classmethod
    def cyclic(cls, modulus: int, elements: Iterable[int]) -> "IntegerSet":
        return cls(tuple(elements), modulus=modulus)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def is_cyclic(self) -> bool:
        return self.modulus is not None


def integer_convolve(x: np.ndarray, y: np.ndarray, method: str = "auto") -> np.ndarray:
    """Exact linear convolution of two nonnegative integer arrays.

    The FFT path rounds to the nearest integer and refuses results whose
    rounding residual reaches 0.25.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if method == "auto":
        method = "fft" if max(x.size, y.size) > FFT_THRESHOLD else "direct"
    if method == "direct":
        return np.convolve(x, y)
    raw = signal.fftconvolve(x.astype(float), y.astype(float))
    out = np.rint(raw)
    resid = np.max(np.abs(raw - out)) if raw.size else 0.0
    if resid >= 0.25:
        raise ArithmeticError(f"FFT convolution residual {resid} too large for exact rounding")
    return out.astype(np.int64)


def _check_universes(A1: IntegerSet, A2: IntegerSet) -> None:
    if A1.is_cyclic != A2.is_cyclic or A1.modulus != A2.modulus:
        raise UniverseMismatchError(
            f"cannot add sets from different universes (moduli {A1.modulus} and {A2.modulus})"
        )


def rep_counts(A1: IntegerSet, A2: IntegerSet, method: str = "auto") -> dict[int, int]:
    """``r(s) = #{(a1, a2) in A1 x A2 : a1 + a2 = s}`` for every ``s`` with
    ``r(s) > 0`` (addition modulo the modulus in the cyclic case)."""
    _check_universes(A1, A2)
    if not len(A1) or not len(A2):
        return {}
    if A1.is_cyclic:
        d = A1.modulus
        x = np.zeros(d, dtype=np.int64)
        y = np.zeros(d, dtype=np.int64)
        x[list(A1.elements)] = 1
        y[list(A2.elements)] = 1
        if method == "auto":
            method = "fft" if d > FFT_THRESHOLD else "direct"
        lin = integer_convolve(x, y, method)
        folded = lin[:d].copy()
        folded[: lin.size - d] += lin[d:]
        return {s: int(c) for s, c in enumerate(folded) if c}
    lo1, lo2 = A1.elements[0], A2.elements[0]
    x = np.zeros(A1.elements[-1] - lo1 + 1, dtype=np.int64)
    y = np.zeros(A2.elements[-1] - lo2 + 1, dtype=np.int64)
    x[np.asarray(A1.elements) - lo1] = 1
    y[np.asarray(A2.elements) - lo2] = 1
    if method == "auto":
        method = "fft" if max(x.size, y.size) > FFT_THRESHOLD else "direct"
    conv = integer_convolve(x, y, method)
    return {int(k) + lo1 + lo2: int(conv[k]) for k in np.flatnonzero(conv)}


def rep_counts_bruteforce(A1: IntegerSet, A2: IntegerSet) -> dict[int, int]:
    """Pair-by-pair enumeration; the oracle for :func:`rep_counts`."""
    _check_universes(A1, A2)
    mod = A1.modulus
    counts = Counter((a + b) % mod if mod else a + b for a in A1 for b in A2)
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class PopularSumReport:
    K: float
    rep_counts: dict[int, int] = field(repr=False)
    D_K: frozenset[int] = field(repr=False)
    bound_rhs: float | None = None
    holds: bool | None = None

    @property
    def size(self) -> int:
        return len(self.D_K)


def popular_sums(A1: IntegerSet, A2: IntegerSet, K: float) -> PopularSumReport:
    """``D_K(A1, A2) = {s : r(s) >= K}``."""
    if not K > 0:
        raise ValueError("K must be positive")
    r = rep_counts(A1, A2)
    return PopularSumReport(K, r, frozenset(s for s, c in r.items() if c >= K))


def _rough_flags(limit: int, y) -> np.ndarray:
    """``flags[k]`` True iff ``gcd(k, P(y)) = 1``, for ``0 <= k <= limit``."""
    flags = np.ones(limit + 1, dtype=bool)
    primes = primes_upto(y) if y >= 1 else []
    for p in primes:
        flags[0::p] = False
    if primes:
        flags[0] = False  # gcd(0, Y) = Y > 1
    return flags


def _regular_windows(N: int, beta) -> tuple[int, int, Fraction]:
    b = as_rational(beta)
    u_max = math.floor(b * N)
    v_min = max(1, math.ceil((1 - b) * N))
    return u_max, v_min, b


def weighted_regularity(values: np.ndarray, N: int, beta) -> float:
    """``sum f(u) f(v)`` over ``u <= beta N``, ``v >= (1 - beta) N`` with
    ``gcd(v - u, P(1/beta)) = 1``; ``values[n - 1] = f(n)``.

    Integer-valued inputs give an exact integer count.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    values = np.asarray(values)
    if values.shape != (N,):
        raise ValueError("values must have length N")
    u_max, v_min, b = _regular_windows(N, beta)
    if u_max < 1 or v_min > N:
        return 0
    fu = values[:u_max]
    fv = values[v_min - 1 :]
    # cross[k] = sum_{v - u = k + offset} f(u) f(v), offset = v_min - u_max
    if np.issubdtype(values.dtype, np.integer) or values.dtype == bool:
        cross = np.convolve(fv.astype(np.int64), fu[::-1].astype(np.int64))
    else:
        cross = signal.convolve(fv, fu[::-1])
    diffs = np.abs(np.arange(cross.size) + (v_min - u_max))
    rough = _rough_flags(int(diffs.max()), 1 / b)
    total = cross[rough[diffs]].sum()
    return int(total) if np.issubdtype(cross.dtype, np.integer) else float(total)


def regularity_count(A: IntegerSet, beta) -> int:
    """Number of pairs witnessing ``(beta, kappa)``-regularity of ``A``;
    ``A`` is regular iff this is at least ``kappa N^2``."""
    if A.N is None:
        raise ValueError("regularity is defined for subsets of an interval [1, N]")
    ind = np.zeros(A.N, dtype=np.int64)
    ind[np.asarray(A.elements, dtype=np.int64) - 1] = 1
    return weighted_regularity(ind, A.N, beta)


@dataclass(frozen=True)
class CheckRecord:
    """One verified inequality ``lhs >= rhs``; ``holds`` is None when the
    hypotheses were not met and the check was skipped."""

    check: str
    lhs: float
    rhs: float
    holds: bool | None
    params: dict = field(default_factory=dict)
    instance_seed: int | None = None

    @property
    def skipped(self) -> bool:
        return self.holds is None

    def to_dict(self) -> dict:
        return {"check": self.check, "instance_seed": self.instance_seed, "params": self.params,
                "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def largest_proper_subgroup(order: int) -> int:
    """Size of the largest proper subgroup of ``Z/order``; 0 for the trivial group."""
    if order < 1:
        raise ValueError("order must be positive")
    if order == 1:
        return 0
    return order // smallest_prime_factor(order)


def _as_cyclic(order: int, A) -> IntegerSet:
    if isinstance(A, IntegerSet):
        if A.modulus != order:
            raise UniverseMismatchError(f"set lives in Z/{A.modulus}, expected Z/{order}")
        return A
    return IntegerSet.cyclic(order, A)


def green_ruzsa_check(G_order: int, A1, A2, K: float) -> CheckRecord:
    """``|D_K(A1, A2)| >= min(|G|, |A1| + |A2| - D) - 3 sqrt(K |G|)`` in
    ``G = Z/G_order``, with ``D`` the largest proper subgroup size."""
    A1 = _as_cyclic(G_order, A1)
    A2 = _as_cyclic(G_order, A2)
    D = largest_proper_subgroup(G_order)
    r = rep_counts_bruteforce(A1, A2)
    lhs = sum(1 for c in r.values() if c >= K)
    rhs = min(G_order, len(A1) + len(A2) - D) - 3 * math.sqrt(K * G_order)
    params = {"G_order": G_order, "K": K, "A1": list(A1), "A2": list(A2), "D": D}
    if min(len(A1), len(A2)) ** 2 < K * G_order:
        return CheckRecord("green_ruzsa", lhs, rhs, None, params)
    return CheckRecord("green_ruzsa", lhs, rhs, lhs >= rhs, params)


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def diameter(A: Iterable[int]) -> int:
    """Smallest ``d`` such that ``A`` lies in an arithmetic progression
    ``{x, x + s, ..., x + d s}``; i.e. the progression has ``d + 1`` terms.

    Found by trying every step ``s`` that divides all differences.  A
    singleton has diameter 0.
    """
    elems = sorted(set(A))
    if not elems:
        raise ValueError("diameter of the empty set is undefined")
    span = elems[-1] - elems[0]
    if span == 0:
        return 0
    g = 0
    for x in elems:
        g = math.gcd(g, x - elems[0])
    best = span
    for s in _divisors(g):
        if all((x - elems[0]) % s == 0 for x in elems):
            best = min(best, span // s)
    return best


def freiman_check(A1: Iterable[int], A2: Iterable[int]) -> CheckRecord:
    """``|A1 + A2| >= min(|A1| + d2, 2|A1| + |A2| - 3)`` with ``d1 <= d2``
    (the sets are swapped when needed)."""
    A1 = sorted(set(A1))
    A2 = sorted(set(A2))
    if not A1 or not A2:
        raise ValueError("sets must be nonempty")
    d1, d2 = diameter(A1), diameter(A2)
    if d1 > d2:
        A1, A2, d1, d2 = A2, A1, d2, d1
    lhs = len({a + b for a in A1 for b in A2})
    rhs = min(len(A1) + d2, 2 * len(A1) + len(A2) - 3)
    params = {"A1": A1, "A2": A2, "d1": d1, "d2": d2}
    return CheckRecord("freiman", lhs, rhs, lhs >= rhs, params)


@dataclass(frozen=True)
class PopTheoremRecord:
    gamma: float
    lhs: int
    rhs: float
    holds: bool | None
    hypotheses_met: bool
    regularity: int
    params: dict = field(default_factory=dict)
    instance_seed: int | None = None

    def to_dict(self) -> dict:
        return {"check": "pop_theorem", "instance_seed": self.instance_seed,
                "params": {**self.params, "gamma": self.gamma, "regularity": self.regularity,
                           "hypotheses_met": self.hypotheses_met},
                "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


#: Relative margin keeping gamma strictly below its threshold.
GAMMA_MARGIN = 1e-9


def pop_theorem_check(A1: IntegerSet, A2: IntegerSet, beta: float, kappa: float) -> PopTheoremRecord:
    """Popular-sum lower bound for a ``(beta, kappa)``-regular ``A1``:
    ``|D_{gamma N}(A1, A2)| >= min(N, |A1| + |A2|) + |A2| - 9 beta N``."""
    if not 0 < beta < Fraction(1, 6):
        raise ValueError("beta < 1/6 required")
    if A1.N is None or A1.N != A2.N:
        raise UniverseMismatchError("both sets must live in the same interval [1, N]")
    N = A1.N
    gamma = min(kappa**2 / (16 * beta**2), beta**2 / 16) * (1 - GAMMA_MARGIN)
    reg = regularity_count(A1, beta)
    met = (kappa > 0 and len(A1) >= 4 * beta * N and len(A2) >= 4 * beta * N
           and reg >= kappa * N * N)
    r = rep_counts(A1, A2)
    K = gamma * N
    lhs = sum(1 for c in r.values() if c >= K)
    rhs = min(N, len(A1) + len(A2)) + len(A2) - 9 * beta * N
    params = {"N": N, "beta": beta, "kappa": kappa, "size_A1": len(A1), "size_A2": len(A2)}
    return PopTheoremRecord(gamma, lhs, rhs, (lhs >= rhs) if met else None, met, reg, params)


# ---------------------------------------------------------------------------
# seeded sweeps


def _random_subset(rng: np.random.Generator, universe: np.ndarray, density: float) -> list[int]:
    return [int(x) for x in universe[rng.random(universe.size) < density]]


def green_ruzsa_sweep(max_order: int = 24, pairs: int = 500, seed: int = 0,
                      Ks: tuple[float, ...] = (1, 2, 3)) -> Iterator[CheckRecord]:
    for order in range(1, max_order + 1):
        universe = np.arange(order)
        for i in range(pairs):
            inst = seed * 1_000_003 + order * 10_007 + i
            rng = np.random.default_rng(inst)
            A1 = _random_subset(rng, universe, rng.random())
            A2 = _random_subset(rng, universe, rng.random())
            K = Ks[i % len(Ks)]
            rec = green_ruzsa_check(order, A1, A2, K)
            yield CheckRecord(rec.check, rec.lhs, rec.rhs, rec.holds, rec.params, inst)


def freiman_sweep(count: int = 10_000, max_element: int = 50, seed: int = 0) -> Iterator[CheckRecord]:
    universe = np.arange(max_element + 1)
    for i in range(count):
        inst = seed * 1_000_003 + i
        rng = np.random.default_rng(inst)
        sets = []
        for _ in range(2):
            size = int(rng.integers(1, max_element + 2))
            sets.append(sorted(int(x) for x in rng.choice(universe, size=size, replace=False)))
        rec = freiman_check(*sets)
        yield CheckRecord(rec.check, rec.lhs, rec.rhs, rec.holds, rec.params, inst)


def pop_theorem_sweep(N: int = 1000, seeds: Iterable[int] = range(100), density: float = 0.45,
                      beta: float = 0.01) -> Iterator[PopTheoremRecord]:
    """Random ``A1, A2`` of the given density, with ``kappa`` set to the
    regularity actually present in ``A1``."""
    universe = np.arange(1, N + 1)
    for inst in seeds:
        rng = np.random.default_rng(inst)
        A1 = IntegerSet.interval(N, _random_subset(rng, universe, density))
        A2 = IntegerSet.interval(N, _random_subset(rng, universe, density))
        kappa = Fraction(regularity_count(A1, beta), N**2)  # exact, so reg >= kappa N^2 is too
        rec = pop_theorem_check(A1, A2, beta, kappa)
        yield PopTheoremRecord(rec.gamma, rec.lhs, rec.rhs, rec.holds, rec.hypotheses_met,
                               rec.regularity, rec.params, inst)


def all_subsets(order: int) -> Iterator[tuple[int, ...]]:
    """Every subset of ``Z/order``; only sensible for tiny orders."""
    for k in range(order + 1):
        yield from itertools.combinations(range(order), k)
