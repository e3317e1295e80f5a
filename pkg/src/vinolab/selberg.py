"""Selberg sieve weights and the majorant they define.

The weights are built in closed form,

    rho_d = mu(d) * d/phi(d) * J^-1 * sum_{e < z/d, e | P, (e, d) = 1} 1/phi(e),

which is what Moebius inversion of the dual system gives when every dual
variable y_d equals 1/J.  :func:`y_from_weights` recomputes y_d straight from
its definition and is the round-trip check on this formula.

All weight arithmetic is exact (``fractions.Fraction`` or scaled Python
integers).  The only floating point quantity is ``log z`` inside
:attr:`MajorantTable.scalar`.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Real

import numpy as np

from .arithcore import _check_residue, factorize, mobius, primes_below, totient
from .reports import fraction_to_str, str_to_fraction

#: Default cap on the number of support elements build_weights will enumerate.
SUPPORT_BUDGET = 200_000


class ResourceBudgetError(RuntimeError):
    """The requested sieve would exceed the configured enumeration budget."""


def _check_squarefree_modulus(W: int) -> None:
    if W < 1 or mobius(W) == 0:
        raise ValueError(f"W must be a squarefree positive integer, got {W}")


@dataclass(frozen=True)
class SieveParams:
    """Sequence length ``N``, sieving parameter ``z`` (level z**2), wheel
    modulus ``W`` and residue ``b`` of the progression ``W*n + b``."""

    N: int
    z: Real
    W: int
    b: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not self.z > 1:
            raise ValueError("z must exceed 1")
        _check_squarefree_modulus(self.W)
        _check_residue(self.W, self.b)


@dataclass(frozen=True)
class _SupportElement:
    d: int
    mu: int
    phi: int


def _enumerate_support(z: Real, primes: list[int], budget: int) -> list[_SupportElement]:
    # depth-first over squarefree products of `primes`, pruning at >= z
    out = [_SupportElement(1, 1, 1)]

    def walk(start: int, d: int, mu: int, phi: int) -> None:
        for i in range(start, len(primes)):
            p = primes[i]
            nd = d * p
            if not nd < z:
                break
            out.append(_SupportElement(nd, -mu, phi * (p - 1)))
            if len(out) > budget:
                raise ResourceBudgetError(
                    f"support for z={z} exceeds the budget of {budget} elements"
                )
            walk(i + 1, nd, -mu, phi * (p - 1))

    walk(0, 1, 1, 1)
    out.sort(key=lambda s: s.d)
    return out


@dataclass(frozen=True)
class SieveWeights:
    """Exact Selberg weights for sieving level ``z**2`` coprime to ``W``.

    ``support`` maps every ``d | P`` with ``d < z`` to ``rho_d``, where ``P``
    is the product of the primes below ``z`` not dividing ``W``.
    """

    z: Real
    W: int
    support: dict[int, Fraction] = field(repr=False)
    J: Fraction
    primes: tuple[int, ...] = field(repr=False)

    @cached_property
    def P(self) -> int:
        return math.prod(self.primes)

    @cached_property
    def denominator(self) -> int:
        """Least common denominator of all weights."""
        return math.lcm(*(r.denominator for r in self.support.values()))

    @cached_property
    def numerators(self) -> dict[int, int]:
        """``rho_d * denominator`` as exact integers."""
        den = self.denominator
        return {d: r.numerator * (den // r.denominator) for d, r in self.support.items()}

    def divides_P(self, q: int) -> bool:
        return q >= 1 and self.P % q == 0


def build_weights(z: Real, W: int, budget: int = SUPPORT_BUDGET) -> SieveWeights:
    """Selberg weights for sieving parameter ``z`` and wheel modulus ``W``.

    Raises:
        ResourceBudgetError: if the support would exceed ``budget`` elements.
    """
    if not z > 1:
        raise ValueError("z must exceed 1")
    _check_squarefree_modulus(W)
    primes = [p for p in primes_below(z) if W % p]
    sup = _enumerate_support(z, primes, budget)

    # Every 1/phi(e) over the common denominator L keeps the sums integral.
    L = math.lcm(*(s.phi for s in sup))
    inv_phi = [L // s.phi for s in sup]
    j_num = sum(inv_phi)

    weights: dict[int, Fraction] = {}
    for s in sup:
        g_num = 0
        for t, w in zip(sup, inv_phi):
            if not s.d * t.d < z:
                break
            if math.gcd(s.d, t.d) == 1:
                g_num += w
        weights[s.d] = Fraction(s.mu * s.d * g_num, s.phi * j_num)
    return SieveWeights(z=z, W=W, support=weights, J=Fraction(j_num, L), primes=tuple(primes))


def y_from_weights(w: SieveWeights) -> dict[int, Fraction]:
    """Dual variables ``y_d = mu(d) phi(d) sum_{d | m} rho_m / m`` for each
    ``d`` in the support, computed from the definition."""
    out = {}
    for d in w.support:
        acc = sum((rho / m for m, rho in w.support.items() if m % d == 0), Fraction(0))
        out[d] = mobius(d) * totient(d) * acc
    return out


def _check_divisor(w: SieveWeights, q: int, name: str) -> None:
    if not w.divides_P(q):
        raise ValueError(f"{name}={q} does not divide P={w.P}")


def J_qr(w: SieveWeights, q: int, r: int) -> Fraction:
    """``J(q, r) = sum_{d | P, (d, q) = 1} rho_{rd} / d`` by direct summation."""
    _check_divisor(w, q, "q")
    _check_divisor(w, r, "r")
    total = Fraction(0)
    for m, rho in w.support.items():
        if m % r:
            continue
        d = m // r
        if math.gcd(d, q) == 1:
            total += rho / d
    return total


def T_q(w: SieveWeights, q: int) -> Fraction:
    """``T(q) = sum over d1, d2 | P with q | [d1, d2] of rho_d1 rho_d2 / [d1, d2]``."""
    _check_divisor(w, q, "q")
    nums = w.numerators
    by_lcm: dict[int, int] = defaultdict(int)
    items = list(nums.items())
    for d1, r1 in items:
        for d2, r2 in items:
            l = d1 * d2 // math.gcd(d1, d2)
            if l % q == 0:
                by_lcm[l] += r1 * r2
    total = sum((Fraction(v, l) for l, v in by_lcm.items()), Fraction(0))
    return total / w.denominator**2


def phi_harmonic_sum(z: Real, m: int) -> Fraction:
    """``sum 1/phi(d)`` over squarefree ``d < z`` coprime to ``m``."""
    if m < 1:
        raise ValueError("m must be positive")
    if z < 1:
        raise ValueError("z must be at least 1")
    excluded = set(factorize(m))
    primes = [p for p in primes_below(z) if p not in excluded]
    sup = _enumerate_support(z, primes, budget=10**7)
    L = math.lcm(*(s.phi for s in sup))
    return Fraction(sum(L // s.phi for s in sup), L)


@dataclass(frozen=True)
class MajorantTable:
    """The majorant ``nu(n) = scalar * core[n]`` on ``[1, N]``.

    ``core[n] = (sum_{d | (W n + b, P)} rho_d)**2`` is held exactly as
    ``sums[n-1]**2 / denominator**2`` with integer ``sums``.
    """

    params: SieveParams
    weights: SieveWeights = field(repr=False)
    sums: np.ndarray = field(repr=False)  # object array of Python ints
    denominator: int = field(repr=False)
    scalar: float

    @cached_property
    def values(self) -> np.ndarray:
        den = self.denominator
        ratio = np.array([s / den for s in self.sums], dtype=float)
        out = self.scalar * ratio * ratio
        out.setflags(write=False)
        return out

    @property
    def core(self) -> list[Fraction]:
        den2 = self.denominator**2
        return [Fraction(s * s, den2) for s in self.sums]

    def core_at(self, n: int) -> Fraction:
        return Fraction(self.sums[n - 1] ** 2, self.denominator**2)

    def core_at_least_one(self, n: int) -> bool:
        """Exact test of ``core[n] >= 1``."""
        s = self.sums[n - 1]
        return s * s >= self.denominator**2


def build_majorant(p: SieveParams, weights: SieveWeights | None = None) -> MajorantTable:
    """Tabulate the majorant on ``[1, p.N]``.

    Each support element ``d`` is sieved over its residue class
    ``n = -b W^{-1} (mod d)``; no ``W n + b`` is ever factored.
    """
    w = weights if weights is not None else build_weights(p.z, p.W)
    if w.W != p.W or w.z != p.z:
        raise ValueError("weights were built for different (z, W)")
    N, W, b = p.N, p.W, p.b
    acc = np.zeros(N + 1, dtype=object)
    acc[:] = 0
    for d, num in w.numerators.items():
        if d == 1:
            acc[1:] += num
            continue
        n0 = (-b * pow(W, -1, d)) % d
        acc[n0 if n0 else d :: d] += num
    scalar = totient(W) / W * math.log(p.z)
    return MajorantTable(params=p, weights=w, sums=acc[1:], denominator=w.denominator, scalar=scalar)


def _params_dict(z: Real, W: int, N: int | None = None, b: int | None = None) -> dict:
    out = {"z": z if isinstance(z, int) else float(z), "W": W}
    if N is not None:
        out.update(N=N, b=b)
    return out


def weights_to_dict(w: SieveWeights) -> dict:
    return {
        "params": _params_dict(w.z, w.W),
        "J": fraction_to_str(w.J),
        "support": [[d, fraction_to_str(r)] for d, r in sorted(w.support.items())],
    }


def weights_from_dict(doc: dict) -> SieveWeights:
    z, W = doc["params"]["z"], doc["params"]["W"]
    support = {int(d): str_to_fraction(r) for d, r in doc["support"]}
    primes = tuple(p for p in primes_below(z) if W % p)
    return SieveWeights(z=z, W=W, support=support, J=str_to_fraction(doc["J"]), primes=primes)


def majorant_to_dict(m: MajorantTable) -> dict:
    p = m.params
    doc = weights_to_dict(m.weights)
    doc["params"] = _params_dict(p.z, p.W, p.N, p.b)
    doc["scalar"] = m.scalar
    doc["core"] = [fraction_to_str(c) for c in m.core]
    return doc
