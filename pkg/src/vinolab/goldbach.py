"""Three-prime representations through the W-tricked dense model.

An odd ``M`` is written as ``W N + b1 + b2 + b3`` with reduced residues
``b_i``; the problem becomes counting ``n1 + n2 + n3 = N`` with every
``W n_i + b_i`` prime.  Each prime indicator is weighted by
``(phi(W)/W) log z_i`` so that it sits under the sieve majorant ``nu_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
from scipy import signal

from .addcomb import integer_convolve, weighted_regularity
from .arithcore import ap_prime_flags, build_prime_table, primorial, totient
from .fourier import DEFAULT_DELTA, DensityFunction, lq_norm, pseudorandomness_eta
from .selberg import MajorantTable, SieveParams, build_majorant
from .transfer import bohr_set, decompose, decomposition_report, holder_gap, spectrum

Z_EXPONENT = 0.49
MIN_N = 6


class DegenerateInstanceError(ValueError):
    """``M`` is too small for the three-function setup."""


def _reduced_residues(W: int) -> list[int]:
    if W == 1:
        return [1]
    return [b for b in range(1, W) if math.gcd(b, W) == 1]


def choose_residues(M: int, W: int) -> tuple[int, int, int]:
    """Lexicographically smallest reduced ``(b1, b2, b3)`` with sum ``= M (mod W)``."""
    if M % 2 == 0:
        raise ValueError("M must be odd")
    reduced = _reduced_residues(W)
    ok = set(reduced)
    for b1, b2 in itertools.product(reduced, repeat=2):
        b3 = (M - b1 - b2) % W or W
        if b3 in ok:
            return b1, b2, b3
    raise AssertionError(f"no reduced residue triple for M={M}, W={W}")


@dataclass(frozen=True)
class TernaryInstance:
    M: int
    w: float
    W: int
    b: tuple[int, int, int]
    N: int
    N_i: tuple[int, int, int]
    z_i: tuple[float, float, float]
    delta: float
    flags: tuple[np.ndarray, ...] = field(repr=False)
    a_i: tuple[DensityFunction, ...] = field(repr=False)
    nu_i: tuple[MajorantTable, ...] = field(repr=False)

    @property
    def scalars(self) -> tuple[float, ...]:
        return tuple(m.scalar for m in self.nu_i)

    def prime(self, i: int, n: int) -> int:
        return self.W * n + self.b[i]


def build_instance(M: int, w: float, delta: float = DEFAULT_DELTA) -> TernaryInstance:
    W = primorial(w)
    b = choose_residues(M, W)
    N, rem = divmod(M - sum(b), W)
    assert rem == 0
    if N < MIN_N:
        raise DegenerateInstanceError(f"instance degenerate: N={N} < {MIN_N} for M={M}, W={W}")
    N_i = (N // 2, N // 2, N)
    z_i = tuple(float(n) ** Z_EXPONENT for n in N_i)
    flags, a_i, nu_i = [], [], []
    for Ni, zi, bi in zip(N_i, z_i, b):
        nu = build_majorant(SieveParams(Ni, zi, W, bi))
        f = ap_prime_flags(W, bi, Ni)[1:].copy()
        f &= W * np.arange(1, Ni + 1) + bi >= zi
        f.setflags(write=False)
        flags.append(f)
        a_i.append(DensityFunction(Ni, nu.scalar * f, label=f"a(b={bi})"))
        nu_i.append(nu)
    return TernaryInstance(M, w, W, b, N, N_i, z_i, delta, tuple(flags), tuple(a_i), tuple(nu_i))


def majorization_holds(t: TernaryInstance, i: int) -> bool:
    """Exact: wherever ``a_i > 0`` the sieve core is at least 1."""
    nu = t.nu_i[i]
    return all(nu.core_at_least_one(int(n) + 1) for n in np.flatnonzero(t.flags[i]))


def kappa_estimate(t: TernaryInstance) -> float:
    """Weighted regularity of ``a_1`` at ``beta = delta / 50``, over ``N_1**2``."""
    N1 = t.N_i[0]
    return weighted_regularity(t.a_i[0].values, N1, t.delta / 50) / N1**2


def hypothesis_report(t: TernaryInstance, epsilon: float, q: float) -> dict:
    alphas = [a.mean for a in t.a_i]
    mean_condition = 0.5 * (min(1.0, alphas[0] + alphas[1]) + alphas[1]) + alphas[2] - 1
    kappa = kappa_estimate(t)
    beta = t.delta / 50
    reg = weighted_regularity(t.a_i[0].values, t.N_i[0], beta)
    pr = [pseudorandomness_eta(nu) for nu in t.nu_i]
    lq_ratio = [lq_norm(a, q) / a.N ** (1 - 1 / q) for a in t.a_i]
    bohr_density = []
    for a in t.a_i:
        spec = spectrum(a, epsilon)
        bohr_density.append(bohr_set(spec.representatives, epsilon, a.N).density)
    return {
        "majorized": [majorization_holds(t, i) for i in range(3)],
        "alphas": alphas,
        "mean_condition": mean_condition,
        "eta": [r.eta for r in pr],
        "eta_nonzero": [r.eta_nonzero for r in pr],
        "mean_gap": [r.mean_gap for r in pr],
        "q": q,
        "lq_ratio": lq_ratio,
        "beta": beta,
        "kappa": kappa,
        "regularity": reg,
        "regular": reg >= kappa * t.N_i[0] ** 2,
        "epsilon": epsilon,
        "bohr_density": bohr_density,
        "singular_series": t.W / totient(t.W),
    }


def _pair_then_target(x1: np.ndarray, x2: np.ndarray, x3: np.ndarray, target: int, conv):
    # arrays indexed from n = 1; n1 + n2 lives at index n1 + n2 - 2 of the pair
    pair = conv(x1, x2)
    n3 = np.arange(1, x3.size + 1)
    k = target - n3 - 2
    ok = (k >= 0) & (k < pair.size)
    return pair, n3, k, ok


def triple_convolution_count(t: TernaryInstance) -> float:
    """``sum_{n1 + n2 + n3 = N} a1(n1) a2(n2) a3(n3)`` by zero-padded convolution."""
    a1, a2, a3 = (a.values for a in t.a_i)
    pair, n3, k, ok = _pair_then_target(a1, a2, a3, t.N, signal.convolve)
    return float(np.sum(pair[k[ok]] * a3[ok]))


def triple_unweighted_count(t: TernaryInstance) -> int:
    """Exact number of admissible ``(n1, n2, n3)``."""
    f1, f2, f3 = t.flags
    pair, n3, k, ok = _pair_then_target(f1, f2, f3, t.N, integer_convolve)
    return int(np.sum(pair[k[ok]] * f3[ok].astype(np.int64)))


def triple_direct_count(t: TernaryInstance) -> tuple[float, int]:
    """Oracle: weighted and unweighted counts by explicit enumeration."""
    s1, s2, s3 = t.scalars
    sets = [np.flatnonzero(f) + 1 for f in t.flags]
    in3 = set(sets[2].tolist())
    count = 0
    for n1 in sets[0].tolist():
        for n2 in sets[1].tolist():
            if t.N - n1 - n2 in in3:
                count += 1
    return count * s1 * s2 * s3, count


def find_witness(t: TernaryInstance) -> tuple[int, int, int] | None:
    """Primes ``(p1, p2, p3)`` from one admissible triple, or None."""
    f1, f2, f3 = t.flags
    pair, n3, k, ok = _pair_then_target(f1, f2, f3, t.N, integer_convolve)
    hits = np.flatnonzero(ok & f3 & (pair[np.clip(k, 0, pair.size - 1)] > 0))
    if hits.size == 0:
        return None
    m3 = int(n3[hits[0]])
    rest = t.N - m3
    for n1 in np.flatnonzero(f1) + 1:
        n2 = rest - int(n1)
        if 1 <= n2 <= f2.size and f2[n2 - 1]:
            return t.prime(0, int(n1)), t.prime(1, n2), t.prime(2, m3)
    raise AssertionError("convolution reported a pair that enumeration cannot find")


def witness_is_valid(t: TernaryInstance, witness) -> bool:
    """Exact check that the witness consists of primes summing to ``M``."""
    if witness is None or sum(witness) != t.M:
        return False
    table = build_prime_table(max(witness))
    return all(p in table for p in witness)


def direct_ternary_count(M: int) -> int:
    """Ordered prime triples summing to ``M``, enumerating ``p1`` and ``p2``."""
    if M < 7:
        raise ValueError("M must be at least 7")
    table = build_prime_table(M)
    is_p = table.is_prime
    primes = table.primes()
    total = 0
    for p1 in primes:
        m = M - int(p1)
        if m < 4:
            break
        p2 = primes[primes <= m - 2]
        total += int(np.count_nonzero(is_p[m - p2]))
    return total


def ternary_counts_upto(limit: int) -> np.ndarray:
    """``counts[m]`` = ordered prime triples summing to ``m``, for ``m <= limit``."""
    ind = build_prime_table(limit).is_prime.astype(np.int64)
    r2 = integer_convolve(ind, ind)[: limit + 1]
    return integer_convolve(r2, ind)[: limit + 1]


@dataclass(frozen=True)
class ExperimentConfig:
    M: tuple[int, ...] = ()
    w: tuple[float, ...] = (2,)
    epsilon: float = 0.1
    q: float = 2.5
    delta: float = DEFAULT_DELTA
    direct_only: bool = False
    decompose: bool = True
    direct_limit: int = 2 * 10**6

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        """``M`` may be an int, a list, or ``{"range": [lo, hi]}`` (odd values,
        inclusive); ``w`` an int or list."""
        doc = dict(doc)
        M = doc.pop("M", ())
        if isinstance(M, dict):
            lo, hi = M["range"]
            M = range(lo + (lo % 2 == 0), hi + 1, 2)
        elif isinstance(M, int):
            M = (M,)
        w = doc.pop("w", (2,))
        if isinstance(w, (int, float)):
            w = (w,)
        unknown = set(doc) - {f for f in cls.__dataclass_fields__ if f not in ("M", "w")}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(M=tuple(int(m) for m in M), w=tuple(w), **doc)


def _positivity_agrees(t: TernaryInstance, unweighted: int, witness, direct) -> bool:
    if unweighted == 0:
        return witness is None
    return witness_is_valid(t, witness) and (direct is None or direct > 0)


def _instance_record(M: int, w: float, cfg: ExperimentConfig) -> dict:
    rec: dict = {"M": M, "w": w}
    direct = direct_ternary_count(M) if M <= cfg.direct_limit else None
    rec["direct_count"] = direct
    if cfg.direct_only:
        return rec
    t = build_instance(M, w, cfg.delta)
    hyp = hypothesis_report(t, cfg.epsilon, cfg.q)
    weighted = triple_convolution_count(t)
    unweighted = triple_unweighted_count(t)
    witness = find_witness(t)
    rec.update(
        W=t.W, b=list(t.b), N=t.N,
        alphas=hyp["alphas"], eta=hyp["eta"], lq_ratio=hyp["lq_ratio"], kappa=hyp["kappa"],
        triple_weighted=weighted, triple_unweighted=unweighted,
        witness=list(witness) if witness else None,
        positivity_agreement=_positivity_agrees(t, unweighted, witness, direct),
        c_ratio=weighted / t.N**2,
        hypotheses=hyp,
    )
    if cfg.decompose:
        try:
            rec.update(_decomposition_fields(t, hyp, cfg))
        except ValueError as exc:  # e.g. an empty Bohr set at tiny N
            rec["decomposition_error"] = str(exc)
    return rec


def _decomposition_fields(t: TernaryInstance, hyp: dict, cfg: ExperimentConfig) -> dict:
    ds, reports = [], []
    for a, nu, eta in zip(t.a_i, t.nu_i, hyp["eta"]):
        d = decompose(a, cfg.epsilon)
        ds.append(d)
        reports.append(decomposition_report(d, DensityFunction.from_majorant(nu), eta, cfg.q,
                                            hyp["kappa"], hyp["beta"]))
    return {"decomposition": reports, "holder": holder_gap(*ds, cfg.q, t.N)}


def run_experiment(cfg: ExperimentConfig) -> Iterator[dict]:
    """One record per grid point, in grid order.  Failures are recorded in
    the ``error`` field and the sweep continues."""
    for M, w in itertools.product(cfg.M, cfg.w):
        try:
            rec = _instance_record(M, w, cfg)
        except (ValueError, ArithmeticError, OverflowError, MemoryError) as exc:
            rec = {"M": M, "w": w, "error": f"{type(exc).__name__}: {exc}"}
        yield rec


def summarize(records: Iterable[dict]) -> dict:
    records = list(records)
    failed = [r for r in records if "error" in r]
    counts = [r["direct_count"] for r in records if r.get("direct_count") is not None]
    return {
        "instances": len(records),
        "errors": len(failed),
        "direct_all_positive": all(c > 0 for c in counts),
    }
