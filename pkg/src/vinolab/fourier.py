"""Exponential sums on [1, N]: transforms, Fourier L^q norms, the
pseudorandomness measure of a majorant and the major/minor arc split.

Convention throughout: ``fhat(theta) = sum_n f(n) e(n theta)`` with
``e(x) = exp(2 pi i x)``.  Note the positive sign; numpy's forward FFT uses
the opposite one, so grids are evaluated through ``ifft``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

import numpy as np

from .arithcore import as_rational
from .reports import csv_text
from .selberg import MajorantTable, T_q

DEFAULT_OVERSAMPLE = 4
DEFAULT_DELTA = 0.01


def e(x):
    return np.exp(2j * np.pi * x)


@dataclass(frozen=True)
class DensityFunction:
    """A nonnegative function on ``[1, N]``; ``values[n - 1]`` is ``f(n)``."""

    N: int
    values: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.N,):
            raise ValueError(f"expected {self.N} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("density values must be finite and nonnegative")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def mean(self) -> float:
        return float(self.values.sum()) / self.N

    @classmethod
    def indicator(cls, N: int, elements, weight: float = 1.0, label: str = "") -> "DensityFunction":
        vals = np.zeros(N)
        idx = np.asarray(sorted(elements), dtype=np.int64)
        if idx.size and (idx[0] < 1 or idx[-1] > N):
            raise ValueError("elements must lie in [1, N]")
        vals[idx - 1] = weight
        return cls(N, vals, label)

    @classmethod
    def from_majorant(cls, table: MajorantTable, label: str = "nu") -> "DensityFunction":
        return cls(table.params.N, table.values, label)


def grid_transform(values: np.ndarray, start: int, grid_size: int) -> np.ndarray:
    """``F[j] = sum_k values[k] e((start + k) j / G)`` for ``j in [0, G)``.

    Exact evaluation of the trigonometric polynomial at ``j / G`` for any
    support length: positions are folded modulo ``G`` before the FFT.
    """
    values = np.asarray(values)
    pos = (start + np.arange(values.size)) % grid_size
    if np.iscomplexobj(values):
        folded = (np.bincount(pos, weights=values.real, minlength=grid_size)
                  + 1j * np.bincount(pos, weights=values.imag, minlength=grid_size))
    else:
        folded = np.bincount(pos, weights=values, minlength=grid_size)
    return np.fft.ifft(folded) * grid_size


def grid_lq(transform: np.ndarray, q: float) -> float:
    """Riemann-sum ``(int_0^1 |F|^q)^{1/q}`` from grid samples."""
    return float(np.mean(np.abs(transform) ** q) ** (1.0 / q))


def dft_fullgrid(f: DensityFunction) -> np.ndarray:
    """``fhat(r / N)`` for ``r = 0, ..., N - 1``."""
    return grid_transform(f.values, 1, f.N)


def fhat_at(f: DensityFunction, theta) -> complex:
    """Direct O(N) evaluation of ``fhat(theta)``.

    A ``Fraction`` theta has its phases reduced exactly before exponentiating.
    """
    n = np.arange(1, f.N + 1)
    if isinstance(theta, Fraction):
        phase = (n * theta.numerator % theta.denominator) / theta.denominator
    else:
        phase = np.mod(n * float(theta), 1.0)
    return complex(np.sum(f.values * e(phase)))


def lq_norm(f: DensityFunction, q: float, oversample: int = DEFAULT_OVERSAMPLE) -> float:
    """``||fhat||_q`` approximated on a grid of ``oversample * N`` points.

    Exact for ``q = 2`` whenever the grid has at least ``N`` points, and for
    ``q = 4`` once it has at least ``2N - 1``.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    if oversample < 1:
        raise ValueError("oversample must be at least 1")
    return grid_lq(grid_transform(f.values, 1, oversample * f.N), q)


@dataclass(frozen=True)
class PseudorandomnessReport:
    N: int
    eta: float
    mean_gap: float
    eta_nonzero: float  # max over r != 0 only
    worst_r: int


def pseudorandomness_eta(nu: DensityFunction | MajorantTable) -> PseudorandomnessReport:
    """``eta = max_r |nuhat(r/N) - [r = 0] N| / N`` and the mean gap ``|nuhat(0)/N - 1|``."""
    if isinstance(nu, MajorantTable):
        nu = DensityFunction.from_majorant(nu)
    F = dft_fullgrid(nu)
    dev = np.abs(F) / nu.N
    mean_gap = abs(F[0].real / nu.N - 1.0)
    dev[0] = mean_gap
    rest = dev[1:]
    return PseudorandomnessReport(
        N=nu.N,
        eta=float(dev.max()),
        mean_gap=float(mean_gap),
        eta_nonzero=float(rest.max()) if rest.size else 0.0,
        worst_r=int(np.argmax(dev)),
    )


def pseudorandomness_record(table: MajorantTable) -> dict:
    """The ``{N, z, W, b, eta, mean_gap}`` export for a majorant."""
    p = table.params
    rep = pseudorandomness_eta(table)
    return {"N": p.N, "z": float(p.z), "W": p.W, "b": p.b, "eta": rep.eta,
            "mean_gap": rep.mean_gap, "eta_nonzero": rep.eta_nonzero}


# ---------------------------------------------------------------------------
# arcs


class Major(NamedTuple):
    q: int
    a: int


def arc_parameters(N: int, delta: float = DEFAULT_DELTA) -> tuple[int, int]:
    """``(Q, R) = (floor(N^{delta/4}), floor(N^{1 - delta/2}))``."""
    return max(1, math.floor(N ** (delta / 4))), max(1, math.floor(N ** (1 - delta / 2)))


def _convergents(num: int, den: int):
    h0, h1, k0, k1 = 0, 1, 1, 0
    while den:
        c, rem = divmod(num, den)
        h0, h1 = h1, c * h1 + h0
        k0, k1 = k1, c * k1 + k0
        yield h1, k1
        num, den = den, rem


def _within(r: int, N: int, p: int, k: int, R: int) -> bool:
    # |r/N - p/k| <= 1/(kR), cleared of denominators
    return abs(r * k - p * N) * R <= N


def _nearest(r: int, N: int, k: int) -> int:
    return (2 * r * k + N) // (2 * N)


def classify_frequency(r: int, N: int, Q: int, R: int) -> Major | None:
    """Major arc containing ``r / N`` with the least denominator, or None.

    Distances are measured on the circle, so ``r`` near ``N`` sits on the
    arc around ``0/1``.
    """
    for p, k in _convergents(r, N):
        if k > Q:
            break
        if _within(r, N, p, k, R):
            return Major(k, p % k)
    if R > 2 * Q:
        # every admissible a/q is a convergent here (Legendre)
        return None
    for k in range(1, Q + 1):
        p = _nearest(r, N, k)
        if math.gcd(p, k) == 1 and _within(r, N, p, k, R):
            return Major(k, p % k)
    return None


@dataclass(frozen=True)
class ArcDissection:
    N: int
    Q: int
    R: int
    classification: tuple[Major | None, ...] = field(repr=False)

    def __getitem__(self, r: int) -> Major | None:
        return self.classification[r]

    def minor(self) -> list[int]:
        return [r for r, c in enumerate(self.classification) if c is None]

    def major(self) -> dict[int, Major]:
        return {r: c for r, c in enumerate(self.classification) if c is not None}


def arc_dissect(N: int, Q: int, R: int) -> ArcDissection:
    if not 1 <= Q <= R <= N:
        raise ValueError(f"need 1 <= Q <= R <= N, got Q={Q}, R={R}, N={N}")
    return ArcDissection(N, Q, R, tuple(classify_frequency(r, N, Q, R) for r in range(N)))


def arc_label(c: Major | None) -> str:
    return "minor" if c is None else f"major:{c.q}:{c.a}"


def spectrum_csv(f: DensityFunction, dissection: ArcDissection | None = None) -> str:
    """CSV rows ``r, re, im, magnitude, classification`` for ``fhat(r/N)``."""
    F = dft_fullgrid(f)
    rows = []
    for r, v in enumerate(F):
        label = arc_label(dissection[r]) if dissection is not None else ""
        rows.append((r, repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v))), label))
    return csv_text(["r", "re", "im", "magnitude", "classification"], rows)


# ---------------------------------------------------------------------------
# major-arc asymptotics


@dataclass(frozen=True)
class MajorArcComparison:
    q: int
    a: int
    x: int
    lhs: complex
    prediction: complex
    error_term: float
    bound: float
    arc_phase: complex


def _arc_phase(q: int, a: int, W: int, b: int) -> tuple[int | None, complex]:
    # residue class n0 forced by q | W n + b, and e_q(a n0)
    if q == 1:
        return 0, 1.0 + 0j
    if math.gcd(q, W) > 1:
        return None, 0j
    n0 = (-b * pow(W, -1, q)) % q
    return n0, complex(np.exp(2j * np.pi * a * n0 / q))


def major_arc_compare(nu: MajorantTable, q: int, a: int, x: int,
                      delta: float = DEFAULT_DELTA) -> MajorArcComparison:
    """Compare ``sum_{n <= x} nu(n) e_q(a n)`` with its main term
    ``scalar * arc_phase * x * T(q)``.

    The per-residue-class sums of the core are exact rationals, so the
    residual is formed exactly before the single conversion to floating
    point.  For ``q = 1`` this makes the error vanish identically.
    """
    if q < 1 or math.gcd(a, q) != 1:
        raise ValueError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    p = nu.params
    if not 1 <= x <= p.N:
        raise ValueError(f"x must lie in [1, {p.N}]")
    w = nu.weights
    T = T_q(w, q) if w.divides_P(q) else Fraction(0)
    n0, phase = _arc_phase(q, a, p.W, p.b)

    den2 = nu.denominator**2
    sq = [s * s for s in nu.sums[:x]]
    main = x * T
    lhs = 0j
    resid = 0j
    for c in range(q):
        # n = c (mod q) with n = k + 1 for k the array index
        cls = Fraction(sum(sq[(c - 1) % q :: q]), den2)
        rot = complex(np.exp(2j * np.pi * a * c / q))
        lhs += rot * float(cls)
        exact = cls - main if c == n0 else cls
        resid += rot * float(exact)
    if n0 is None:
        resid = lhs
    s = nu.scalar
    bound = s * q * p.N ** (1 - delta)
    return MajorArcComparison(q, a, x, s * lhs, s * phase * float(main), s * abs(resid), bound, phase)


@dataclass(frozen=True)
class MinorArcCheck:
    lhs: float
    rhs: float


def minor_arc_lemma_check(alpha, q: int, a: int, M: int, x: int,
                          residues: Mapping[int, int]) -> MinorArcCheck:
    """Both sides of ``sum_{m <= M} |sum_{n <= x, n = c_m (m)} e(alpha n)|
    << (M + x/q + q) log(2 q x)``."""
    if q < 1 or math.gcd(a, q) != 1:
        raise ValueError("need gcd(a, q) = 1")
    ra = as_rational(alpha)
    if abs(ra - Fraction(a, q)) > Fraction(1, q * q):
        raise ValueError(f"|alpha - a/q| must be at most 1/q^2 (alpha={alpha}, a/q={a}/{q})")
    total = 0.0
    for m in range(1, M + 1):
        if m not in residues:
            raise ValueError(f"missing residue for m={m}")
        c = residues[m] % m
        start = c if c >= 1 else m
        n = np.arange(start, x + 1, m)
        if isinstance(alpha, Fraction):
            phase = (n * alpha.numerator % alpha.denominator) / alpha.denominator
        else:
            phase = np.mod(n * float(alpha), 1.0)
        total += abs(np.sum(e(phase)))
    rhs = (M + x / q + q) * math.log(2 * q * x)
    return MinorArcCheck(float(total), rhs)
