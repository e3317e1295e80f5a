"""Dense-model decomposition of a majorized function.

Given ``0 <= a <= nu`` on ``[1, N]`` we find the large spectrum of ``a``,
build the Bohr-type set ``B`` of its near-periods, and smooth ``a`` by the
autocorrelation kernel of ``B``:

    a'(n) = E_{b1, b2 in B} a(n + b1 - b2),    a'' = a - a'.

Everything lives on ``Z``: ``a'`` is stored on the widened window
``[1 - L, N + L]`` with ``L = floor(eps N)``, and convolutions are zero-padded,
never cyclic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import signal

from .addcomb import weighted_regularity
from .arithcore import as_rational
from .fourier import DEFAULT_OVERSAMPLE, DensityFunction, grid_lq, grid_transform
from .reports import csv_text

MERGE_RADIUS = 2  # grid steps


def floor_fraction_of(eps, N: int) -> int:
    return math.floor(as_rational(eps) * N)


@dataclass(frozen=True)
class SpectrumReport:
    epsilon: float
    grid_size: int
    frequencies: tuple[int, ...] = field(repr=False)
    representatives: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.frequencies)


def _circular_clusters(idx: np.ndarray, G: int, radius: int) -> list[np.ndarray]:
    if idx.size == 0:
        return []
    if idx.size == 1:
        return [idx]
    gaps = np.diff(np.concatenate([idx, [idx[0] + G]]))
    breaks = np.flatnonzero(gaps > radius)
    if breaks.size == 0:
        return [idx]
    # rotate so that a cluster boundary sits at the end of the array
    shift = breaks[-1] + 1
    rolled = np.roll(idx, -shift)
    gaps = np.roll(gaps, -shift)
    cuts = np.flatnonzero(gaps > radius)[:-1] + 1
    return np.split(rolled, cuts)


def spectrum(a: DensityFunction, epsilon: float, oversample: int = DEFAULT_OVERSAMPLE) -> SpectrumReport:
    """Grid points ``j / G`` (``G = oversample N``) with ``|ahat| >= eps N``.

    Points within ``MERGE_RADIUS`` grid steps of each other (circularly) are
    merged, and each cluster is represented by its largest coefficient.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    G = oversample * a.N
    mag = np.abs(grid_transform(a.values, 1, G))
    idx = np.flatnonzero(mag >= epsilon * a.N)
    reps = []
    for cluster in _circular_clusters(idx, G, MERGE_RADIUS):
        j = int(cluster[np.argmax(mag[cluster])])
        reps.append(Fraction(j, G))
    return SpectrumReport(epsilon, G, tuple(int(j) for j in idx), tuple(sorted(reps)))


@dataclass(frozen=True)
class BohrSet:
    epsilon: float
    frequencies: tuple[Fraction, ...]
    N: int
    elements: tuple[int, ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def density(self) -> float:
        """``|B| / N``, the relative size of the Bohr set."""
        return self.size / self.N


def bohr_set(frequencies, epsilon: float, N: int) -> BohrSet:
    """``{1 <= b <= eps N : ||b theta|| < eps for every theta}``, exactly."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    freqs = tuple(as_rational(t) % 1 for t in frequencies)
    eps = as_rational(epsilon)
    L = math.floor(eps * N)
    b = np.arange(1, L + 1, dtype=object)
    keep = np.ones(L, dtype=bool)
    for t in freqs:
        p, q = t.numerator, t.denominator
        rem = (b * p) % q
        dist = np.minimum(rem, q - rem)
        # ||b t|| < eps  <=>  dist * den(eps) < num(eps) * q
        keep &= np.array([d * eps.denominator < eps.numerator * q for d in dist], dtype=bool)
    return BohrSet(epsilon, freqs, N, tuple(int(x) for x in np.arange(1, L + 1)[keep]))


@dataclass(frozen=True)
class Decomposition:
    """``a = a_struct + a_unif`` on the window starting at ``start = 1 - L``."""

    a: DensityFunction = field(repr=False)
    bohr: BohrSet
    start: int
    a_ext: np.ndarray = field(repr=False)
    a_struct: np.ndarray = field(repr=False)
    a_unif: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.a.N

    @property
    def window(self) -> tuple[int, int]:
        return self.start, self.start + self.a_struct.size - 1

    def struct_on_interval(self) -> np.ndarray:
        """``a'`` restricted to ``[1, N]``."""
        return self.a_struct[1 - self.start : 1 - self.start + self.N]

    def multiplier(self, grid_size: int) -> np.ndarray:
        """``|E_{b in B} e(b theta)|^2`` on the grid ``j / grid_size``."""
        ind = np.ones(self.bohr.size) / self.bohr.size
        vals = np.zeros(max(self.bohr.elements) + 1)
        vals[list(self.bohr.elements)] = ind
        return np.abs(grid_transform(vals, 0, grid_size)) ** 2


def smooth_decompose(a: DensityFunction, bohr: BohrSet) -> Decomposition:
    """Smooth ``a`` by the normalized autocorrelation of ``B``."""
    if bohr.size == 0:
        raise ValueError("Bohr set is empty")
    elems = np.asarray(bohr.elements)
    lo, hi = int(elems.min()), int(elems.max())
    ind = np.zeros(hi - lo + 1)
    ind[elems - lo] = 1.0
    kernel = signal.convolve(ind, ind[::-1]) / bohr.size**2  # lags -(hi-lo)..(hi-lo)
    spread = hi - lo
    smoothed = signal.convolve(a.values, kernel)  # positions 1 - spread .. N + spread
    L = max(floor_fraction_of(bohr.epsilon, a.N), spread)
    start = 1 - L
    width = a.N + 2 * L
    a_struct = np.zeros(width)
    off = (1 - spread) - start
    a_struct[off : off + smoothed.size] = smoothed
    a_ext = np.zeros(width)
    a_ext[L : L + a.N] = a.values
    a_unif = a_ext - a_struct
    for arr in (a_ext, a_struct, a_unif):
        arr.setflags(write=False)
    return Decomposition(a, bohr, start, a_ext, a_struct, a_unif)


def decompose(a: DensityFunction, epsilon: float, oversample: int = DEFAULT_OVERSAMPLE) -> Decomposition:
    """Spectrum, Bohr set and smoothing in one call."""
    spec = spectrum(a, epsilon, oversample)
    return smooth_decompose(a, bohr_set(spec.representatives, epsilon, a.N))


def decomposition_csv(d: Decomposition) -> str:
    """Columns ``n, a, a_struct, a_unif`` over the widened window."""
    n = np.arange(d.start, d.start + d.a_struct.size)
    rows = zip(n.tolist(), d.a_ext.tolist(), d.a_struct.tolist(), d.a_unif.tolist())
    return csv_text(["n", "a", "a_struct", "a_unif"], rows)


@dataclass(frozen=True)
class DecompositionReport:
    N: int
    epsilon: float
    bohr_size: int
    bohr_density: float
    eta: float
    # (1) a' is set-like
    struct_max: float
    struct_min: float
    struct_excess: float
    mean_shift: float
    mean_shift_Z: float
    # (2) a'' is uniform
    uniformity: float
    # (3) regularity of a' against that of a
    beta: float
    kappa: float
    regularity_a: float
    regularity_struct: float
    # (4) dominance and L^q norms
    dominance_struct: bool
    dominance_unif: bool
    multiplier_error: float
    q: float
    lq_a: float
    lq_struct: float
    lq_unif: float
    majorized: bool


def decomposition_report(d: Decomposition, nu: DensityFunction, eta: float, q: float,
                         kappa: float, beta: float,
                         oversample: int = DEFAULT_OVERSAMPLE) -> DecompositionReport:
    """Measure the four properties of the decomposition on a grid of
    ``oversample * N`` frequencies.  Nothing is asserted here; callers decide
    what to hold against which constant."""
    N = d.N
    G = oversample * N
    A = grid_transform(d.a.values, 1, G)
    S = grid_transform(d.a_struct, d.start, G)
    U = grid_transform(d.a_unif, d.start, G)
    mult = d.multiplier(G)
    absA = np.abs(A)
    tol = 1e-9 * N
    mult_err = max(float(np.max(np.abs(S - A * mult))), float(np.max(np.abs(U - A * (1 - mult)))))
    inner = d.struct_on_interval()
    reg_scale = float(N) ** 2
    return DecompositionReport(
        N=N,
        epsilon=d.bohr.epsilon,
        bohr_size=d.bohr.size,
        bohr_density=d.bohr.density,
        eta=eta,
        struct_max=float(d.a_struct.max()),
        struct_min=float(d.a_struct.min()),
        struct_excess=max(0.0, float(d.a_struct.max()) - 1.0),
        mean_shift=abs(float(inner.mean()) - d.a.mean),
        mean_shift_Z=abs(float(d.a_struct.sum()) - float(d.a.values.sum())),
        uniformity=float(np.max(np.abs(U))) / N,
        beta=beta,
        kappa=kappa,
        regularity_a=weighted_regularity(d.a.values, N, beta) / reg_scale,
        regularity_struct=weighted_regularity(inner, N, beta) / reg_scale,
        dominance_struct=bool(np.all(np.abs(S) <= absA + tol)),
        dominance_unif=bool(np.all(np.abs(U) <= absA + tol)),
        multiplier_error=mult_err,
        q=q,
        lq_a=grid_lq(A, q),
        lq_struct=grid_lq(S, q),
        lq_unif=grid_lq(U, q),
        majorized=bool(np.all(d.a.values <= nu.values)),
    )


@dataclass(frozen=True)
class HolderGap:
    true_gap: float
    bound_product: float
    products: tuple[float, ...]
    q: float
    grid_size: int

    @property
    def contract_holds(self) -> bool:
        return self.true_gap <= 7 * self.bound_product


def _triple_sum(f1, s1, f2, s2, f3, s3, target: int) -> float:
    # sum over n1 + n2 + n3 = target of f1(n1) f2(n2) f3(n3)
    pair = signal.convolve(f1, f2)  # position k <-> n1 + n2 = s1 + s2 + k
    k3 = np.arange(f3.size)
    k12 = target - s3 - k3 - (s1 + s2)
    ok = (k12 >= 0) & (k12 < pair.size)
    return float(np.sum(pair[k12[ok]] * f3[ok]))


def holder_gap(d1: Decomposition, d2: Decomposition, d3: Decomposition, q: float,
               target: int) -> HolderGap:
    """Gap between the triple sums of ``a`` and ``a'`` against the Hoelder
    products of the seven cross terms.

    Norms are taken on a grid of ``G`` points with ``G`` at least the span of
    the triple product, where the discrete Hoelder inequality bounds every
    cross term exactly; so ``true_gap <= 7 * bound_product`` is a hard check.
    """
    if not 2 < q < 3:
        raise ValueError("q must lie in (2, 3)")
    ds = (d1, d2, d3)
    true = _triple_sum(d1.a.values, 1, d2.a.values, 1, d3.a.values, 1, target)
    model = _triple_sum(d1.a_struct, d1.start, d2.a_struct, d2.start, d3.a_struct, d3.start, target)
    G = sum(d.a_struct.size for d in ds)
    parts = []
    for d in ds:
        S = grid_transform(d.a_struct, d.start, G)
        U = grid_transform(d.a_unif, d.start, G)
        parts.append({
            "struct": (grid_lq(S, q), float(np.max(np.abs(S)))),
            "unif": (grid_lq(U, q), float(np.max(np.abs(U)))),
        })
    products = []
    for combo in itertools.product(("struct", "unif"), repeat=3):
        if "unif" not in combo:
            continue
        best = math.inf
        for i, kind in enumerate(combo):
            if kind != "unif":
                continue
            lq_i, sup_i = parts[i]["unif"]
            others = [parts[j][combo[j]][0] for j in range(3) if j != i]
            best = min(best, sup_i ** (3 - q) * lq_i ** (q - 2) * others[0] * others[1])
        products.append(best)
    return HolderGap(abs(true - model), max(products), tuple(products), q, G)
