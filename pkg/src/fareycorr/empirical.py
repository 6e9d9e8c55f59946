"""Exact empirical pair correlation and the square-free lattice count.

Pair-counting convention: an ordered pair ``(g1, g2)`` of distinct elements
is counted when the circular difference ``(g2 - g1) mod 1``, scaled by the
sequence length ``N``, lies in the open window ``(0, Lambda)``.  Every
unordered pair at scaled distance below ``Lambda`` is therefore counted once
in this direction; pairs within ``Lambda`` in the other direction are the
same pairs relabelled, so no factor of two is applied anywhere.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analytic import (
    boca_zaharescu_integral_exact,
    default_prime_cutoff,
    g2_integral_exact,
    lattice_constant,
)
from .arith import INT64_MAX, SieveTables, build_sieve, to_fraction
from .errors import OutOfRangeError, PreconditionError
from .farey import DenominatorPredicate, FareySequence, enumerate_farey


@dataclass(frozen=True)
class WindowSpec:
    """Window ``(0, lambda_max)`` cut into ``bins`` equal half-open bins.

    Bin ``k`` covers ``(k L/bins, (k+1) L/bins]``; all edges are exact.
    """

    lambda_max: Fraction
    bins: int = 1

    def __post_init__(self):
        object.__setattr__(self, "lambda_max", to_fraction(self.lambda_max))
        if self.lambda_max <= 0:
            raise PreconditionError("lambda_max must be positive")
        if self.bins < 1:
            raise PreconditionError("bins must be >= 1")

    @property
    def bin_width(self) -> Fraction:
        return self.lambda_max / self.bins

    def edges(self) -> list[Fraction]:
        return [self.lambda_max * k / self.bins for k in range(self.bins + 1)]


@dataclass(frozen=True, eq=False)
class CorrelationHistogram:
    window: WindowSpec
    counts: np.ndarray = field(repr=False)
    N: int
    Q: int
    predicate: DenominatorPredicate

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def density(self) -> np.ndarray:
        """``count / (N * bin_width)`` per bin, comparable with a pair-correlation density."""
        return self.counts / (self.N * float(self.window.bin_width))

    def same_counts(self, other: "CorrelationHistogram") -> bool:
        return self.window == other.window and np.array_equal(self.counts, other.counts)


def _check_window(seq: FareySequence, window: WindowSpec) -> bool:
    """Validate the window; return True when int64 products could overflow."""
    N = seq.count
    if N < 2:
        raise PreconditionError("need at least two fractions")
    if N <= window.lambda_max:
        raise PreconditionError(f"degenerate window: N={N} <= Lambda={window.lambda_max}")
    return _needs_wide(window, int(seq.denominators.max()), N)


def _needs_wide(window: WindowSpec, qmax: int, N: int) -> bool:
    ln, ld = window.lambda_max.numerator, window.lambda_max.denominator
    worst = max(N * qmax * qmax * window.bins * ld, ln * qmax * qmax, N * ld * qmax * qmax)
    return worst >= INT64_MAX


def _widen(*arrays):
    # Python-int object arrays: exact at any size, used only for extreme windows
    return tuple(x.astype(object) for x in arrays)


def _classify(num, den, N, window: WindowSpec):
    """Split exact gaps ``num/den`` into (inside-window mask, bin index of those inside)."""
    ln, ld = window.lambda_max.numerator, window.lambda_max.denominator
    # N*num/den < ln/ld  <=>  num <= (ln*den - 1) // (N*ld)
    inside = (num > 0) & (num <= (ln * den - 1) // (N * ld))
    n_in, d_in = num[inside], den[inside]
    # bin = ceil(N*num*bins*ld / (den*ln)) - 1
    top = N * n_in * (window.bins * ld)
    bottom = d_in * ln
    idx = -((-top) // bottom) - 1
    return inside, idx.astype(np.int64)


def _sweep_range(a, q, N, window: WindowSpec, lo: int, hi: int, direction: int) -> np.ndarray:
    counts = np.zeros(window.bins, dtype=np.int64)
    active = np.arange(lo, hi, dtype=np.int64)
    k = 1
    while active.size and k < N:
        if direction > 0:
            j = active + k
            wrap = j >= N
            j[wrap] -= N
            num = a[j] * q[active] - a[active] * q[j]
        else:
            j = active - k
            wrap = j < 0
            j[wrap] += N
            num = a[active] * q[j] - a[j] * q[active]
        den = q[active] * q[j]
        num = num + den * wrap
        inside, idx = _classify(num, den, N, window)
        counts += np.bincount(idx, minlength=window.bins)
        active = active[inside]
        k += 1
    return counts


def pair_correlation(
    seq: FareySequence,
    window: WindowSpec,
    workers: int = 1,
    direction: int = 1,
) -> CorrelationHistogram:
    """Histogram of scaled circular gaps via a windowed sweep.

    For every base point the successors (``direction=1``) or predecessors
    (``direction=-1``) are visited in order until the scaled gap leaves the
    window; gaps grow monotonically along the walk, so nothing is missed.
    Base points are split across ``workers`` threads and the integer counts
    summed, so the result does not depend on ``workers``.
    """
    wide = _check_window(seq, window)
    N = seq.count
    a, q = seq.numerators, seq.denominators
    if wide:
        a, q = _widen(a, q)
    workers = max(1, int(workers))
    bounds = np.linspace(0, N, workers + 1).astype(int)
    ranges = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers == 1:
        parts = [_sweep_range(a, q, N, window, lo, hi, direction) for lo, hi in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: _sweep_range(a, q, N, window, r[0], r[1], direction), ranges))
    counts = np.sum(parts, axis=0).astype(np.int64)
    return CorrelationHistogram(window, counts, N, seq.order, seq.predicate)


def s_lambda(seq: FareySequence, lam) -> float:
    """Normalised pair count ``#{pairs with scaled gap in (0, lam)} / N``."""
    hist = pair_correlation(seq, WindowSpec(lam, 1))
    return hist.total / hist.N


# --------------------------------------------------------------------------
# brute-force oracles


@dataclass(frozen=True, eq=False)
class PairGaps:
    """Exact circular gaps ``num/den`` of ordered pairs, with ``max(q1, q2)`` per pair."""

    num: np.ndarray
    den: np.ndarray
    qmax: np.ndarray


def naive_gaps(seq: FareySequence, lambda_max, block: int = 1024) -> PairGaps:
    """All ordered pairs of ``seq`` that fall in the window of some sub-order.

    Every pair ``(i, j)``, ``i != j``, is examined (O(N^2)).  A pair is kept
    when ``N_Q * gap < lambda_max`` for ``Q = max(q_i, q_j)``, the smallest
    order at which both fractions are present; ``N_Q`` counts the elements of
    ``seq`` with denominator ``<= Q``.  Sub-order histograms can then be read
    off with :func:`histogram_from_gaps`.
    """
    lam = to_fraction(lambda_max)
    a, q = seq.numerators, seq.denominators
    x = seq.values()
    n_at = np.cumsum(np.bincount(q, minlength=seq.order + 1))  # N_Q for each Q
    loose = float(lam) * (1 + 1e-9) + 1e-9
    wide = max(lam.denominator, lam.numerator) * seq.count * seq.order**2 >= INT64_MAX
    keep_num, keep_den, keep_q = [], [], []
    for s in range(0, seq.count, block):
        rows = slice(s, min(s + block, seq.count))
        diff = (x[None, :] - x[rows, None]) % 1.0
        qm = np.maximum(q[rows, None], q[None, :])
        cand = np.nonzero(diff * n_at[qm] < loose)
        ii = cand[0] + s
        jj = cand[1]
        ii, jj = ii[ii != jj], jj[ii != jj]
        num = a[jj] * q[ii] - a[ii] * q[jj]
        den = q[ii] * q[jj]
        num = np.where(num < 0, num + den, num)
        qm = np.maximum(q[ii], q[jj])
        lhs, rhs = n_at[qm] * num, den
        if wide:
            lhs, rhs = _widen(lhs, rhs)
        exact = (num > 0) & (lhs * lam.denominator < lam.numerator * rhs)
        keep_num.append(num[exact])
        keep_den.append(den[exact])
        keep_q.append(qm[exact])
    cat = lambda xs: np.concatenate(xs) if xs else np.empty(0, dtype=np.int64)
    return PairGaps(cat(keep_num), cat(keep_den), cat(keep_q))


def histogram_from_gaps(
    gaps: PairGaps, Q: int, N: int, window: WindowSpec, predicate: DenominatorPredicate
) -> CorrelationHistogram:
    sel = gaps.qmax <= Q
    num, den = gaps.num[sel], gaps.den[sel]
    if num.size and _needs_wide(window, int(gaps.qmax[sel].max()), N):
        num, den = _widen(num, den)
    inside, idx = _classify(num, den, N, window)
    counts = np.bincount(idx, minlength=window.bins).astype(np.int64)
    return CorrelationHistogram(window, counts, N, Q, predicate)


def pair_correlation_naive(seq: FareySequence, window: WindowSpec) -> CorrelationHistogram:
    """O(N^2) reference for :func:`pair_correlation`."""
    _check_window(seq, window)
    gaps = naive_gaps(seq, window.lambda_max)
    return histogram_from_gaps(gaps, seq.order, seq.count, window, seq.predicate)


# --------------------------------------------------------------------------
# lattice count


@dataclass(frozen=True)
class LatticeRegion:
    """The square ``[1, R]^2`` with side conditions ``(a, r1) = (b, r2) = 1``; weight 1."""

    R: int
    r1: int = 1
    r2: int = 1

    def __post_init__(self):
        if min(self.R, self.r1, self.r2) < 1:
            raise PreconditionError("R, r1, r2 must be positive")


@dataclass(frozen=True)
class LatticeCount:
    exact_count: int
    main_term: float
    P: float

    @property
    def ratio(self) -> float:
        return self.exact_count / self.main_term


def lattice_points(region: LatticeRegion, tables: SieveTables, block: int = 2048) -> int:
    """Brute-force count of square-free, coprime ``(a, b)`` in ``[1, R]^2`` meeting the side conditions."""
    R = region.R
    if R > tables.bound:
        raise OutOfRangeError(f"R={R} exceeds sieve bound {tables.bound}")
    v = np.arange(1, R + 1, dtype=np.int64)
    sf = tables.squarefree[1 : R + 1]
    A = v[sf & (np.gcd(v, region.r1) == 1)]
    B = v[sf & (np.gcd(v, region.r2) == 1)]
    total = 0
    for s in range(0, A.size, block):
        total += int(np.count_nonzero(np.gcd.outer(A[s : s + block], B) == 1))
    return total


def lattice_count(region: LatticeRegion, tables: SieveTables, prime_cutoff: int | None = None) -> LatticeCount:
    """Exact lattice count against the main term ``(6 P / pi^2) R^2``.

    The area of ``[1, R]^2`` is taken as ``R^2``; the boundary strip is
    left in the observed error.
    """
    cutoff = prime_cutoff or default_prime_cutoff()
    P = lattice_constant(region.r1, region.r2, cutoff, tables)
    main = 6.0 * P / math.pi**2 * region.R**2
    return LatticeCount(lattice_points(region, tables), main, P)


# --------------------------------------------------------------------------
# convergence along an order ladder


def limit_integral(lam, pred: DenominatorPredicate, cutoff: int, tables: SieveTables) -> float:
    """Limiting value of ``S_Lambda``: the g2 integral, or the Boca-Zaharescu one for ``pred=all``."""
    if pred.kind == "squarefree":
        return g2_integral_exact(float(lam), cutoff, tables)
    if pred.kind == "all":
        return boca_zaharescu_integral_exact(float(lam), tables)
    raise PreconditionError(f"no limiting curve for predicate {pred}")


def convergence_ladder(qs, lambdas, pred: DenominatorPredicate, cutoff: int, band: float = 0.15, workers: int = 1) -> list[dict]:
    """Compare ``S_Lambda(Q)`` with its limit for every ``Lambda`` along the orders ``qs``.

    A case passes when the absolute deviation strictly decreases along the
    ladder and the final relative deviation is below ``band``.
    """
    qs = sorted(qs)
    lam_max = max(float(L) for L in lambdas)
    tables = build_sieve(max(qs[-1], math.ceil(math.pi**2 * lam_max / 3) + 1, 2))
    target = {L: limit_integral(L, pred, cutoff, tables) for L in lambdas}
    s_vals = {L: [] for L in lambdas}
    for Q in qs:
        seq = enumerate_farey(Q, pred, tables)
        for L in lambdas:
            hist = pair_correlation(seq, WindowSpec(L, 1), workers=workers)
            s_vals[L].append(hist.total / hist.N)
    cases = []
    for L in lambdas:
        devs = [abs(s - target[L]) for s in s_vals[L]]
        decreasing = all(b < a for a, b in zip(devs, devs[1:]))
        final_rel = devs[-1] / target[L]
        cases.append({
            "case": f"Lambda={L}", "Lambda": str(L), "Q": qs, "S": s_vals[L],
            "limit": target[L], "deviation": devs, "strictly_decreasing": decreasing,
            "final_relative_deviation": final_rel, "within_band": final_rel < band,
            "passed": decreasing and final_rel < band,
        })
    return cases
