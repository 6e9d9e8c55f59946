import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fareycorr import build_sieve
from fareycorr.empirical import (
    LatticeRegion,
    WindowSpec,
    lattice_count,
    lattice_points,
    pair_correlation,
    pair_correlation_naive,
    s_lambda,
)
from fareycorr.errors import OutOfRangeError, PreconditionError
from fareycorr.farey import ALL, PRIME, SQUAREFREE, coprime_to, enumerate_farey


def fraction_pairs_oracle(seq, lam, bins):
    """Pure-Fraction double loop: ordered pairs, gap ``(g2 - g1) mod 1`` scaled by N."""
    xs = list(seq)
    N = len(xs)
    lam = Fraction(lam)
    counts = [0] * bins
    for g1 in xs:
        for g2 in xs:
            if g1 == g2:
                continue
            s = N * ((g2 - g1) % 1)
            if 0 < s < lam:
                counts[math.ceil(s * bins / lam) - 1] += 1
    return counts


def test_two_element_example(tables):
    seq = enumerate_farey(2, SQUAREFREE, tables)
    hist = pair_correlation(seq, WindowSpec("1.5", 1))
    assert hist.counts.tolist() == [2]
    assert hist.density()[0] == pytest.approx(2 / 3)
    assert s_lambda(seq, "1.5") == 1.0


def test_tiny_window_is_empty(tables):
    seq = enumerate_farey(100, SQUAREFREE, tables)
    hist = pair_correlation(seq, WindowSpec("0.05", 5))
    assert hist.total == 0
    assert s_lambda(seq, Fraction(1, 10**9)) == 0.0


def test_window_edges_exact():
    w = WindowSpec("0.3", 7)
    edges = w.edges()
    assert edges[0] == 0 and edges[-1] == Fraction(3, 10)
    assert w.bin_width * 7 == w.lambda_max


def test_window_errors(tables):
    with pytest.raises(PreconditionError):
        WindowSpec(0, 1)
    with pytest.raises(PreconditionError):
        WindowSpec(1, 0)
    seq = enumerate_farey(2, SQUAREFREE, tables)
    with pytest.raises(PreconditionError):
        pair_correlation(seq, WindowSpec(2, 1))  # N = 2 <= Lambda
    with pytest.raises(PreconditionError):
        pair_correlation(enumerate_farey(1, ALL, tables), WindowSpec("0.5", 1))


@pytest.mark.parametrize("pred", [ALL, SQUAREFREE, PRIME, coprime_to(2)])
def test_sweep_matches_fraction_double_loop(tables, pred):
    for Q in (5, 12, 25):
        seq = enumerate_farey(Q, pred, tables)
        for lam, bins in (("0.5", 1), ("1", 3), ("2.5", 4), ("4", 8)):
            if seq.count <= Fraction(lam):
                continue
            hist = pair_correlation(seq, WindowSpec(lam, bins))
            assert hist.counts.tolist() == fraction_pairs_oracle(seq, lam, bins)


def test_sweep_matches_naive_with_bins(tables):
    seq = enumerate_farey(120, SQUAREFREE, tables)
    w = WindowSpec("3.7", 37)
    assert pair_correlation(seq, w).same_counts(pair_correlation_naive(seq, w))


def test_direction_symmetry(tables):
    seq = enumerate_farey(400, coprime_to(3), tables)
    w = WindowSpec("2", 16)
    fwd = pair_correlation(seq, w, direction=1)
    bwd = pair_correlation(seq, w, direction=-1)
    assert fwd.same_counts(bwd)


def test_thread_count_does_not_change_counts(tables):
    seq = enumerate_farey(800, SQUAREFREE, tables)
    w = WindowSpec("4", 40)
    base = pair_correlation(seq, w, workers=1)
    for workers in (2, 3, 8):
        assert pair_correlation(seq, w, workers=workers).same_counts(base)


def test_boundary_exactness(tables):
    # Q = 5, square-free: N = 8 and the gap 1/2 - 1/3 = 1/6 scales to exactly 4/3.
    seq = enumerate_farey(5, SQUAREFREE, tables)
    at = pair_correlation(seq, WindowSpec(Fraction(4, 3), 1)).total
    above = pair_correlation(seq, WindowSpec(Fraction(4, 3) + Fraction(1, 10**18), 1)).total
    below = pair_correlation(seq, WindowSpec(Fraction(4, 3) - Fraction(1, 10**18), 1)).total
    assert at == below  # open window excludes the boundary gap
    assert above > at
    for lam in (Fraction(4, 3) + Fraction(1, 10**18), Fraction(4, 3) - Fraction(1, 10**18)):
        w = WindowSpec(lam, 3)
        assert pair_correlation(seq, w).same_counts(pair_correlation_naive(seq, w))
    # a gap landing exactly on an inner bin edge goes to the lower bin
    hist = pair_correlation(seq, WindowSpec(Fraction(8, 3), 2))
    assert hist.counts.tolist() == fraction_pairs_oracle(seq, Fraction(8, 3), 2)


def test_decimal_window_is_exact(tables):
    seq = enumerate_farey(5, SQUAREFREE, tables)
    a = pair_correlation(seq, WindowSpec("1.3", 1)).total
    b = pair_correlation(seq, WindowSpec(Fraction(13, 10), 1)).total
    assert a == b


_T = build_sieve(200)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(3, 40),
    st.sampled_from(["all", "squarefree", "prime", "coprime:2"]),
    st.fractions(min_value=Fraction(1, 10), max_value=Fraction(5)),
    st.integers(1, 6),
)
def test_sweep_naive_property(Q, pred, lam, bins):
    from fareycorr.farey import DenominatorPredicate

    seq = enumerate_farey(Q, DenominatorPredicate.parse(pred), _T)
    if seq.count < 2 or seq.count <= lam:
        return
    w = WindowSpec(lam, bins)
    assert pair_correlation(seq, w).same_counts(pair_correlation_naive(seq, w))


# --------------------------------------------------------------------------
# lattice


def lattice_oracle(R, r1, r2):
    sf = [all(n % (p * p) for p in range(2, math.isqrt(n) + 1)) for n in range(R + 1)]
    return sum(
        1
        for a in range(1, R + 1)
        for b in range(1, R + 1)
        if sf[a] and sf[b] and math.gcd(a, b) == 1 and math.gcd(a, r1) == 1 and math.gcd(b, r2) == 1
    )


def test_lattice_small(tables):
    assert lattice_points(LatticeRegion(1), tables) == 1
    for r1, r2 in ((1, 1), (2, 3), (6, 6), (3, 4)):
        assert lattice_points(LatticeRegion(30, r1, r2), tables) == lattice_oracle(30, r1, r2)


def test_lattice_count_fields(tables):
    lc = lattice_count(LatticeRegion(400, 3, 4), tables, prime_cutoff=10**6)
    assert lc.exact_count == lattice_points(LatticeRegion(400, 3, 4), tables)
    assert lc.main_term == pytest.approx(6 * lc.P / math.pi**2 * 400**2)
    assert abs(lc.ratio - 1) < 0.05


def test_lattice_errors(tables):
    with pytest.raises(PreconditionError):
        LatticeRegion(0)
    with pytest.raises(OutOfRangeError):
        lattice_points(LatticeRegion(tables.bound + 1), tables)
