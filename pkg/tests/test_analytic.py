import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fareycorr import build_sieve
from fareycorr.analytic import (
    CUTOFF_ENV_VAR,
    DEFAULT_PRIME_CUTOFF,
    CurveSpec,
    Route,
    base_local_factor_exact,
    base_product_C,
    boca_zaharescu,
    carefree_delta,
    coprime_m_curve,
    curve_eval,
    default_prime_cutoff,
    fm,
    fm_closed,
    fm_closed_corrected,
    fm_factorization,
    g2,
    g2_curve,
    g2_integral,
    g2_integral_exact,
    gue,
    lattice_constant,
    support_threshold,
)
from fareycorr.arith import primes_upto, small_factorize
from fareycorr.errors import ConfigurationError, PreconditionError

CUT = 10**6

# Independent high-precision values (prime zeta series, 40 digits), frozen.
DELTA_DIGITS = "0.70444220099916559273661"
C_DIGITS = "0.47168061361299786807524"
DELTA_TRUE = float(DELTA_DIGITS)
C_TRUE = float(C_DIGITS)


def test_golden_constants_recomputed_with_mpmath():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    P = {n: mp.primezeta(n) for n in range(2, 200)}
    s5 = mp.sqrt(5)
    r1, r2 = (-1 + s5) / 2, (-1 - s5) / 2
    # log(1 - 1/(p(p+1))) = log(1 + u - u^2) - log(1 + u), u = 1/p
    log_delta = mp.fsum((-(r1**n + r2**n) - (-1) ** (n + 1)) / n * P[n] for n in P)
    # log((p-1)(p+2)/(p(p+1))) = log(1-u) + log(1+2u) - log(1+u); p = 2 split off
    coef = lambda n: (-1 + (-1) ** (n + 1) * (2**n - 1)) / mp.mpf(n)
    log_c = mp.log(mp.mpf(2) / 3) + mp.fsum(coef(n) * (P[n] - mp.mpf(2) ** -n) for n in P)
    assert abs(mp.exp(log_delta) - mp.mpf(DELTA_DIGITS)) < 1e-17
    assert abs(mp.exp(log_c) - mp.mpf(C_DIGITS)) < 1e-17


@pytest.mark.parametrize("cutoff", [10**3, 10**4, 10**5, 10**6, 10**7])
def test_truncation_within_declared_tail(cutoff):
    for ev, truth in ((carefree_delta(cutoff), DELTA_TRUE), (base_product_C(cutoff), C_TRUE)):
        assert ev.prime_cutoff == cutoff
        assert abs(math.log(truth / ev.value)) <= ev.tail_error_estimate
        assert ev.value > truth  # every local factor is below 1


def test_tiny_cutoffs_exact():
    assert carefree_delta(2).value == pytest.approx(5 / 6, rel=1e-15)
    seven = float(Fraction(5, 6) * Fraction(11, 12) * Fraction(29, 30) * Fraction(55, 56))
    assert carefree_delta(7).value == pytest.approx(seven, rel=1e-15)
    assert base_product_C(2).value == pytest.approx(2 / 3, rel=1e-15)
    with pytest.raises(PreconditionError):
        carefree_delta(1)


def test_delta_strictly_decreasing_in_cutoff():
    values = [carefree_delta(c).value for c in (2, 3, 5, 7, 11, 100, 1000, 10**5)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert 0 < values[-1] < 1


def test_local_factor_identity_exact():
    for p in primes_upto(1000).tolist():
        lhs, rhs = base_local_factor_exact(p)
        assert lhs == rhs


def test_default_cutoff_env(monkeypatch):
    monkeypatch.delenv(CUTOFF_ENV_VAR, raising=False)
    assert default_prime_cutoff() == DEFAULT_PRIME_CUTOFF
    monkeypatch.setenv(CUTOFF_ENV_VAR, "100000")
    assert default_prime_cutoff() == 100_000
    monkeypatch.setenv(CUTOFF_ENV_VAR, "lots")
    with pytest.raises(ConfigurationError):
        default_prime_cutoff()


# --------------------------------------------------------------------------
# F(m)


def fp_over_c_oracle(m):
    """Exact F(m)/C from the factorization sum, enumerating every (beta, d1, d2, r)."""

    def mu(n):
        f = small_factorize(n)
        return 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)

    divs = [d for d in range(1, m + 1) if m % d == 0]
    total = Fraction(0)
    for beta, d1, d2 in product(divs, repeat=3):
        if m % (beta * d1 * d2):
            continue
        if math.gcd(beta, d1 * d2) != 1 or mu(beta) == 0 or mu(d1) == 0 or mu(d2) == 0:
            continue
        r = m // (beta * d1 * d2)
        term = Fraction(r * mu(d1) * mu(d2))
        for p in small_factorize(beta):
            term *= Fraction(p * (p - 1), p * p + p - 2)
        for p in small_factorize(d1):
            term *= 1 - Fraction(1, p)
        for p in small_factorize(d2):
            term *= 1 - Fraction(1, p)
        for p in small_factorize(math.gcd(d1, d2)):
            term /= 1 - Fraction(1, p * p)
        for p in small_factorize(d1 * d2):
            term /= Fraction((p - 1) * (p + 2), p * (p + 1))
        total += term
    return total


def test_factorization_route_against_exhaustive_oracle(tables):
    C = base_product_C(CUT).value
    for m in list(range(1, 61)) + [64, 72, 90, 96, 210, 360]:
        assert fm_factorization(m, CUT, tables).value / C == pytest.approx(float(fp_over_c_oracle(m)), rel=1e-12)


def test_small_m_values(tables):
    C = base_product_C(CUT).value
    for route in Route:
        assert fm(1, CUT, tables, route).value == pytest.approx(C, rel=1e-15)
    assert fm_factorization(2, CUT, tables).value == pytest.approx(C, rel=1e-12)
    assert fm_closed_corrected(12, CUT, tables).value == pytest.approx(
        fm_factorization(12, CUT, tables).value, rel=1e-12
    )


def test_literal_closed_form_differs_at_two(tables):
    # The literal transcription carries the square-part factor upside down.
    C = base_product_C(CUT).value
    assert fm_closed(2, CUT, tables).value / C == pytest.approx(11 / 12, rel=1e-12)
    assert fm_factorization(2, CUT, tables).value / C == pytest.approx(1.0, rel=1e-12)


def test_corrected_closed_form_matches_factorization(tables):
    for m in range(1, 501):
        a = fm_closed_corrected(m, CUT, tables).value
        b = fm_factorization(m, CUT, tables).value
        assert abs(a - b) <= 1e-9 * max(1.0, b)


def test_fm_positive_and_prime_values(tables):
    C = base_product_C(CUT).value
    for m in range(1, 501):
        assert fm_factorization(m, CUT, tables).value > 0
    for p in primes_upto(500).tolist():
        assert fm_factorization(p, CUT, tables).value == pytest.approx(C * (p - 1), rel=1e-12)


_T = build_sieve(5000)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 70), st.integers(1, 70))
def test_fm_over_c_multiplicative(m, n):
    if math.gcd(m, n) != 1:
        return
    C = base_product_C(CUT).value
    f = lambda k: fm_factorization(k, CUT, _T).value / C
    assert f(m * n) == pytest.approx(f(m) * f(n), rel=1e-11)


def test_fm_memo_thread_safe(tables):
    ms = list(range(1, 301)) * 4
    with ThreadPoolExecutor(8) as pool:
        got = list(pool.map(lambda m: fm_factorization(m, 10**5, tables).value, ms))
    assert got[:300] == got[300:600] == got[900:]


# --------------------------------------------------------------------------
# g2


def test_g2_support(tables):
    t = support_threshold(CUT)
    assert 0.2 < t < 0.22
    assert g2(0.0, CUT, tables) == 0.0
    assert g2(0.2, CUT, tables) == 0.0
    assert g2(t, CUT, tables) == 0.0
    assert g2(t + 1e-6, CUT, tables) > 0.0
    grid = np.linspace(0, t, 50)
    assert np.all(g2_curve(grid, CUT, tables) == 0.0)


def test_g2_single_term_regime(tables):
    delta = carefree_delta(CUT).value
    C = base_product_C(CUT).value
    for lam in np.linspace(3 * delta / math.pi**2 * 1.01, 6 * delta / math.pi**2 * 0.99, 7):
        one = 6 / (lam**2 * math.pi**2) * C * math.log(lam * math.pi**2 / (3 * delta))
        assert g2(lam, CUT, tables) == pytest.approx(one, rel=1e-13)


def test_g2_nonnegative_and_flattens(tables):
    grid = np.linspace(1e-3, 10, 2000)
    vals = g2_curve(grid, CUT, tables)
    assert np.all(vals >= 0)
    tail = g2_curve(np.linspace(8, 10, 201), CUT, tables)
    assert (tail.max() - tail.min()) / tail.mean() < 0.05


def test_g2_routes_agree_on_corrected_form(tables):
    lams = np.linspace(0.1, 6, 80)
    a = g2_curve(lams, CUT, tables, Route.FACTORIZATION_SUM)
    b = g2_curve(lams, CUT, tables, Route.CORRECTED_CLOSED_FORM)
    assert np.allclose(a, b, rtol=1e-12, atol=0)


def test_g2_integral(tables):
    t = support_threshold(CUT)
    assert g2_integral(t, 0.01, CUT, tables) == 0.0
    assert g2_integral_exact(t * 0.99, CUT, tables) == 0.0
    exact = g2_integral_exact(4.0, CUT, tables)
    mid = g2_integral(4.0, 1e-3, CUT, tables, rule="midpoint")
    trap = g2_integral(4.0, 1e-3, CUT, tables, rule="trapezoid")
    assert abs(mid - trap) < 1e-4
    assert abs(mid - exact) < 1e-4
    # refinement: the step h and h/2 answers close in on each other
    coarse = abs(g2_integral(4.0, 0.02, CUT, tables) - exact)
    fine = abs(g2_integral(4.0, 0.01, CUT, tables) - exact)
    assert fine < coarse
    with pytest.raises(PreconditionError):
        g2_integral(1.0, 0.0, CUT, tables)


# --------------------------------------------------------------------------
# comparison curves


def test_reference_curves(tables):
    assert curve_eval(CurveSpec("poisson"), 3.7, tables) == 1.0
    assert curve_eval(CurveSpec("gue"), 0.5, tables) == pytest.approx(1 - 4 / math.pi**2, rel=1e-15)
    assert float(gue(0.0)) == 0.0
    assert gue(np.array([1.0, 2.0])) == pytest.approx([1.0, 1.0])
    t = 3 / math.pi**2
    assert boca_zaharescu(t, tables) == 0.0
    assert boca_zaharescu(t * 0.5, tables) == 0.0
    assert boca_zaharescu(t + 1e-4, tables) > 0.0
    assert curve_eval(CurveSpec("g2", prime_cutoff=CUT), 1.0, tables) == g2(1.0, CUT, tables)


def test_coprime_m_curve_needs_constant(tables):
    with pytest.raises(ConfigurationError):
        CurveSpec("coprime_m", m=2)
    with pytest.raises(ConfigurationError):
        CurveSpec("coprime_m", m=2, c_m=-1.0)
    spec = CurveSpec("coprime_m", m=2, c_m=0.5)
    assert curve_eval(spec, 0.2, tables) == 0.0  # 2x/c_m < 1: empty sum
    assert curve_eval(spec, 2.0, tables) > 0.0
    assert coprime_m_curve(0.0, 2, 0.5, tables) == 0.0


def test_lattice_constant_reduces_to_base_product(tables):
    C = base_product_C(CUT).value
    assert lattice_constant(1, 1, CUT, tables) == pytest.approx(C, rel=1e-15)
    # (r1, r2) = (2, 1): phi(2)/2 and the p = 2 factor removed from C
    assert lattice_constant(2, 1, CUT, tables) == pytest.approx(C * 0.5 / (2 / 3), rel=1e-15)
