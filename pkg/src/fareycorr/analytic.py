"""Limiting pair-correlation curves and the prime products behind them.

Conventions used throughout:

* ``delta`` is the carefree-type constant ``prod_p (1 - 1/(p(p+1)))``.
* ``C`` is ``prod_p (1 - 1/(p(p+1))) (1 - 1/(p^2+p-1))``; each local factor
  simplifies to ``(p-1)(p+2)/(p(p+1))``.
* Prime products are truncated at ``prime_cutoff``; a product restricted to
  primes coprime to ``d`` is the full product with the factors at ``p | d``
  divided out.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import SieveTables, divisors, primes_upto
from .errors import ConfigurationError, OutOfRangeError, PreconditionError

DEFAULT_PRIME_CUTOFF = 10**7
CUTOFF_ENV_VAR = "FAREYCORR_PRIME_CUTOFF"

PI2 = math.pi**2


def default_prime_cutoff() -> int:
    """Prime cutoff from ``$FAREYCORR_PRIME_CUTOFF``, else ``10**7``."""
    raw = os.environ.get(CUTOFF_ENV_VAR)
    if not raw:
        return DEFAULT_PRIME_CUTOFF
    try:
        value = int(float(raw))
    except ValueError as exc:
        raise ConfigurationError(f"{CUTOFF_ENV_VAR}={raw!r} is not an integer") from exc
    if value < 2:
        raise ConfigurationError(f"{CUTOFF_ENV_VAR} must be >= 2")
    return value


@dataclass(frozen=True)
class EulerProductValue:
    """A prime product truncated at ``prime_cutoff``.

    ``tail_error_estimate`` bounds ``|log(true / value)|`` for products whose
    local factors satisfy ``|log f_p| <= 2/p**2``.
    """

    value: float
    prime_cutoff: int
    tail_error_estimate: float


def tail_error_estimate(cutoff: int) -> float:
    # sum_{p > X} 2/p^2 ~ 2/(X log X), doubled for safety
    return 2.0 * 2.0 / (cutoff * math.log(cutoff))


def _log_product(log1p_args) -> float:
    return math.fsum(np.log1p(log1p_args).tolist())


@lru_cache(maxsize=16)
def carefree_delta(prime_cutoff: int) -> EulerProductValue:
    """``prod_{p <= cutoff} (1 - 1/(p(p+1)))``."""
    if prime_cutoff < 2:
        raise PreconditionError("prime_cutoff must be >= 2")
    p = primes_upto(prime_cutoff).astype(np.float64)
    value = math.exp(_log_product(-1.0 / (p * (p + 1.0))))
    return EulerProductValue(value, prime_cutoff, tail_error_estimate(prime_cutoff))


def base_local_factor(p: int) -> float:
    """``(1 - 1/(p(p+1))) (1 - 1/(p^2+p-1))`` in its simplified form."""
    return (p - 1) * (p + 2) / (p * (p + 1))


def base_local_factor_exact(p: int) -> tuple[Fraction, Fraction]:
    """Both the product form and the simplified form of the local factor, exactly."""
    product = (1 - Fraction(1, p * (p + 1))) * (1 - Fraction(1, p * p + p - 1))
    simplified = Fraction((p - 1) * (p + 2), p * (p + 1))
    return product, simplified


@lru_cache(maxsize=16)
def base_product_C(prime_cutoff: int) -> EulerProductValue:
    """``prod_{p <= cutoff} (p-1)(p+2)/(p(p+1))``."""
    if prime_cutoff < 2:
        raise PreconditionError("prime_cutoff must be >= 2")
    p = primes_upto(prime_cutoff).astype(np.float64)
    value = math.exp(_log_product(-2.0 / (p * (p + 1.0))))
    return EulerProductValue(value, prime_cutoff, tail_error_estimate(prime_cutoff))


def base_product_coprime(primes, prime_cutoff: int) -> float:
    """``C`` restricted to primes not in ``primes``."""
    value = base_product_C(prime_cutoff).value
    for p in primes:
        if p <= prime_cutoff:
            value /= base_local_factor(p)
    return value


def support_threshold(prime_cutoff: int) -> float:
    """Left end ``3 delta / pi^2`` of the support of g2."""
    return 3.0 * carefree_delta(prime_cutoff).value / PI2


# --------------------------------------------------------------------------
# F(m)


class Route(str, Enum):
    CLOSED_FORM = "closed_form"
    FACTORIZATION_SUM = "factorization_sum"
    CORRECTED_CLOSED_FORM = "corrected_closed_form"


@dataclass(frozen=True)
class FmValue:
    m: int
    value: float
    route: Route
    prime_cutoff: int


_fm_cache: dict[tuple[Route, int, int], float] = {}
_fm_lock = threading.Lock()


def _squarefree_divisors(primes: list[int]) -> list[int]:
    divs = [1]
    for p in primes:
        divs += [d * p for d in divs]
    return sorted(divs)


def _primes_of(n: int, tables: SieveTables) -> list[int]:
    if n > tables.bound:
        raise OutOfRangeError(f"{n} exceeds sieve bound {tables.bound}")
    return tables.prime_factors(n)


def _phi_over(d: int, tables: SieveTables) -> float:
    return int(tables.phi[d]) / d


def _nested_product(n: int, p: int, d: int, tables: SieveTables) -> float:
    # prod over p' | n/p with (p', d p) = 1 of (1 + (p'-1)/(p'^2+p'-2))
    out = 1.0
    for q in _primes_of(n // p, tables):
        if (d * p) % q:
            out *= 1.0 + (q - 1) / (q * q + q - 2)
    return out


def _fm_closed_literal(m: int, cutoff: int, tables: SieveTables) -> float:
    total = 0.0
    for d in divisors(m, tables):
        if tables.mu[d] == 0:
            continue
        dp = _primes_of(d, tables)
        term = int(tables.mu[d]) * _phi_over(d, tables) / d * base_product_coprime(dp, cutoff)
        n = m // d
        for p in _primes_of(n, tables):
            inner = _nested_product(n, p, d, tables)
            if d % p:
                term *= 1.0 - (p - 1) * (p * p + p - 2) / (p**3 * (p + 1)) * inner
            else:
                term *= 1.0 - inner / (p + 1)
        total += term
    return m * total


def _fm_closed_corrected(m: int, cutoff: int, tables: SieveTables) -> float:
    total = 0.0
    for d in divisors(m, tables):
        if tables.mu[d] == 0:
            continue
        dp = _primes_of(d, tables)
        term = int(tables.mu[d]) * _phi_over(d, tables) / d * base_product_coprime(dp, cutoff)
        for p in _primes_of(m // d, tables):
            if d % p:
                term *= (p * p + 2 * p - 1) / (p * (p + 2))
            else:
                term *= p / (p + 1)
        total += term
    return m * total


def _p_beta(beta_primes: list[int]) -> float:
    return math.prod(p * (p - 1) / (p * p + p - 2) for p in beta_primes)


def _p_d1_d2(d1: int, d2: int, cutoff: int, tables: SieveTables) -> float:
    p1 = _primes_of(d1, tables)
    p2 = _primes_of(d2, tables)
    value = math.prod(1.0 - 1.0 / p for p in p1)
    value *= math.prod(1.0 - 1.0 / p for p in p2)
    for p in _primes_of(math.gcd(d1, d2), tables):
        value /= 1.0 - 1.0 / (p * p)
    return value * base_product_coprime(sorted(set(p1) | set(p2)), cutoff)


def _fm_factorization(m: int, cutoff: int, tables: SieveTables) -> float:
    primes = _primes_of(m, tables)
    sqf = _squarefree_divisors(primes)
    total = 0.0
    for beta in sqf:
        rest_b = m // beta
        pb = _p_beta(_primes_of(beta, tables))
        for d1 in sqf:
            if rest_b % d1 or math.gcd(beta, d1) != 1:
                continue
            rest_1 = rest_b // d1
            for d2 in sqf:
                if rest_1 % d2 or math.gcd(beta, d2) != 1:
                    continue
                r = rest_1 // d2
                sign = int(tables.mu[d1]) * int(tables.mu[d2])
                total += r * sign * pb * _p_d1_d2(d1, d2, cutoff, tables)
    return total


_ROUTES = {
    Route.CLOSED_FORM: _fm_closed_literal,
    Route.FACTORIZATION_SUM: _fm_factorization,
    Route.CORRECTED_CLOSED_FORM: _fm_closed_corrected,
}


def fm(m: int, cutoff: int, tables: SieveTables, route: Route = Route.FACTORIZATION_SUM) -> FmValue:
    """Evaluate ``F(m)`` by the requested route (memoized per ``(route, m, cutoff)``)."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    route = Route(route)
    key = (route, m, cutoff)
    with _fm_lock:
        cached = _fm_cache.get(key)
    if cached is None:
        cached = _ROUTES[route](m, cutoff, tables)
        with _fm_lock:
            _fm_cache[key] = cached
    return FmValue(m, cached, route, cutoff)


def fm_closed(m: int, cutoff: int, tables: SieveTables) -> FmValue:
    """Closed form of F(m) transcribed term by term.

    The outer sum runs over square-free ``d | m`` with weight
    ``mu(d) phi(d) / d^2`` times ``C`` restricted to ``(p, d) = 1``; each prime
    ``p | m/d`` then contributes

    * ``1 - (p-1)(p^2+p-2)/(p^3(p+1)) * N(p)`` when ``p`` does not divide ``d``,
    * ``1 - N(p)/(p+1)`` when ``p | d``,

    where ``N(p)`` is the product of ``1 + (p'-1)/(p'^2+p'-2)`` over primes
    ``p' | m/(dp)`` coprime to ``dp``.

    This transcription does not agree with :func:`fm_factorization`; already
    ``F(2) = 11/12 * C`` here against ``C`` there.  See
    :func:`fm_closed_corrected` for a closed form that does agree.
    """
    return fm(m, cutoff, tables, Route.CLOSED_FORM)


def fm_closed_corrected(m: int, cutoff: int, tables: SieveTables) -> FmValue:
    """Closed form of F(m) obtained by resumming the factorization sum.

    Summing the factorization sum over ``d2`` prime by prime leaves, for each
    square-free ``d | m`` with the same outer weight as :func:`fm_closed`, the
    local factors ``(p^2+2p-1)/(p(p+2))`` for ``p | m/d`` with ``p`` not
    dividing ``d``, and ``p/(p+1)`` for ``p | m/d`` with ``p | d``.
    """
    return fm(m, cutoff, tables, Route.CORRECTED_CLOSED_FORM)


def fm_factorization(m: int, cutoff: int, tables: SieveTables) -> FmValue:
    """Reference evaluation of F(m) as a sum over factorizations.

    Sums ``r mu(d1) mu(d2) mu(beta)^2 P_beta P_{d1,d2}`` over all ordered
    ``m = beta d1 d2 r`` with ``gcd(beta, d1 d2) = 1``, where

    * ``P_beta = prod_{p | beta} p(p-1)/(p^2+p-2)``,
    * ``P_{d1,d2} = prod_{p|d1}(1-1/p) prod_{p|d2}(1-1/p)
      prod_{p|gcd(d1,d2)}(1-1/p^2)^-1`` times ``C`` restricted to
      ``(p, d1 d2) = 1``.
    """
    return fm(m, cutoff, tables, Route.FACTORIZATION_SUM)


def fm_values(mmax: int, cutoff: int, tables: SieveTables, route: Route = Route.FACTORIZATION_SUM) -> np.ndarray:
    """``F(0..mmax)`` as an array with ``F(0) = 0`` as padding."""
    out = np.zeros(mmax + 1)
    for m in range(1, mmax + 1):
        out[m] = fm(m, cutoff, tables, route).value
    return out


# --------------------------------------------------------------------------
# g2 and its integral


def _g2_terms_needed(lam_max: float, delta: float) -> int:
    return max(0, math.ceil(lam_max * PI2 / (3.0 * delta)))


def g2_curve(
    lams,
    cutoff: int,
    tables: SieveTables,
    route: Route = Route.FACTORIZATION_SUM,
) -> np.ndarray:
    """Vectorised g2.

    ``g2(x) = 6/(x^2 pi^2) * sum_{1 <= m < x pi^2/(3 delta)} F(m) log(x pi^2/(3 m delta))``,
    and exactly 0 for ``x <= 3 delta / pi^2``.
    """
    lams = np.asarray(lams, dtype=np.float64)
    if np.any(lams < 0):
        raise PreconditionError("lambda must be >= 0")
    delta = carefree_delta(cutoff).value
    threshold = 3.0 * delta / PI2
    out = np.zeros(lams.shape)
    live = lams > threshold
    if not live.any():
        return out
    lv = lams[live]
    mmax = _g2_terms_needed(float(lv.max()), delta)
    F = fm_values(mmax, cutoff, tables, route)[1:]
    m = np.arange(1, mmax + 1, dtype=np.float64)
    x = lv * PI2 / (3.0 * delta)
    ratio = x[:, None] / m[None, :]
    logs = np.where(ratio > 1.0, np.log(np.maximum(ratio, 1.0)), 0.0)
    out[live] = 6.0 / (lv * lv * PI2) * (logs @ F)
    return out


def g2(lam: float, cutoff: int, tables: SieveTables, route: Route = Route.FACTORIZATION_SUM) -> float:
    """Limiting pair-correlation density of square-free-denominator Farey fractions.

    F(m) is taken from the factorization-sum route by default, which is the
    route the closed forms are validated against.
    """
    return float(g2_curve(np.array([lam]), cutoff, tables, route)[0])


def g2_integral(
    lambda_max: float,
    step: float,
    cutoff: int,
    tables: SieveTables,
    rule: str = "midpoint",
) -> float:
    """Quadrature of g2 over ``(0, lambda_max]``.

    The support threshold is an explicit breakpoint; ``[threshold, lambda_max]``
    is split into ``ceil(length/step)`` equal cells.  ``rule`` is
    ``"midpoint"`` or ``"trapezoid"``.
    """
    if step <= 0:
        raise PreconditionError("step must be > 0")
    lambda_max = float(lambda_max)
    t = support_threshold(cutoff)
    if lambda_max <= t:
        return 0.0
    n = max(1, math.ceil((lambda_max - t) / step))
    h = (lambda_max - t) / n
    if rule == "midpoint":
        nodes = t + h * (np.arange(n) + 0.5)
        return float(h * g2_curve(nodes, cutoff, tables).sum())
    if rule == "trapezoid":
        nodes = t + h * np.arange(n + 1)
        vals = g2_curve(nodes, cutoff, tables)
        return float(h * (vals.sum() - 0.5 * (vals[0] + vals[-1])))
    raise ValueError(f"unknown rule {rule!r}")


def g2_integral_exact(lambda_max: float, cutoff: int, tables: SieveTables) -> float:
    """``int_0^L g2`` from the antiderivative ``-(log(x/m) + 1)/lambda`` of each term."""
    L = float(lambda_max)
    delta = carefree_delta(cutoff).value
    c = PI2 / (3.0 * delta)
    if L * c <= 1.0:
        return 0.0
    mmax = _g2_terms_needed(L, delta)
    F = fm_values(mmax, cutoff, tables)
    total = 0.0
    for m in range(1, mmax + 1):
        if m < c * L:
            total += float(F[m]) * (c / m - (math.log(c * L / m) + 1.0) / L)
    return 6.0 / PI2 * total


# --------------------------------------------------------------------------
# comparison curves


@dataclass(frozen=True)
class CurveSpec:
    """Which pair-correlation curve to evaluate.

    ``kind`` is one of ``g2``, ``boca_zaharescu``, ``coprime_m``, ``gue`` or
    ``poisson``.  ``coprime_m`` needs ``m`` and an externally sourced ``c_m``.
    """

    kind: str
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF
    m: int | None = None
    c_m: float | None = None

    KINDS = ("g2", "boca_zaharescu", "coprime_m", "gue", "poisson")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigurationError(f"unknown curve kind {self.kind!r}")
        if self.kind == "coprime_m":
            if self.m is None or self.m < 1:
                raise ConfigurationError("coprime_m curve needs a positive m")
            if self.c_m is None or not self.c_m > 0:
                raise ConfigurationError("coprime_m curve needs a positive constant c_m")


def gue(lam):
    """``1 - (sin(pi x)/(pi x))^2``; ``np.sinc`` supplies the value 0 at x = 0."""
    return 1.0 - np.sinc(np.asarray(lam, dtype=np.float64)) ** 2


def boca_zaharescu(lam: float, tables: SieveTables) -> float:
    """``6/(pi^2 x^2) sum_{1 <= k < pi^2 x/3} phi(k) log(pi^2 x/(3k))``; 0 for ``x <= 3/pi^2``."""
    if lam < 0:
        raise PreconditionError("lambda must be >= 0")
    if lam <= 3.0 / PI2:
        return 0.0
    x = PI2 * lam / 3.0
    kmax = math.ceil(x) - 1
    if kmax > tables.bound:
        raise OutOfRangeError(f"need phi up to {kmax}, sieve bound is {tables.bound}")
    k = np.arange(1, kmax + 1)
    k = k[k < x]
    return float(6.0 / (PI2 * lam * lam) * np.sum(tables.phi[k] * np.log(x / k)))


def coprime_m_curve(lam: float, m: int, c_m: float, tables: SieveTables) -> float:
    """Comparison curve for denominators coprime to ``m`` with constant ``c_m``.

    ``phi(m) c_m/(m x^2) sum_{1 <= D <= 2x/c_m} phi(D) (D,m)/phi((D,m)) log(2x/(c_m D))``.
    """
    if lam < 0:
        raise PreconditionError("lambda must be >= 0")
    if lam == 0:
        return 0.0
    y = 2.0 * lam / c_m
    dmax = math.floor(y)
    if dmax < 1:
        return 0.0
    if max(dmax, m) > tables.bound:
        raise OutOfRangeError("coprime_m curve needs a larger sieve")
    D = np.arange(1, dmax + 1)
    D = D[D <= y]
    g = np.gcd(D, m)
    terms = tables.phi[D] * g / tables.phi[g] * np.log(y / D)
    return float(int(tables.phi[m]) * c_m / (m * lam * lam) * terms.sum())


def curve_eval(spec: CurveSpec, lam: float, tables: SieveTables) -> float:
    if lam < 0:
        raise PreconditionError("lambda must be >= 0")
    if spec.kind == "poisson":
        return 1.0
    if spec.kind == "gue":
        return float(gue(lam))
    if spec.kind == "boca_zaharescu":
        return boca_zaharescu(lam, tables)
    if spec.kind == "coprime_m":
        return coprime_m_curve(lam, spec.m, spec.c_m, tables)
    return g2(lam, spec.prime_cutoff, tables)


# --------------------------------------------------------------------------
# lattice constant


def lattice_constant(r1: int, r2: int, cutoff: int, tables: SieveTables) -> float:
    """Density constant ``P`` for square-free coprime pairs with side conditions.

    ``P = phi(r1) phi(r2)/(r1 r2) * prod_{p | gcd(r1,r2)} (1-1/p^2)^-1`` times
    ``C`` restricted to ``(p, r1 r2) = 1``.
    """
    value = _phi_over(r1, tables) * _phi_over(r2, tables)
    for p in _primes_of(math.gcd(r1, r2), tables):
        value /= 1.0 - 1.0 / (p * p)
    primes = sorted(set(_primes_of(r1, tables)) | set(_primes_of(r2, tables)))
    return value * base_product_coprime(primes, cutoff)


def boca_zaharescu_integral_exact(lambda_max: float, tables: SieveTables) -> float:
    """``int_0^L`` of the Boca-Zaharescu density, term by term as for g2."""
    L = float(lambda_max)
    c = PI2 / 3.0
    if L * c <= 1.0:
        return 0.0
    kmax = math.ceil(c * L) - 1
    if kmax > tables.bound:
        raise OutOfRangeError(f"need phi up to {kmax}, sieve bound is {tables.bound}")
    total = 0.0
    for k in range(1, kmax + 1):
        if k < c * L:
            total += int(tables.phi[k]) * (c / k - (math.log(c * L / k) + 1.0) / L)
    return 6.0 / PI2 * total
