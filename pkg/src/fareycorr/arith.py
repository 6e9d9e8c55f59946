"""Sieve tables and small exact-arithmetic helpers.

Every other module reads Mobius, totient, square-free flags and smallest
prime factors from a :class:`SieveTables` instance built once by
:func:`build_sieve`.  Primes beyond the table bound (needed for the Euler
products) come from the segmented generator :func:`prime_iter`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import CapacityError, OutOfRangeError, PreconditionError

#: Largest sieve bound accepted by default (about 17 bytes per entry).
DEFAULT_MAX_BOUND = 50_000_000

INT64_MAX = np.iinfo(np.int64).max


@dataclass(frozen=True, eq=False)
class SieveTables:
    """Arithmetic functions on ``0..bound``; index 0 is unused padding.

    Arrays are flagged read-only after construction so a table can be shared
    between threads.
    """

    bound: int
    mu: np.ndarray  # int8
    phi: np.ndarray  # int64
    squarefree: np.ndarray  # bool
    spf: np.ndarray  # int64, spf[1] == 1

    def _check(self, n: int) -> None:
        if n < 1 or n > self.bound:
            raise OutOfRangeError(f"{n} outside sieve range 1..{self.bound}")

    def factorize(self, n: int) -> dict[int, int]:
        """Prime factorization of ``n`` as ``{p: exponent}`` in ascending order."""
        self._check(n)
        out: dict[int, int] = {}
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return out

    def prime_factors(self, n: int) -> list[int]:
        return list(self.factorize(n))

    def divisors(self, n: int) -> list[int]:
        return divisors(n, self)

    @property
    def primes(self) -> np.ndarray:
        idx = np.arange(self.bound + 1)
        return idx[(self.spf == idx) & (idx >= 2)]


def build_sieve(bound: int, max_bound: int = DEFAULT_MAX_BOUND) -> SieveTables:
    """Tabulate mu, phi, square-free flags and smallest prime factors.

    Smallest prime factors come from a strided Eratosthenes pass.  Mu and phi
    then follow from the linear-sieve recurrence ``n = p * (n // p)`` with
    ``p = spf(n)``, applied one dyadic block ``[2**k, 2**(k+1))`` at a time so
    that every cofactor ``n // p`` is already known when its block is filled.

    >>> t = build_sieve(12)
    >>> int(t.mu[6]), int(t.mu[12]), int(t.phi[10]), bool(t.squarefree[12])
    (1, 0, 4, False)
    """
    if bound < 1:
        raise PreconditionError("sieve bound must be >= 1")
    if bound > max_bound:
        raise CapacityError(f"sieve bound {bound} exceeds budget {max_bound}")

    n = bound + 1
    spf = np.zeros(n, dtype=np.int64)
    for p in range(2, math.isqrt(bound) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(n, dtype=np.int64)
    unset = spf == 0
    spf[unset] = idx[unset]
    spf[0] = 0

    mu = np.zeros(n, dtype=np.int8)
    phi = np.zeros(n, dtype=np.int64)
    mu[1] = 1
    phi[1] = 1
    lo = 2
    while lo < n:
        hi = min(2 * lo, n)
        k = idx[lo:hi]
        p = spf[lo:hi]
        rest = k // p
        repeated = spf[rest] == p  # p divides the cofactor too
        mu[lo:hi] = np.where(repeated, 0, -mu[rest])
        phi[lo:hi] = phi[rest] * np.where(repeated, p, p - 1)
        lo = hi

    squarefree = mu != 0
    squarefree[0] = False
    for arr in (mu, phi, squarefree, spf):
        arr.flags.writeable = False
    return SieveTables(bound, mu, phi, squarefree, spf)


def divisors(n: int, tables: SieveTables) -> list[int]:
    """All positive divisors of ``n`` in ascending order."""
    divs = [1]
    for p, e in tables.factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def prime_segments(limit: int, segment: int = 1 << 20) -> Iterator[np.ndarray]:
    """Yield the primes up to ``limit`` as ascending arrays, one per segment."""
    if limit < 2:
        return
    base = _small_primes(math.isqrt(limit))
    lo = 2
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        mask = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            mask[start - lo :: p] = False
        yield np.flatnonzero(mask).astype(np.int64) + lo
        lo = hi


def prime_iter(limit: int) -> Iterator[int]:
    """Stream the primes ``<= limit`` in ascending order.

    Each call returns a fresh generator, so the stream can be restarted.
    """
    if limit < 2:
        raise PreconditionError("prime_iter needs limit >= 2")
    for seg in prime_segments(limit):
        yield from seg.tolist()


@lru_cache(maxsize=8)
def primes_upto(limit: int) -> np.ndarray:
    """All primes ``<= limit`` as one read-only int64 array (cached)."""
    parts = list(prime_segments(limit))
    out = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    out.flags.writeable = False
    return out


def small_factorize(n: int) -> dict[int, int]:
    """Trial-division factorization for integers outside a sieve table."""
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def to_fraction(value: str | int | float | Fraction) -> Fraction:
    """Parse a decimal string (or number) into an exact :class:`Fraction`.

    Floats are converted through their shortest ``repr`` so that ``0.1``
    means one tenth rather than the nearest binary double.
    """
    if isinstance(value, float):
        value = repr(value)
    return Fraction(value)


def fraction_text(value: Fraction) -> str:
    """Exact text form: ``"3/2"``, or ``"2"`` for integers."""
    return str(value)


def checked_mul(a: np.ndarray, b: np.ndarray | int) -> np.ndarray:
    """Elementwise int64 product that raises instead of wrapping around."""
    a = np.asarray(a, dtype=np.int64)
    amax = int(np.abs(a).max(initial=0))
    bmax = int(np.abs(np.asarray(b)).max(initial=0))
    if amax and bmax and amax > INT64_MAX // bmax:
        raise OverflowError("int64 product would overflow")
    return a * b
