"""Farey fractions of order Q with restricted denominators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .arith import SieveTables, small_factorize
from .errors import CapacityError, OutOfRangeError, PreconditionError

#: Default cap on the number of fractions materialised by :func:`enumerate_farey`.
DEFAULT_MAX_COUNT = 600_000_000

# Float keys order distinct reduced fractions correctly while 1/Q**2 stays
# well above the double spacing near 1.
_FLOAT_SORT_MAX_Q = 1 << 25


@dataclass(frozen=True)
class DenominatorPredicate:
    """Which denominators ``q`` are admitted: all, square-free, prime, or coprime to ``m``."""

    kind: str
    m: int | None = None

    KINDS = ("all", "squarefree", "prime", "coprime")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown predicate kind {self.kind!r}")
        if (self.kind == "coprime") != (self.m is not None):
            raise ValueError("coprime predicate needs m, other kinds must not have one")
        if self.m is not None and self.m < 1:
            raise ValueError("m must be positive")

    @classmethod
    def parse(cls, text: str) -> "DenominatorPredicate":
        """Parse ``all``, ``squarefree``, ``prime`` or ``coprime:M``."""
        text = text.strip().lower()
        if text.startswith("coprime"):
            _, _, m = text.partition(":")
            if not m:
                raise ValueError("coprime predicate needs a modulus, e.g. coprime:6")
            return cls("coprime", int(m))
        return cls(text)

    def __str__(self) -> str:
        return f"coprime:{self.m}" if self.kind == "coprime" else self.kind

    def mask(self, q: np.ndarray, tables: SieveTables) -> np.ndarray:
        """Boolean mask of admissible entries of the int array ``q``."""
        if self.kind == "all":
            return np.ones(q.shape, dtype=bool)
        if self.kind == "squarefree":
            return tables.squarefree[q]
        if self.kind == "prime":
            return (tables.spf[q] == q) & (q >= 2)
        return np.gcd(q, self.m) == 1

    def admits(self, q: int, tables: SieveTables) -> bool:
        return bool(self.mask(np.array([q]), tables)[0])


ALL = DenominatorPredicate("all")
SQUAREFREE = DenominatorPredicate("squarefree")
PRIME = DenominatorPredicate("prime")


def coprime_to(m: int) -> DenominatorPredicate:
    return DenominatorPredicate("coprime", m)


@dataclass(frozen=True, eq=False)
class FareySequence:
    """Ascending fractions ``a/q`` in (0, 1] stored as two int64 arrays."""

    order: int
    predicate: DenominatorPredicate
    numerators: np.ndarray = field(repr=False)
    denominators: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return int(self.numerators.size)

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[Fraction]:
        for a, q in zip(self.numerators.tolist(), self.denominators.tolist()):
            yield Fraction(a, q)

    def values(self) -> np.ndarray:
        return self.numerators / self.denominators

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.numerators.tolist(), self.denominators.tolist()))


def _check_order(Q: int, tables: SieveTables) -> None:
    if Q < 1:
        raise PreconditionError("order Q must be >= 1")
    if Q > tables.bound:
        raise OutOfRangeError(f"Q={Q} exceeds sieve bound {tables.bound}")


def admissible_denominators(Q: int, pred: DenominatorPredicate, tables: SieveTables) -> np.ndarray:
    q = np.arange(1, Q + 1, dtype=np.int64)
    return q[pred.mask(q, tables)]


def enumerate_farey(
    Q: int,
    pred: DenominatorPredicate,
    tables: SieveTables,
    max_count: int = DEFAULT_MAX_COUNT,
) -> FareySequence:
    """All reduced ``a/q`` with ``0 < a <= q <= Q`` and ``pred(q)``, ascending.

    Fractions are generated denominator by denominator and then sorted.  The
    float sort key is exact for ``Q < 2**25``; the result is additionally
    checked with integer cross-multiplication.
    """
    _check_order(Q, tables)
    if Q >= _FLOAT_SORT_MAX_Q:
        raise CapacityError("Q too large for exact float ordering")
    qs = admissible_denominators(Q, pred, tables)
    expected = int(tables.phi[qs].sum())
    if expected > max_count:
        raise CapacityError(f"{expected} fractions exceed budget {max_count}")

    nums = np.empty(expected, dtype=np.int64)
    dens = np.empty(expected, dtype=np.int64)
    pos = 0
    chunk = 1 << 22
    start = 0
    while start < qs.size:
        # group denominators so each batch holds at most ~chunk candidates
        stop = start
        total = 0
        while stop < qs.size and (total == 0 or total + qs[stop] <= chunk):
            total += int(qs[stop])
            stop += 1
        batch = qs[start:stop]
        q_rep = np.repeat(batch, batch)
        offsets = np.cumsum(batch) - batch
        a = np.arange(q_rep.size, dtype=np.int64) - np.repeat(offsets, batch) + 1
        keep = np.gcd(a, q_rep) == 1
        k = int(keep.sum())
        nums[pos : pos + k] = a[keep]
        dens[pos : pos + k] = q_rep[keep]
        pos += k
        start = stop

    order = np.argsort(nums / dens, kind="stable")
    nums = nums[order]
    dens = dens[order]
    if nums.size > 1 and not np.all(nums[1:] * dens[:-1] - nums[:-1] * dens[1:] > 0):
        raise AssertionError("fractions not strictly ascending")  # pragma: no cover
    nums.flags.writeable = False
    dens.flags.writeable = False
    return FareySequence(Q, pred, nums, dens)


def count_exact(Q: int, tables: SieveTables) -> int:
    """Number of square-free-denominator Farey fractions of order ``Q``.

    Sums ``phi(s)`` over square-free ``s <= Q`` without building the sequence.
    """
    _check_order(Q, tables)
    s = slice(1, Q + 1)
    return int(tables.phi[s][tables.squarefree[s]].sum())


def count_asymptotic(Q: int, delta) -> float:
    """Main term ``3 Q**2 delta / pi**2`` of the square-free Farey count.

    ``delta`` is an :class:`~fareycorr.analytic.EulerProductValue` (or a float).
    """
    value = getattr(delta, "value", delta)
    return 3.0 * Q * Q * value / math.pi**2


def exponential_sum_direct(
    Q: int, r: int, tables: SieveTables, seq: FareySequence | None = None
) -> complex:
    """Sum of ``exp(2 pi i r gamma)`` over the square-free Farey fractions.

    ``r * a`` is reduced modulo ``q`` in integers before the angle is formed.
    Pass ``seq`` to reuse an already enumerated sequence of order ``>= Q``.
    """
    _check_order(Q, tables)
    if seq is None or seq.predicate != SQUAREFREE or seq.order < Q:
        seq = enumerate_farey(Q, SQUAREFREE, tables)
    a, q = seq.numerators, seq.denominators
    if seq.order > Q:
        keep = q <= Q
        a, q = a[keep], q[keep]
    residue = ((r % q) * a) % q
    angle = (2.0 * np.pi) * residue / q
    return complex(np.cos(angle).sum(), np.sin(angle).sum())


def _squarefree_divisors(n: int, tables: SieveTables) -> list[int]:
    primes = tables.prime_factors(n) if n <= tables.bound else list(small_factorize(n))
    divs = [1]
    for p in primes:
        divs += [d * p for d in divs]
    return divs


def exponential_sum_formula(Q: int, r: int, tables: SieveTables) -> int:
    """Mobius form of the exponential sum over square-free Farey fractions.

    Evaluates ``sum_{d<=Q} mu(d) sum_{q<=Q/d, (q,d)=1, q|r} q mu(q)**2``
    in exact integers.  ``r = 0`` is divisible by every ``q``.
    """
    _check_order(Q, tables)
    mu = tables.mu
    total = 0
    if r == 0:
        q_all = np.arange(1, Q + 1, dtype=np.int64)
        for d in range(1, Q + 1):
            if mu[d] == 0:
                continue
            q = q_all[: Q // d]
            ok = tables.squarefree[q] & (np.gcd(q, d) == 1)
            total += int(mu[d]) * int(q[ok].sum())
        return total

    cands = [q for q in _squarefree_divisors(abs(r), tables) if q <= Q]
    for d in range(1, Q + 1):
        if mu[d] == 0:
            continue
        limit = Q // d
        inner = sum(q for q in cands if q <= limit and math.gcd(q, d) == 1)
        total += int(mu[d]) * inner
    return total
