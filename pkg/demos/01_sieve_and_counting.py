# Sieve tables, Farey fractions with square-free denominators, and how
# their number grows with the order Q.
import math

import numpy as np

from fareycorr import build_sieve, carefree_delta, count_asymptotic, count_exact, enumerate_farey
from fareycorr.farey import ALL, PRIME, SQUAREFREE

tables = build_sieve(100_000)
print("mu(1..12):  ", tables.mu[1:13])
print("phi(1..12): ", tables.phi[1:13])
print("square-free below 20:", np.flatnonzero(tables.squarefree[:20]))

# The square-free subsequence of order 6 drops the fractions with q = 4.
seq = enumerate_farey(6, SQUAREFREE, tables)
print("order 6, square-free:", [str(x) for x in seq])
for pred in (ALL, SQUAREFREE, PRIME):
    print(f"{pred!s:>10}: {enumerate_farey(1000, pred, tables).count} fractions of order 1000")

# The count is 3 delta Q^2 / pi^2 to leading order; the relative error
# shrinks roughly like Q^(-1/2).
delta = carefree_delta(10**7)
print(f"delta = {delta.value:.15f}  (tail estimate {delta.tail_error_estimate:.1e})")
for Q in (10, 100, 1_000, 10_000, 100_000):
    n = count_exact(Q, tables)
    ratio = n / count_asymptotic(Q, delta)
    print(f"Q={Q:>6}  N={n:>12}  ratio={ratio:.6f}  sqrt(Q)|ratio-1|={math.sqrt(Q) * abs(ratio - 1):.3f}")
