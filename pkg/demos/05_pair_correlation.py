# Exact empirical pair correlation and its approach to the g2 integral.
from fareycorr import build_sieve, enumerate_farey, g2_curve, pair_correlation, WindowSpec
from fareycorr.empirical import convergence_ladder, pair_correlation_naive
from fareycorr.farey import SQUAREFREE

tables = build_sieve(4000)
seq = enumerate_farey(2000, SQUAREFREE, tables)
window = WindowSpec("2", 20)
hist = pair_correlation(seq, window, workers=4)
print(f"Q=2000: N={hist.N}, pairs in window {hist.total}")

centres = [float(window.bin_width) * (k + 0.5) for k in range(window.bins)]
for c, d, g in zip(centres, hist.density(), g2_curve(centres, 10**7, tables)):
    print(f"{c:5.2f}  histogram {d:7.4f}  g2 {g:7.4f}")

# The windowed sweep against the quadratic reference on a small order.
small = enumerate_farey(150, SQUAREFREE, tables)
w = WindowSpec("3", 12)
print("sweep == naive:", pair_correlation(small, w).same_counts(pair_correlation_naive(small, w)))

# S_Lambda(Q) along a ladder of orders. The deviation is already small at
# Q = 500 and keeps shrinking overall, but not strictly at every step.
for case in convergence_ladder([500, 1000, 2000, 4000], [1, 2, 4], SQUAREFREE, 10**7):
    devs = ", ".join(f"{d:.1e}" for d in case["deviation"])
    print(f"Lambda={case['Lambda']}: limit {case['limit']:.6f}  deviations [{devs}]")
