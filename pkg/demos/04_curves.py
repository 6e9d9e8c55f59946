# g2 next to the comparison curves: all denominators (Boca-Zaharescu),
# Poisson and GUE.
import numpy as np

from fareycorr import build_sieve, g2_curve, g2_integral, g2_integral_exact
from fareycorr.analytic import boca_zaharescu, gue, support_threshold

cutoff = 10**7
tables = build_sieve(1000)
print(f"g2 vanishes up to 3 delta/pi^2 = {support_threshold(cutoff):.6f}; BZ up to 3/pi^2 = {3 / np.pi**2:.6f}")

lams = np.array([0.1, 0.22, 0.25, 0.3, 0.5, 0.75, 1, 1.5, 2, 3, 4, 6, 8, 10])
g2v = g2_curve(lams, cutoff, tables)
print("lambda      g2        BZ       GUE   Poisson")
for x, v in zip(lams, g2v):
    print(f"{x:6.2f}  {v:8.5f}  {boca_zaharescu(x, tables):8.5f}  {float(gue(x)):8.5f}  1")

# Integrals: closed-form antiderivative against two quadrature rules.
for L in (1, 2, 4):
    exact = g2_integral_exact(L, cutoff, tables)
    mid = g2_integral(L, 1e-3, cutoff, tables)
    trap = g2_integral(L, 1e-3, cutoff, tables, rule="trapezoid")
    print(f"int_0^{L} g2 = {exact:.8f}  midpoint {mid:.8f}  trapezoid {trap:.8f}")
