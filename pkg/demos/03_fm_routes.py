# The arithmetic weights F(m) of g2, evaluated three ways.
#
# The factorization sum is the reference. The closed form transcribed
# literally carries the factor attached to primes dividing m/d the wrong
# way up, which already shows at m = 2; the corrected closed form agrees
# with the factorization sum to rounding.
from fareycorr import base_product_C, build_sieve, fm_closed, fm_closed_corrected, fm_factorization

cutoff = 10**6
tables = build_sieve(500)
C = base_product_C(cutoff).value
print(f"C = {C:.15f}")

print("  m   factorization/C   literal/C    corrected/C")
for m in (1, 2, 3, 4, 6, 8, 12, 30, 36, 210):
    ref = fm_factorization(m, cutoff, tables).value
    lit = fm_closed(m, cutoff, tables).value
    cor = fm_closed_corrected(m, cutoff, tables).value
    print(f"{m:>4}   {ref / C:>15.10f}  {lit / C:>11.6f}  {cor / C:>13.10f}")

# F(p) = C (p - 1) for primes, and F/C is multiplicative.
for p in (2, 3, 5, 7, 11):
    print(p, fm_factorization(p, cutoff, tables).value / C)
f = lambda k: fm_factorization(k, cutoff, tables).value / C
print("F(12)/C vs F(4)F(3)/C^2:", f(12), f(4) * f(3))
