# Square-free coprime lattice points in [1, R]^2 with side conditions,
# against the Euler-product main term (6 P / pi^2) R^2.
from fareycorr import build_sieve
from fareycorr.empirical import LatticeRegion, lattice_count

tables = build_sieve(3200)
for r1, r2 in [(1, 1), (2, 3), (6, 6), (3, 4)]:
    row = []
    for R in (100, 200, 400, 800, 1600, 3200):
        lc = lattice_count(LatticeRegion(R, r1, r2), tables, 10**7)
        row.append(f"{lc.ratio - 1:+.4f}")
    print(f"(r1, r2) = ({r1}, {r2})  P = {lc.P:.6f}  ratio - 1:", " ".join(row))
# The sign of the error flips as R grows while its size shrinks overall.
