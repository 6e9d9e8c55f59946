# Exponential sums over the square-free Farey fractions are integers that
# a Mobius-weighted divisor sum produces exactly.
from fareycorr import build_sieve, exponential_sum_direct, exponential_sum_formula, enumerate_farey
from fareycorr.farey import SQUAREFREE

tables = build_sieve(200)
seq = enumerate_farey(200, SQUAREFREE, tables)

print(" Q    r   direct (float)           formula")
for Q, r in [(2, 1), (2, 2), (10, 0), (10, 6), (50, 30), (200, 12), (200, 97)]:
    direct = exponential_sum_direct(Q, r, tables, seq)
    print(f"{Q:>3} {r:>4}   {direct.real:+.10f}{direct.imag:+.1e}j   {exponential_sum_formula(Q, r, tables)}")

# Worst disagreement over a full grid.
worst = max(
    abs(exponential_sum_direct(Q, r, tables, seq) - exponential_sum_formula(Q, r, tables))
    for Q in range(1, 201, 7)
    for r in range(0, 101)
)
print(f"max |direct - formula| = {worst:.2e}")
