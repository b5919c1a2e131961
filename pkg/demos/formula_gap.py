"""Compare the order-based size formula for q = 3r with exhaustive search."""

from math import gcd

from b1sets import m4_prime_formula, max_bset_exact
from b1sets.numtheory import divisors, ord

print(" q   formula  search  orders")
for r in range(5, 60):
    if gcd(r, 6) != 1:
        continue
    predicted = sum(m4_prime_formula(d).value for d in divisors(r))
    found = max_bset_exact(3 * r).max_size
    orders = {d: ord(d, 2) for d in divisors(r) if d > 1}
    mark = "  <" if found > predicted else ""
    print(f"{3 * r:3d} {predicted:8d} {found:7d}  {orders}{mark}")
