"""a_m for a few twists, and the quadratic-twist relation a_p(n) = (n/p) a_p(1)."""

from congruent.arith import legendre_symbol
from congruent.lseries import ap, coefficients, primes_up_to

for n in (1, 5, 13):
    t = coefficients(n, 100)
    terms = " ".join(f"{v:+d}q^{m}" for m, v in t.nonzero().items())
    print(f"n = {n:2d}: {terms}")

print("\n  p  a_p(1)  a_p(5)  (5/p)")
for p in primes_up_to(120):
    p = int(p)
    if p % 4 == 1 and p != 5:
        print(f"{p:3d}  {ap(1, p):6d}  {ap(5, p):6d}  {legendre_symbol(5, p):5d}")
