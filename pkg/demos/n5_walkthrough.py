"""Certify n = 5 step by step: discriminant, Heegner forms, the sum U, the
rational point and the triangle."""

import mpmath

from congruent.arith import rational_reconstruct
from congruent.curve import CongruentCurve, triangle_from_point
from congruent.heegner import (
    choose_discriminant, heegner_representatives, heegner_sum, required_terms,
)
from congruent.lattice import lattice_to_curve_point, periods
from congruent.lseries import coefficients

n, P = 5, 60
E = CongruentCurve(n)
print(f"E: y^2 = x^3 - {n * n} x, conductor {E.conductor}")

dd = choose_discriminant(E.conductor)
print(f"D = {dd.D}, h(D) = {dd.h}, B = {dd.r} (mod {2 * E.conductor})")

forms = heegner_representatives(E.conductor, dd.D, dd.r)
for f in forms:
    print(f"  form {f.as_tuple()}")

M = required_terms(forms, P)
coeffs = coefficients(n, M)
print(f"{M} q-expansion terms, first few: {dict(list(coeffs.nonzero().items())[:8])}")

L = periods(n, P)
with mpmath.workdps(P + 10):
    U = heegner_sum(forms, coeffs, L, P)
    print(f"omega = {mpmath.nstr(L.omega1, 20)}")
    print(f"U mod lattice = {mpmath.nstr(U, 20)}")
    x_num, y_num = lattice_to_curve_point(U, L)
    print(f"(p(U), p'(U)/2) = ({mpmath.nstr(x_num.real, 20)}, {mpmath.nstr(y_num.real, 20)})")
    # the continued fraction needs the full-precision value, not a rounded copy
    x = rational_reconstruct(x_num.real, 10**25)
    y = rational_reconstruct(y_num.real, 10**25)

print(f"rational point ({x}, {y}), on curve: {E.contains((x, y))}")

t = triangle_from_point((x, y), E)
print(f"triangle {t.a}, {t.b}, {t.c}: area {t.area()}, right angle {t.is_right()}")
t2 = triangle_from_point((x, y), E, double_first=True)
print(f"after doubling: {t2.a}, {t2.b}, {t2.c}")
