"""n = 13: the smallest admissible discriminant gives a 2-torsion sum, the
next one gives a point of infinite order."""

import mpmath

from congruent.heegner import Config, verify

cert = verify(13, Config(digits=60))
for a in cert.diagnostics["attempts"]:
    print(f"D = {a['D']:4d} at {a['digits']} digits: {a['status']}")

print(f"forms for D = {cert.D}: {[f.as_tuple() for f in cert.forms]}")
print(f"U mod lattice = {mpmath.nstr(cert.U, 15)}")
x, y = cert.point
print(f"x = {x}\ny = {y}")
a, b, c = cert.triangle
print(f"triangle: {a}, {b}, {c}")
print(f"exact check: {cert.check()}")
