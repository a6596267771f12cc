"""Run the certifier over square-free n < 40 and report what each one gives."""

import time

from congruent.arith import is_squarefree
from congruent.heegner import Verdict, verify

for n in range(1, 40):
    if not is_squarefree(n):
        continue
    start = time.perf_counter()
    cert = verify(n)
    dt = time.perf_counter() - start
    if cert.verdict is Verdict.CONGRUENT:
        a, b, c = cert.triangle
        print(f"{n:3d}  D = {cert.D:5d}  {dt:6.2f}s  ({a}, {b}, {c})")
    else:
        print(f"{n:3d}  {cert.verdict.value}")
