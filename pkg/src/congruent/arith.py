"""Exact integer/rational arithmetic and the number-theoretic primitives used
throughout the package.

Rationals are :class:`fractions.Fraction` (always in lowest terms with a
positive denominator).  High-precision reals and complexes are mpmath
``mpf``/``mpc`` values; the working precision is given in decimal digits.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import mpmath

#: default working precision in decimal digits
DEFAULT_DIGITS = 60

Rational = Fraction


def resolve_digits(digits: int | None) -> int:
    if digits is None:
        return DEFAULT_DIGITS
    if int(digits) < 1:
        raise ValueError(f"precision must be positive, got {digits}")
    return int(digits)


# ---------------------------------------------------------------------------
# primality and factorization (small inputs only)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, probabilistic above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of ``|n|``; meant for conductors and
    discriminants, not for general-purpose factoring."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n:
        for q in (p, p + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        p += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(n).values())


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


# ---------------------------------------------------------------------------
# quadratic residues

def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime ``p``."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    t = pow(a % p, (p - 1) // 2, p)
    return -1 if t == p - 1 else t


def _tonelli_shanks(a: int, p: int) -> int:
    # p odd prime, a a nonzero residue mod p
    a %= p
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _unit_roots(a: int, p: int, k: int) -> list[int]:
    """All roots of x^2 = a mod p^k for a coprime to p."""
    pk = p**k
    a %= pk
    if p == 2:
        if k == 1:
            return [1]
        if k == 2:
            return [1, 3] if a % 4 == 1 else []
        if a % 8 != 1:
            return []
        # lift a root mod 2^j to mod 2^(j+1); keeps x odd
        x = 1
        for j in range(3, k):
            if (x * x - a) % (1 << (j + 1)):
                x += 1 << (j - 1)
        half = pk // 2
        return sorted({x % pk, -x % pk, (x + half) % pk, (-x + half) % pk})
    if pow(a % p, (p - 1) // 2, p) != 1:
        return []
    x = _tonelli_shanks(a, p)
    # Hensel: x <- x - (x^2 - a) / (2x)
    pj = p
    for _ in range(1, k):
        pj *= p
        x = (x - (x * x - a) * pow(2 * x, -1, pj)) % pj
    return sorted({x % pk, -x % pk})


def sqrt_mod_prime_power_all(a: int, p: int, k: int) -> list[int]:
    """Every x in [0, p^k) with x^2 = a (mod p^k), sorted ascending."""
    if k < 1:
        raise ValueError("k must be positive")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    pk = p**k
    a %= pk
    if a == 0:
        step = p ** ((k + 1) // 2)
        return list(range(0, pk, step))
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    if v % 2:
        return []
    half = v // 2
    roots = _unit_roots(a, p, k - v) if k > v else [0]
    # x = p^half * y, with y determined mod p^(k-v), so x is determined mod p^(k-half)
    modulus = p ** (k - half)
    out = set()
    for y in roots:
        x0 = (p**half * y) % modulus
        for t in range(p**half):
            out.add(x0 + t * modulus)
    return sorted(out)


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int | None:
    """Least nonnegative root of x^2 = a (mod p^k), or ``None`` if there is none."""
    roots = sqrt_mod_prime_power_all(a, p, k)
    return roots[0] if roots else None


def crt_combine(residues: list[tuple[int, int]]) -> int:
    """Chinese remaindering of ``[(r_i, m_i), ...]`` with pairwise coprime moduli.

    Returns the representative in ``[0, prod m_i)``.
    """
    x, m = 0, 1
    for r, mi in residues:
        if mi < 1:
            raise ValueError("moduli must be positive")
        if math.gcd(m, mi) != 1:
            raise ValueError(f"modulus {mi} is not coprime to {m}")
        # x + m*t = r (mod mi)
        t = (r - x) * pow(m, -1, mi) % mi
        x += m * t
        m *= mi
    return x % m


def sqrt_mod_all(a: int, modulus: int) -> list[int]:
    """All square roots of ``a`` modulo ``modulus``, via prime-power roots and CRT."""
    fac = factorize(modulus)
    per_prime = []
    for p, k in sorted(fac.items()):
        roots = sqrt_mod_prime_power_all(a, p, k)
        if not roots:
            return []
        per_prime.append([(r, p**k) for r in roots])
    return sorted(crt_combine(list(combo)) for combo in product(*per_prime))


def cornacchia_two_squares(p: int) -> tuple[int, int]:
    """Write a prime ``p = 1 (mod 4)`` as ``a^2 + b^2`` with ``a`` odd, ``b`` even
    (both positive)."""
    if p % 4 != 1 or not is_prime(p):
        raise ValueError(f"{p} is not a prime congruent to 1 mod 4")
    x = _tonelli_shanks(p - 1, p)
    r0, r1 = p, x
    bound = math.isqrt(p)
    while r1 > bound:
        r0, r1 = r1, r0 % r1
    a = r1
    b = math.isqrt(p - a * a)
    if a % 2 == 0:
        a, b = b, a
    assert a * a + b * b == p
    return a, b


# ---------------------------------------------------------------------------
# rationals

def rational_reconstruct(x, den_bound: int) -> Fraction | None:
    """Recover ``p/q`` with ``q <= den_bound`` from a high-precision real.

    Walks the continued-fraction convergents of ``x`` and returns the first one
    with ``|x - p/q| < 1/(2 q den_bound)``; ``None`` when no convergent with a
    denominator inside the bound gets that close.
    """
    x = mpmath.mpf(x)
    if x == 0:
        return Fraction(0)
    # exact binary value of x; the expansion below is then pure integer work
    sign, man, exp, _ = x._mpf_
    target = Fraction(-int(man) if sign else int(man)) * Fraction(2) ** int(exp)
    num, den = target.numerator, target.denominator
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while den:
        a, rem = divmod(num, den)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > den_bound:
            return None
        cand = Fraction(h1, k1)
        if abs(target - cand) * 2 * k1 * den_bound < 1:
            return cand
        num, den = den, rem
    return None


def is_rational_square(r: Fraction) -> Fraction | None:
    """Exact nonnegative square root of ``r``, or ``None``."""
    r = Fraction(r)
    if r < 0:
        return None
    a, b = r.numerator, r.denominator
    sa, sb = math.isqrt(a), math.isqrt(b)
    if sa * sa == a and sb * sb == b:
        return Fraction(sa, sb)
    return None
