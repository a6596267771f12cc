"""Exact arithmetic on the congruent-number curve y^2 = x^3 - n^2 x."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .arith import factorize, is_rational_square, is_squarefree


class Reduction(Enum):
    GOOD = "good"
    ADDITIVE = "additive"


@dataclass(frozen=True)
class CongruentCurve:
    n: int
    conductor: int = field(init=False)
    discriminant: int = field(init=False)

    def __post_init__(self):
        if self.n < 1 or not is_squarefree(self.n):
            raise ValueError(f"n = {self.n} is not a square-free positive integer")
        object.__setattr__(self, "conductor", conductor(self.n))
        # disc of the cubic x^3 - n^2 x; the curve discriminant differs by 16
        object.__setattr__(self, "discriminant", 4 * self.n**6)

    def contains(self, P) -> bool:
        if P is INFINITY:
            return True
        x, y = P
        return y * y == x**3 - self.n**2 * x

    def bad_primes(self) -> list[int]:
        return sorted(factorize(2 * self.n))


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def point(x, y) -> tuple[Fraction, Fraction]:
    return Fraction(x), Fraction(y)


@dataclass(frozen=True)
class Triangle:
    a: Fraction
    b: Fraction
    c: Fraction

    def area(self) -> Fraction:
        return self.a * self.b / 2

    def is_right(self) -> bool:
        return self.a**2 + self.b**2 == self.c**2

    def __iter__(self):
        return iter((self.a, self.b, self.c))


def conductor(n: int) -> int:
    """Conductor 2^5 n^2 of y^2 = x^3 - n^2 x for square-free ``n``."""
    if n < 1 or not is_squarefree(n):
        raise ValueError(f"n = {n} is not a square-free positive integer")
    return 32 * n * n


def reduction_type(n: int, p: int) -> Reduction:
    """Reduction type at ``p``.  Every bad prime is additive: the only singular
    point mod p is the cusp (0, 0)."""
    return Reduction.ADDITIVE if (2 * n) % p == 0 else Reduction.GOOD


def _as_curve(curve) -> CongruentCurve:
    return curve if isinstance(curve, CongruentCurve) else CongruentCurve(int(curve))


def _check(P, E: CongruentCurve):
    if not E.contains(P):
        raise ValueError(f"{P} is not on y^2 = x^3 - {E.n}^2 x")


def negate(P):
    if P is INFINITY:
        return P
    return (P[0], -P[1])


def point_add(P, Q, curve):
    """Chord-and-tangent addition on y^2 = x^3 - n^2 x (exact)."""
    E = _as_curve(curve)
    if P is not INFINITY:
        P = point(*P)
    if Q is not INFINITY:
        Q = point(*Q)
    _check(P, E)
    _check(Q, E)
    if P is INFINITY:
        return Q
    if Q is INFINITY:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2:
        if y1 == -y2:
            return INFINITY
        # P == Q, y != 0
        lam = (3 * x1 * x1 - E.n**2) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    y3 = lam * (x1 - x3) - y1
    return (x3, y3)


def point_double(P, curve):
    return point_add(P, P, curve)


def point_multiply(k: int, P, curve):
    E = _as_curve(curve)
    if k < 0:
        return point_multiply(-k, negate(P), E)
    R, Q = INFINITY, P
    while k:
        if k & 1:
            R = point_add(R, Q, E)
        Q = point_add(Q, Q, E)
        k >>= 1
    return R


def torsion_points(curve) -> list:
    E = _as_curve(curve)
    n = E.n
    return [INFINITY, point(0, 0), point(n, 0), point(-n, 0)]


def is_torsion(P, curve) -> bool:
    return P is INFINITY or P[1] == 0


def _halvable_roots(x: Fraction, n: int):
    s_plus = is_rational_square(x + n)
    s_minus = is_rational_square(x - n)
    s_x = is_rational_square(x)
    if s_plus is None or s_minus is None or s_x is None:
        return None
    return s_plus, s_minus, s_x


def triangle_from_point(P, curve, double_first: bool = False) -> Triangle:
    """Right triangle of area n from a non-torsion rational point.

    When x, x - n and x + n are all rational squares the sides are read off
    directly; otherwise (or with ``double_first``) the point is doubled first,
    which always lands in 2E(Q) where the three values are squares.
    """
    E = _as_curve(curve)
    if P is INFINITY or P[1] == 0:
        raise ValueError("triangle_from_point needs a non-torsion point")
    P = point(*P)
    _check(P, E)
    roots = None if double_first else _halvable_roots(P[0], E.n)
    if roots is None:
        P = point_double(P, E)
        roots = _halvable_roots(P[0], E.n)
        if roots is None:
            raise ArithmeticError("doubled point is not in 2E(Q); this cannot happen")
    s_plus, s_minus, s_x = roots
    # nonnegative roots and x + n > x - n, so b > 0
    t = Triangle(s_plus + s_minus, s_plus - s_minus, 2 * s_x)
    assert t.is_right() and t.area() == E.n
    return t


def point_from_triangle(t: Triangle, n: int):
    """Inverse map: the point of 2E(Q) whose x-coordinate is (c/2)^2."""
    x = (t.c / 2) ** 2
    y = t.c * (t.a**2 - t.b**2) / 8
    return (x, y)
