"""Period lattice of y^2 = x^3 - n^2 x and the Weierstrass functions on it.

The lattice is square, omega * Z[i] with omega = pi * G / sqrt(n) where G is
Gauss's constant 1/agm(sqrt 2, 1).  With tau = i fixed, the theta nome is
e^{-pi} and the theta series converge after a handful of terms, so the
Weierstrass functions are evaluated from theta quotients instead of lattice
sums.

The normalisation is (p')^2 = 4p^3 - 4n^2 p, so the point on the curve is
(p(z), p'(z)/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpc, mpf

from .arith import resolve_digits

#: extra decimal digits carried internally
GUARD = 10


class PoleError(ValueError):
    """Raised when evaluating p or p' too close to a lattice point."""


def agm(x, y, digits: int | None = None):
    """Arithmetic-geometric mean of two nonnegative reals."""
    digits = resolve_digits(digits)
    with mpmath.workdps(digits + GUARD):
        a, b = mpf(x), mpf(y)
        if a < 0 or b < 0:
            raise ValueError("agm needs nonnegative arguments")
        eps = mpf(10) ** (1 - digits)
        while abs(a - b) > eps * max(abs(a), 1):
            a, b = (a + b) / 2, mpmath.sqrt(a * b)
        return (a + b) / 2


def gauss_constant(digits: int | None = None):
    digits = resolve_digits(digits)
    with mpmath.workdps(digits + GUARD):
        return 1 / agm(mpmath.sqrt(2), 1, digits)


@dataclass(frozen=True)
class PeriodLattice:
    n: int
    digits: int
    omega1: mpf
    omega2: mpc
    gauss: mpf

    @property
    def omega(self):
        return self.omega1


def periods(n: int, digits: int | None = None) -> PeriodLattice:
    """Real period pi*G/sqrt(n); the lattice is omega1 * Z[i]."""
    if n < 1:
        raise ValueError("n must be positive")
    digits = resolve_digits(digits)
    with mpmath.workdps(digits + GUARD):
        G = gauss_constant(digits)
        w = mpmath.pi * G / mpmath.sqrt(n)
        return PeriodLattice(n, digits, w, mpc(0, w), G)


def _reduce(z, w, centered: bool):
    t = mpc(z) / w
    shift = mpf(0.5) if centered else 0
    m = mpmath.floor(t.real + shift)
    k = mpmath.floor(t.imag + shift)
    return mpc(z) - mpc(m, k) * w


def reduce_mod_lattice(z, L: PeriodLattice, centered: bool = False):
    """Representative of ``z`` mod the lattice with both coordinates in
    [0, omega), or in [-omega/2, omega/2) when ``centered``."""
    with mpmath.workdps(L.digits + GUARD):
        return _reduce(z, L.omega1, centered)


def lattice_distance(z, w, L: PeriodLattice):
    """Distance between the classes of ``z`` and ``w`` in C / lattice."""
    with mpmath.workdps(L.digits + GUARD):
        return abs(_reduce(mpc(z) - mpc(w), L.omega1, centered=True))


# ---------------------------------------------------------------------------
# theta functions at nome e^{-pi}

def _thetas(v, digits: int):
    """(theta1, theta2, theta3, theta4)(v) for nome q = e^{-pi}.

    Summation stops once the next half-integer term bound q^{(k+1/2)^2}
    e^{(2k+1)|Im v|} drops below 10^(-digits-5); for |Im v| <= pi/2 that also
    bounds the integer-exponent terms.
    """
    q = mpmath.exp(-mpmath.pi)
    tol = mpf(10) ** (-digits - 5)
    g = mpmath.exp(abs(mpc(v).imag))
    t1 = t2 = mpc(0)
    t3 = t4 = mpc(1)
    k = 0
    while True:
        qh = q ** ((k + mpf(0.5)) ** 2)
        sign = -1 if k % 2 else 1
        t1 += 2 * sign * qh * mpmath.sin((2 * k + 1) * v)
        t2 += 2 * qh * mpmath.cos((2 * k + 1) * v)
        j = k + 1
        qi = q ** (j * j) * 2 * mpmath.cos(2 * j * v)
        t3 += qi
        t4 += -qi if j % 2 else qi
        if qh * g ** (2 * k + 1) < tol:
            return t1, t2, t3, t4
        k += 1


def _theta_constants(digits: int):
    _, t2, t3, t4 = _thetas(mpf(0), digits)
    return t2.real, t3.real, t4.real


def _check_pole(z, L: PeriodLattice):
    zc = _reduce(z, L.omega1, centered=True)
    if abs(zc) < mpf(10) ** (-L.digits / 2) * L.omega1:
        raise PoleError(f"{mpmath.nstr(z, 15)} is too close to a lattice point")
    return zc


def wp(z, L: PeriodLattice):
    """Weierstrass p for the lattice omega * Z[i]; (p')^2 = 4p^3 - 4n^2 p."""
    return wp_and_derivative(z, L)[0]


def wp_prime(z, L: PeriodLattice):
    return wp_and_derivative(z, L)[1]


def wp_and_derivative(z, L: PeriodLattice):
    with mpmath.workdps(L.digits + GUARD):
        zc = _check_pole(z, L)
        scale = mpmath.pi / L.omega1
        v = scale * zc
        c2, c3, c4 = _theta_constants(L.digits + GUARD)
        t1, t2, t3, t4 = _thetas(v, L.digits + GUARD)
        p = scale**2 * ((c2 * c3 * t4 / t1) ** 2 - (c2**4 + c3**4) / 3)
        dp = -2 * scale**3 * (c2 * c3 * c4) ** 2 * t2 * t3 * t4 / t1**3
        return p, dp


def lattice_to_curve_point(z, L: PeriodLattice):
    """(p(z), p'(z)/2): the point of y^2 = x^3 - n^2 x with elliptic log ``z``."""
    p, dp = wp_and_derivative(z, L)
    return p, dp / 2


def torsion_image_set(L: PeriodLattice) -> list:
    """The four half-lattice classes; p maps them to infinity, n, -n and 0."""
    with mpmath.workdps(L.digits + GUARD):
        h = L.omega1 / 2
        return [mpc(0), mpc(h, 0), mpc(0, h), mpc(h, h)]


def default_tolerance(L: PeriodLattice):
    with mpmath.workdps(L.digits + GUARD):
        return mpf(10) ** (-L.digits / 2) * L.omega1


def in_torsion_image(z, L: PeriodLattice, tol=None) -> bool:
    """True when ``z`` mod the lattice lies within ``tol`` of a 2-torsion class."""
    tol = default_tolerance(L) if tol is None else mpf(tol)
    return min(lattice_distance(z, s, L) for s in torsion_image_set(L)) <= tol
