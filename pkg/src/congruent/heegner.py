"""Heegner points on X_0(N) and the verification pipeline.

For a discriminant D < 0 with D = r^2 (mod 4N), the Heegner forms (A, B, C)
have N | A and B = r (mod 2N), one per class of forms of discriminant D.  The
modular parametrisation is evaluated on each CM point through its
q-expansion sum_m (a_m / m) q^m, the values are summed and reduced modulo the
period lattice.  If the sum is not 2-torsion, the Weierstrass functions give a
real approximation of a rational point, which is recovered exactly and
checked with rational arithmetic before anything is reported.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import mpmath
from mpmath import mpc, mpf

from . import lattice as lat
from .arith import (
    is_fundamental_discriminant,
    is_rational_square,
    is_squarefree,
    rational_reconstruct,
    resolve_digits,
    sqrt_mod_all,
)
from .curve import CongruentCurve, Triangle, triangle_from_point
from .lseries import CoefficientTable, load_or_compute

log = logging.getLogger(__name__)


class Verdict(str, Enum):
    CONGRUENT = "Congruent"
    INAPPLICABLE = "Inapplicable"
    INCONCLUSIVE = "Inconclusive"


class CoefficientTableTooSmall(ValueError):
    def __init__(self, required: int, available: int):
        super().__init__(f"coefficient table has {available} terms, {required} are required")
        self.required = required
        self.available = available


class DiscriminantSearchError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# sign and discriminant

def epsilon_sign(n: int) -> int:
    """Expected root number of y^2 = x^3 - n^2 x: -1 iff n = 5, 6, 7 (mod 8)."""
    if n < 1 or not is_squarefree(n):
        raise ValueError(f"n = {n} is not a square-free positive integer")
    return -1 if n % 8 in (5, 6, 7) else 1


@dataclass(frozen=True)
class DiscriminantData:
    D: int
    h: int
    r: int


def heegner_roots(N: int, D: int) -> list[int]:
    """Square roots of D modulo 4N, reduced mod 2N (the data that matters)."""
    return sorted({r % (2 * N) for r in sqrt_mod_all(D, 4 * N)})


def is_admissible(N: int, D: int) -> bool:
    return (D < 0 and D % 2 == 1 and math.gcd(D, 2 * N) == 1
            and is_fundamental_discriminant(D) and bool(sqrt_mod_all(D, 4 * N)))


def admissible_discriminants(N: int, bound: int = 10_000):
    """Odd fundamental D < 0 coprime to 2N with D a square mod 4N, by increasing |D|."""
    for absD in range(3, bound + 1, 4):
        D = -absD
        if is_admissible(N, D):
            yield D


def discriminant_data(N: int, D: int) -> DiscriminantData:
    roots = heegner_roots(N, D)
    if not roots:
        raise DiscriminantSearchError(f"D = {D} is not a square mod {4 * N}")
    return DiscriminantData(D, class_number(D), roots[0])


def choose_discriminant(N: int, n: int | None = None, bound: int = 10_000) -> DiscriminantData:
    """Smallest admissible discriminant for level ``N`` with its class number
    and least root r of D mod 4N (taken mod 2N)."""
    for D in admissible_discriminants(N, bound):
        return discriminant_data(N, D)
    raise DiscriminantSearchError(f"no admissible discriminant with |D| <= {bound}")


# ---------------------------------------------------------------------------
# binary quadratic forms

def reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Reduced representative of a positive definite form."""
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError("form is not positive definite")
    while True:
        if not -a < b <= a:
            k = (a - b) // (2 * a)
            b, c = b + 2 * k * a, a * k * k + b * k + c
        elif a > c:
            a, b, c = c, -b, a
        elif a == c and b < 0:
            b = -b
        else:
            return a, b, c


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """Reduced primitive forms of discriminant ``D`` (|b| <= a <= c, b >= 0 on
    the boundary)."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    out = []
    b = D % 2
    while 3 * b * b <= -D:
        ac = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= ac:
            if ac % a == 0:
                c = ac // a
                if math.gcd(math.gcd(a, b), c) == 1:
                    out.append((a, b, c))
                    if 0 < b < a < c:
                        out.append((a, -b, c))
            a += 1
        b += 2
    return sorted(out)


def class_number(D: int) -> int:
    return len(reduced_forms(D))


@dataclass(frozen=True)
class HeegnerForm:
    A: int
    B: int
    C: int
    D: int
    r: int

    def tau(self, digits: int | None = None):
        """CM point (-B + sqrt D) / 2A in the upper half plane."""
        with mpmath.workdps((digits or 15) + lat.GUARD):
            return mpc(-self.B, mpmath.sqrt(-self.D)) / (2 * self.A)

    def as_tuple(self):
        return (self.A, self.B, self.C)


def heegner_representatives(N: int, D: int, r: int, max_k: int | None = None) -> list[HeegnerForm]:
    """One Heegner form per form class: N | A, B = r (mod 2N), B^2 - 4AC = D.

    Scans A = N, 2N, 3N, ... and, for each A, B = r (mod 2N) in [0, 2A);
    the first form met in each class is kept.
    """
    if (r * r - D) % (4 * N):
        raise ValueError(f"r = {r} is not a square root of {D} mod {4 * N}")
    h = class_number(D)
    max_k = max_k or 10 * abs(D) + 100
    found: dict[tuple[int, int, int], HeegnerForm] = {}
    for k in range(1, max_k + 1):
        A = N * k
        for B in range(r % (2 * N), 2 * A, 2 * N):
            num = B * B - D
            if num % (4 * A):
                continue
            C = num // (4 * A)
            if math.gcd(math.gcd(A, B), C) != 1:
                continue
            cls = reduce_form(A, B, C)
            if cls not in found:
                found[cls] = HeegnerForm(A, B, C, D, r % (2 * N))
                if len(found) == h:
                    return list(found.values())
    raise RuntimeError(f"found {len(found)} of {h} Heegner classes for N={N}, D={D}, r={r}")


# ---------------------------------------------------------------------------
# modular parametrisation

def truncation_bound(tau, digits: int) -> int:
    """Smallest M with |q|^(M+1) / (1 - |q|) <= 10^-digits, q = e^{2 pi i tau}.

    |a_m / m| <= d(m) / sqrt(m) <= 1 for every m with a_m != 0, so this bounds
    the tail of the q-expansion.
    """
    with mpmath.workdps(30):
        y = mpc(tau).imag
        if y <= 0:
            raise ValueError("tau must lie in the upper half plane")
        log_q = -2 * mpmath.pi * y
        one_minus = -mpmath.expm1(log_q)
        need = digits * mpmath.log(10) - mpmath.log(one_minus)
        return max(int(mpmath.ceil(need / -log_q)) - 1, 1)


def _fixed(z, bits: int) -> tuple[int, int]:
    z = mpc(z)
    return int(mpmath.nint(z.real * 2**bits)), int(mpmath.nint(z.imag * 2**bits))


def phi_eval(tau, coeffs: CoefficientTable, digits: int | None = None,
             terms: int | None = None):
    """sum_{m <= M} (a_m / m) e^{2 pi i m tau}.

    ``M`` comes from :func:`truncation_bound` unless ``terms`` is given.  The sum
    runs in binary fixed point with guard bits for the rounding of ~M steps.
    """
    digits = resolve_digits(digits)
    M = terms if terms is not None else truncation_bound(tau, digits)
    if coeffs.limit < M:
        raise CoefficientTableTooSmall(M, coeffs.limit)
    vals = coeffs.values
    # odd m = 3 (mod 4) and even m vanish for this family; skip them when they do
    step = 4 if not (vals[2 : M + 1 : 2].any() or vals[3 : M + 1 : 4].any()) else 1
    guard = 10 + len(str(M))
    bits = math.ceil((digits + guard) * math.log2(10))
    with mpmath.workprec(bits + 64):
        q = mpmath.exp(2j * mpmath.pi * mpc(tau))
        cr, ci = _fixed(q, bits)
        sr, si = _fixed(q**step, bits)
    acc_r = acc_i = 0
    a = vals[: M + 1].tolist()
    for m in range(1, M + 1, step):
        am = a[m]
        if am:
            acc_r += am * cr // m
            acc_i += am * ci // m
        cr, ci = (cr * sr - ci * si) >> bits, (cr * si + ci * sr) >> bits
    with mpmath.workprec(bits + 64):
        return mpc(mpf(acc_r) / 2**bits, mpf(acc_i) / 2**bits)


def required_terms(forms: list[HeegnerForm], digits: int) -> int:
    return max((truncation_bound(f.tau(digits), digits) for f in forms), default=1)


def phi_sum(forms: list[HeegnerForm], coeffs: CoefficientTable, digits: int,
            terms: int | None = None):
    """Unreduced sum of the parametrisation over the Heegner forms."""
    with mpmath.workdps(digits + lat.GUARD):
        total = mpc(0)
        for f in forms:
            total += phi_eval(f.tau(digits), coeffs, digits, terms)
        return total


def heegner_sum(forms: list[HeegnerForm], coeffs: CoefficientTable, L: lat.PeriodLattice,
                digits: int | None = None, terms: int | None = None, scale=1):
    """U = sum Phi(tau_i), times ``scale``, reduced into [0, omega)^2."""
    digits = digits or L.digits
    with mpmath.workdps(digits + lat.GUARD):
        U = phi_sum(forms, coeffs, digits, terms) * _as_mpf(scale)
        return lat.reduce_mod_lattice(U, L)


def _as_mpf(v):
    if isinstance(v, Fraction):
        return mpf(v.numerator) / v.denominator
    return mpf(v)


def real_residual(U, L: lat.PeriodLattice):
    """Distance of Im(U) from the real-symmetric lines Im = 0 and Im = omega/2."""
    with mpmath.workdps(L.digits + lat.GUARD):
        t = lat.reduce_mod_lattice(U, L, centered=True).imag
        h = L.omega1 / 2
        return min(abs(t), abs(abs(t) - h))


# ---------------------------------------------------------------------------
# pipeline

@dataclass
class Config:
    digits: int = 60
    terms: int | None = None
    disc: int | None = None
    lattice_scale: object = 1
    cache_path: str | None = None
    output: str = "text"
    double_first: bool = False
    force: bool = False
    max_disc: int = 10_000
    max_disc_attempts: int = 6
    escalations: int = 2
    max_divisor: int = 12
    workers: int = 1

    def __post_init__(self):
        if self.digits < 30:
            raise ValueError("precision must be at least 30 digits")
        if self.terms is not None and self.terms < 16:
            raise ValueError("terms override must be at least 16")
        if self.output not in ("text", "json"):
            raise ValueError("output must be 'text' or 'json'")


@dataclass
class Certificate:
    n: int
    verdict: Verdict
    D: int | None = None
    r: int | None = None
    h: int | None = None
    forms: list[HeegnerForm] = field(default_factory=list)
    U: mpc | None = None
    point: tuple[Fraction, Fraction] | None = None
    triangle: Triangle | None = None
    diagnostics: dict = field(default_factory=dict)

    def check(self) -> bool:
        """Re-verify a Congruent verdict with exact arithmetic only."""
        if self.verdict is not Verdict.CONGRUENT:
            return False
        x, y = self.point
        a, b, c = self.triangle
        n = self.n
        return y * y == x**3 - n * n * x and a * a + b * b == c * c and a * b == 2 * n

    def to_dict(self) -> dict:
        def q(v):
            return None if v is None else f"{v.numerator}/{v.denominator}"

        def num(v, k=40):
            return mpmath.nstr(v, k, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)

        d = {
            "n": self.n,
            "verdict": self.verdict.value,
            "D": self.D,
            "r": self.r,
            "h": self.h,
            "forms": [list(f.as_tuple()) for f in self.forms],
            "U": None if self.U is None else {"re": num(self.U.real), "im": num(self.U.imag)},
            "point": None if self.point is None else {"x": q(self.point[0]), "y": q(self.point[1])},
            "triangle": None if self.triangle is None else
            {"a": q(self.triangle.a), "b": q(self.triangle.b), "c": q(self.triangle.c)},
        }
        diag = {}
        for k, v in self.diagnostics.items():
            if isinstance(v, (mpf, mpc)):
                v = mpmath.nstr(v, 10)
            diag[k] = v
        d["diagnostics"] = diag
        return d


def _recover_point(z, L: lat.PeriodLattice, n: int, den_bound: int):
    """Exact rational point with elliptic log ``z``, or None.  Returns
    ((x, y), y_crosscheck); y comes from x exactly, its sign from p'/2."""
    x_num, y_num = lat.lattice_to_curve_point(z, L)
    x = rational_reconstruct(x_num.real, den_bound)
    if x is None:
        return None
    y = is_rational_square(x**3 - n * n * x)
    if y is None or y == 0:
        return None
    if y_num.real < 0:
        y = -y
    return (x, y), rational_reconstruct(y_num.real, den_bound) == y


def _divisions(U, L: lat.PeriodLattice, k: int):
    """Classes z with k z = U that are real, i.e. candidates for rational points."""
    w = L.omega1
    tol = lat.default_tolerance(L)
    for a in range(k):
        for b in range(k):
            z = (U + mpc(a, b) * w) / k
            if real_residual(z, L) < tol and not lat.in_torsion_image(z, L):
                yield z


def _attempt(n: int, E: CongruentCurve, dd: DiscriminantData, config: Config, digits: int, diag: dict):
    """One Heegner computation at fixed precision.  Returns (status, payload)."""
    forms = heegner_representatives(E.conductor, dd.D, dd.r)
    M = config.terms or required_terms(forms, digits)
    coeffs = load_or_compute(n, M, config.cache_path, workers=config.workers)
    L = lat.periods(n, digits)
    with mpmath.workdps(digits + lat.GUARD):
        U = heegner_sum(forms, coeffs, L, digits, config.terms, config.lattice_scale)
        diag.update(digits=digits, terms=M, imag_residual=real_residual(U, L))
        if lat.in_torsion_image(U, L):
            return "torsion", (forms, U, None)
        diag["x_approx"] = mpmath.nstr(lat.wp(U, L).real, 20)
        den_bound = 10 ** max(digits // 2 - 5, 1)
        found, k = _recover_point(U, L, n, den_bound), 1
        # a Heegner point can be a large multiple of a small point; a rational
        # k-th division has a much smaller height and certifies n just as well
        while found is None and k < config.max_divisor:
            k += 1
            hits = [h for h in (_recover_point(z, L, n, den_bound) for z in _divisions(U, L, k)) if h]
            if hits:
                found = min(hits, key=lambda h: h[0][0].denominator)
        if found is None:
            return "precision", (forms, U, "continued fraction found no rational point")
        (x, y), crosscheck = found
        diag.update(divisor=k, y_crosscheck=crosscheck)
    return "point", (forms, U, (x, y))


def verify(n: int, config: Config | None = None) -> Certificate:
    """Try to certify that ``n`` is congruent via a Heegner point."""
    config = config or Config()
    E = CongruentCurve(n)
    diag: dict = {"attempts": []}
    if epsilon_sign(n) == 1 and not config.force:
        diag["reason"] = "root number is +1 (n = 1, 2, 3 mod 8); the method does not apply"
        return Certificate(n, Verdict.INAPPLICABLE, diagnostics=diag)

    if config.disc is not None:
        if not is_admissible(E.conductor, config.disc):
            diag["reason"] = f"D = {config.disc} is not admissible for N = {E.conductor}"
            return Certificate(n, Verdict.INCONCLUSIVE, diagnostics=diag)
        candidates = [config.disc]
    else:
        candidates = admissible_discriminants(E.conductor, config.max_disc)

    last = None
    for i, D in enumerate(candidates):
        if i >= config.max_disc_attempts:
            break
        dd = discriminant_data(E.conductor, D)
        for k in range(config.escalations + 1):
            digits = config.digits * 2**k
            status, (forms, U, extra) = _attempt(n, E, dd, config, digits, diag)
            diag["attempts"].append({"D": D, "digits": digits, "status": status})
            log.info("n=%d D=%d digits=%d: %s", n, D, digits, status)
            if status != "precision":
                break
        last = (dd, forms, U)
        if status == "point":
            x, y = extra
            triangle = triangle_from_point((x, y), E, double_first=config.double_first)
            cert = Certificate(n, Verdict.CONGRUENT, D, dd.r, dd.h, forms, U, (x, y),
                               triangle, diag)
            if not cert.check():
                raise AssertionError("exact verification failed")
            return cert
        if status == "precision":
            diag["reason"] = f"D = {D}: rational reconstruction failed at {digits} digits ({extra})"
        else:
            diag["reason"] = f"Heegner sum for D = {D} is 2-torsion"

    cert = Certificate(n, Verdict.INCONCLUSIVE, diagnostics=diag)
    if last is not None:
        cert.D, cert.r, cert.h = last[0].D, last[0].r, last[0].h
        cert.forms, cert.U = last[1], last[2]
    diag.setdefault("reason", "no admissible discriminant found")
    return cert
