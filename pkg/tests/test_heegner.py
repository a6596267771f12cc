import json
from fractions import Fraction as Q
from importlib import resources
from math import gcd

import jsonschema
import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congruent.arith import is_fundamental_discriminant
from congruent.heegner import (
    Certificate, CoefficientTableTooSmall, Config, HeegnerForm, Verdict, admissible_discriminants,
    choose_discriminant, class_number, discriminant_data, epsilon_sign, heegner_representatives,
    heegner_roots, heegner_sum, is_admissible, phi_eval, phi_sum, real_residual, reduce_form,
    reduced_forms, required_terms, truncation_bound, verify,
)
from congruent.lattice import lattice_distance, periods
from congruent.lseries import coefficients


def _admissible_brute(N, D):
    return (D % 2 != 0 and is_fundamental_discriminant(D) and gcd(D, 2 * N) == 1
            and any((x * x - D) % (4 * N) == 0 for x in range(2 * N)))


def test_epsilon():
    assert [epsilon_sign(n) for n in (1, 2, 3, 5, 6, 7, 13, 14, 15, 17)] == [
        1, 1, 1, -1, -1, -1, -1, -1, -1, 1]
    with pytest.raises(ValueError):
        epsilon_sign(4)


@pytest.mark.parametrize("N", [800, 5408, 32 * 36, 32 * 49])
def test_admissibility_against_brute_force(N):
    for D in range(-3, -400, -1):
        assert is_admissible(N, D) == _admissible_brute(N, D), D
    gen = list(admissible_discriminants(N, 400))
    assert gen == [D for D in range(-3, -400, -1) if _admissible_brute(N, D)]


def test_discriminant_choice():
    # smallest admissible discriminant; for n = 13 it gives a torsion sum
    assert choose_discriminant(800).D == -31
    assert choose_discriminant(5408).D == -23
    d = discriminant_data(5408, -55)
    assert (d.D, d.h) == (-55, 4)
    assert heegner_roots(5408, -55) == [2269, 4829, 5987, 8547]
    assert heegner_roots(800, -31) == [113, 463, 1137, 1487]


def test_reduce_form():
    assert reduce_form(8000, 3313, 343) in reduced_forms(-31)
    assert reduce_form(1, 1, 8) == (1, 1, 8)
    assert reduce_form(2, -1, 4) == (2, -1, 4)
    assert reduce_form(4, 1, 2) == (2, -1, 4)
    assert reduce_form(2, 2, 3) == (2, 2, 3)
    assert reduce_form(2, -2, 3) == (2, 2, 3)
    assert reduced_forms(-31) == sorted([(1, 1, 8), (2, 1, 4), (2, -1, 4)])


@settings(max_examples=60)
@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-3, 3), st.integers(-3, 3))
def test_reduce_form_invariant_under_sl2(b0, k, u, v):
    # transform a reduced form by x -> x + k y and check we land back on it
    for f in reduced_forms(-84):
        a, b, c = f
        a2, b2, c2 = a, b + 2 * a * k, a * k * k + b * k + c
        assert reduce_form(a2, b2, c2) == f
        a3, b3, c3 = c2, -b2, a2  # (x, y) -> (-y, x)
        assert reduce_form(a3, b3, c3) == f


@pytest.mark.parametrize("N,D", [(800, -31), (5408, -55), (5408, -23), (32 * 49, -31), (1152, -23)])
def test_representatives_form_a_class_system(N, D):
    if not is_admissible(N, D):
        pytest.skip("not admissible")
    h = class_number(D)
    for r in heegner_roots(N, D):
        forms = heegner_representatives(N, D, r)
        assert len(forms) == h
        assert len({reduce_form(*f.as_tuple()) for f in forms}) == h
        for f in forms:
            assert f.A % N == 0 and (f.B - r) % (2 * N) == 0
            assert f.B * f.B - 4 * f.A * f.C == D and f.C > 0
            assert gcd(gcd(f.A, f.B), f.C) == 1


def test_representatives_for_n5():
    forms = heegner_representatives(800, -31, 113)
    assert [f.as_tuple() for f in forms] == [(800, 113, 4), (1600, 113, 2), (3200, 113, 1)]
    with pytest.raises(ValueError):
        heegner_representatives(800, -31, 114)


def _naive_phi(tau, coeffs, M, dps):
    with mpmath.workdps(dps):
        q = mpmath.exp(2j * mpmath.pi * tau)
        return mpmath.fsum(mpmath.mpf(coeffs[m]) / m * q**m for m in range(1, M + 1) if coeffs[m])


def test_phi_fixed_point_matches_naive_sum():
    coeffs = coefficients(5, 3000)
    f = heegner_representatives(800, -31, 113)[0]
    tau = f.tau(40)
    with mpmath.workdps(50):
        fast = phi_eval(tau, coeffs, 40, terms=3000)
        slow = _naive_phi(tau, coeffs, 3000, 60)
        assert abs(fast - slow) < mpmath.mpf(10) ** -38
    # a table with nonzero even entries disables the mod-4 stepping
    odd = coefficients(1, 200)
    with mpmath.workdps(40):
        t = mpmath.mpc(0.1, 0.05)
        assert abs(phi_eval(t, odd, 30, terms=200) - _naive_phi(t, odd, 200, 50)) < mpmath.mpf(10) ** -28


def test_truncation_bound_is_enough():
    coeffs = coefficients(5, 20_000)
    f = heegner_representatives(800, -31, 113)[-1]
    tau = f.tau(40)
    M = truncation_bound(tau, 40)
    with mpmath.workdps(50):
        a = phi_eval(tau, coeffs, 40)
        b = phi_eval(tau, coeffs, 40, terms=min(2 * M, 20_000))
        assert abs(a - b) < mpmath.mpf(10) ** -39


def test_table_too_small():
    f = heegner_representatives(800, -31, 113)[0]
    with pytest.raises(CoefficientTableTooSmall):
        phi_eval(f.tau(40), coefficients(5, 100), 40)
    with pytest.raises(ValueError):
        truncation_bound(mpmath.mpc(0, -1), 30)


def test_mixed_root_sum_n5():
    # the three reference CM points for n = 5 with the third numerator read as 13937
    P = 40
    L = periods(5, P)
    forms = [HeegnerForm(8000, B, (B * B + 31) // 32000, -31, B) for B in (3313, 12687, 13937)]
    coeffs = coefficients(5, required_terms(forms, P))
    U = phi_sum(forms, coeffs, P)
    assert abs(U.real - mpmath.mpf("-0.874107405430")) < 1e-11
    assert abs(U.imag - L.omega1) < 1e-10
    # and it agrees with the class system r = 113 modulo the lattice
    own = heegner_representatives(800, -31, 113)
    V = heegner_sum(own, coefficients(5, required_terms(own, P)), L, P)
    assert lattice_distance(U, V, L) < mpmath.mpf(10) ** -35


def test_mixed_root_sum_n13():
    # one form with A = N for each of the four roots, as in the reference computation
    P = 40
    L = periods(13, P)
    roots = [-8547, -5987, -4829, -2269]
    forms = [HeegnerForm(5408, B, (B * B + 55) // (4 * 5408), -55, B % 10816) for B in roots]
    coeffs = coefficients(13, required_terms(forms, P))
    U = phi_sum(forms, coeffs, P)
    assert abs(U.real - mpmath.mpf("-2.3665268305659182")) < 1e-15
    assert real_residual(U, L) < mpmath.mpf(10) ** -30


def test_verify_n5_certificate():
    cert = verify(5)
    assert cert.verdict is Verdict.CONGRUENT and cert.check()
    assert (cert.D, cert.h, cert.r) == (-31, 3, 113)
    assert cert.point == (Q(1681, 144), Q(-62279, 1728))
    assert cert.diagnostics["y_crosscheck"] is True


def test_verify_n13_skips_torsion_discriminant():
    cert = verify(13)
    assert cert.verdict is Verdict.CONGRUENT
    assert [a["status"] for a in cert.diagnostics["attempts"]] == ["torsion", "point"]
    assert cert.D == -55


def test_verify_options():
    assert verify(13, Config(disc=-23)).verdict is Verdict.INCONCLUSIVE
    bad = verify(5, Config(disc=-7))
    assert bad.verdict is Verdict.INCONCLUSIVE and "admissible" in bad.diagnostics["reason"]
    assert verify(5, Config(disc=-31)).verdict is Verdict.CONGRUENT
    # another lattice scale moves U; whatever comes out is still checked exactly
    half = verify(5, Config(lattice_scale=Q(1, 2), escalations=0))
    assert half.verdict is not Verdict.CONGRUENT or half.check()
    # too few terms: reconstruction fails or, at worst, never yields a false point
    few = verify(5, Config(terms=500, escalations=1))
    assert few.verdict is Verdict.INCONCLUSIVE
    for bad_cfg in (dict(digits=10), dict(terms=3), dict(output="xml")):
        with pytest.raises(ValueError):
            Config(**bad_cfg)


def test_division_recovers_tall_points():
    # 8 times the n = 5 point is far too tall for 60 digits; a 4th division is not
    cert = verify(5, Config(lattice_scale=8, escalations=0))
    assert cert.verdict is Verdict.CONGRUENT and cert.check()
    assert cert.diagnostics["divisor"] > 1
    nodiv = verify(5, Config(lattice_scale=8, escalations=0, max_divisor=1, max_disc_attempts=1))
    assert nodiv.verdict is Verdict.INCONCLUSIVE


def test_forced_run_on_root_number_plus_one():
    cert = verify(1, Config(force=True, max_disc_attempts=1))
    assert cert.verdict is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("n", [6, 7, 14, 15, 21, 30])
def test_more_congruent_numbers(n):
    cert = verify(n)
    assert cert.verdict is Verdict.CONGRUENT and cert.check()


def _from_dict(d):
    def q(s):
        return Q(s) if s is not None else None
    x, y = q(d["point"]["x"]), q(d["point"]["y"])
    a, b, c = (q(d["triangle"][k]) for k in "abc")
    return d["n"], (x, y), (a, b, c)


@pytest.mark.parametrize("n", [5, 13, 1])
def test_json_round_trip(n):
    schema = json.loads(resources.files("congruent").joinpath("certificate.schema.json").read_text())
    cert = verify(n)
    d = json.loads(json.dumps(cert.to_dict()))
    jsonschema.validate(d, schema)
    if cert.verdict is Verdict.CONGRUENT:
        m, (x, y), (a, b, c) = _from_dict(d)
        assert y * y == x**3 - m * m * x and a * a + b * b == c * c and a * b == 2 * m


def test_check_rejects_tampering():
    cert = verify(5)
    cert.point = (cert.point[0] + 1, cert.point[1])
    assert not cert.check()
    assert not Certificate(5, Verdict.INCONCLUSIVE).check()
