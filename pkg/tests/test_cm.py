import random

import mpmath
import pytest

from genlambda.cm import (
    CMPoint,
    HPComplex,
    cm_certify,
    e_value,
    fundamental_reduce,
    j_value,
    lambda_k_value,
    lambda_value,
    mobius,
    wp_value,
)
from genlambda.cyclotomic import CycNum
from genlambda.eisenstein import IndexPair, e_series, index_transform
from genlambda.lambdas import BasisPair, lambda_basis
from genlambda.modpoly import PsiPoly, psi_poly
from genlambda.sl2 import SL2Mat, random_gamma, random_sl2

I = mpmath.mpc(0, 1)


def close(ball, value, tol):
    return abs(ball.mid - value) + ball.rad < tol


def test_ball_arithmetic_contains_truth():
    mpmath.mp.dps = 30
    a = HPComplex(mpmath.mpc(1, 2), mpmath.mpf("1e-20"))
    b = HPComplex(mpmath.mpc(-3, 0.5), mpmath.mpf("1e-21"))
    with mpmath.workdps(60):
        ta, tb = mpmath.mpc(1, 2) + mpmath.mpf("0.9e-20"), mpmath.mpc(-3, 0.5)
        for got, want in [(a + b, ta + tb), (a * b, ta * tb), (a / b, ta / tb), (a - b, ta - tb)]:
            assert abs(got.mid - want) <= got.rad


def test_fundamental_reduce_examples():
    mpmath.mp.dps = 40
    tau, a = fundamental_reduce(I)
    assert a == SL2Mat.identity() and tau == I
    tau, a = fundamental_reduce(I + 5)
    assert a == SL2Mat(1, -5, 0, 1) and abs(tau - I) < mpmath.mpf(10) ** -35
    start = mpmath.mpc(-1, 1) / 2
    tau, a = fundamental_reduce(start)
    assert abs(tau.real) <= 0.5 and abs(tau) >= 1 - mpmath.mpf(10) ** -30
    assert abs(mobius(a, start).mid - tau) < mpmath.mpf(10) ** -35
    with pytest.raises(ValueError):
        fundamental_reduce(mpmath.mpc(0, -1))


def test_e_value_far_cusp():
    mpmath.mp.dps = 60
    v = e_value(IndexPair(2, 0, 1), 10 * I, 50)
    want = mpmath.mpf(-1) / 4 - 4 * mpmath.exp(-20 * mpmath.pi)
    assert abs(v.mid - want) < mpmath.mpf(10) ** -30


def test_e_value_periodic():
    mpmath.mp.dps = 50
    tau = mpmath.mpc("0.3", "1.1")
    p = IndexPair(5, 2, 1)
    a, b = e_value(p, tau, 40), e_value(p, tau + 5, 40)
    assert abs(a.mid - b.mid) <= a.rad + b.rad + mpmath.mpf(10) ** -38


def test_e_value_matches_series():
    mpmath.mp.dps = 60
    rng = random.Random(2)
    for _ in range(4):
        n = rng.choice([3, 5, 7])
        p = IndexPair(n, rng.randrange(n), rng.randrange(1, n))
        tau = mpmath.mpc(rng.uniform(-0.5, 0.5), rng.uniform(1.0, 1.5))
        v = e_value(p, tau, 50)
        s = e_series(p, 400).evaluate(mpmath.exp(2j * mpmath.pi * tau / n))
        assert abs(v.mid - s) < mpmath.mpf(10) ** -40 + v.rad


def test_error_bound_is_sound():
    """A radius computed at 30 digits must cover the value computed at 60."""
    rng = random.Random(11)
    for _ in range(5):
        n = rng.choice([3, 4, 7])
        p = IndexPair(n, rng.randrange(n), rng.randrange(1, n))
        tau = mpmath.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 1.3))
        with mpmath.workdps(80):
            lo = e_value(p, tau, 30)
            hi = e_value(p, tau, 60)
            assert abs(lo.mid - hi.mid) <= lo.rad + hi.rad
            assert lo.rad < mpmath.mpf(10) ** -29


def test_wp_weight_two():
    mpmath.mp.dps = 60
    rng = random.Random(4)
    for _ in range(4):
        n = rng.choice([3, 5, 8])
        p = IndexPair(n, rng.randrange(n), rng.randrange(1, n))
        a = random_sl2(rng, 5)
        tau = mpmath.mpc(rng.uniform(-0.5, 0.5), rng.uniform(1.0, 1.4))
        lhs = wp_value(p, mobius(a, tau).mid, 50) / (HPComplex.exact(tau) * a.c + a.d) ** 2
        rhs = wp_value(index_transform(p, a), tau, 50)
        assert abs(lhs.mid - rhs.mid) < mpmath.mpf(10) ** -30


def test_lambda_values():
    mpmath.mp.dps = 50
    v = lambda_value(BasisPair(2, (1, 0), (0, 1)), I, 40)
    assert close(v, -1, mpmath.mpf(10) ** -30)
    tau = 2 * I
    bp = BasisPair(5, (1, 2), (0, 3))
    s = lambda_basis(bp, 200).evaluate(mpmath.exp(2j * mpmath.pi * tau / 5))
    assert abs(lambda_value(bp, tau, 40).mid - s) < mpmath.mpf(10) ** -35


def test_lambda_gamma_invariance_numeric():
    mpmath.mp.dps = 50
    rng = random.Random(8)
    theta = mpmath.mpc("0.1", "1.2")
    base = lambda_k_value(5, 2, theta, 40)
    for _ in range(3):
        g = random_gamma(rng, 5, size=1)
        moved = mobius(g, theta).mid
        v = lambda_k_value(5, 2, moved, 40)
        assert abs(v.mid - base.mid) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize(
    "point,value",
    [("i", 1728), ("(1+sqrt(3)*i)/2", 0), ("sqrt(2)*i", 8000)],
)
def test_j_values(point, value):
    mpmath.mp.dps = 50
    with mpmath.workdps(50):
        v = j_value(CMPoint.parse(point).value(), 45)
        assert close(v, value, mpmath.mpf(10) ** -30)


def test_cm_point_parse():
    assert CMPoint.parse("(1+sqrt(3)i)/2").theta == CMPoint.from_discriminant(-3).theta
    assert CMPoint.from_discriminant(-8).theta == mpmath.mpc(0, mpmath.sqrt(2))
    with pytest.raises(ValueError):
        CMPoint.parse("-i")
    with pytest.raises(ValueError):
        CMPoint.parse("__import__('os')")
    with pytest.raises(ValueError):
        CMPoint.from_discriminant(-5)


def test_certify_level_two():
    cert = cm_certify(2, 1, CMPoint.parse("i"), 40)
    assert cert.verdict == "pass"
    assert abs(cert.x.mid + 16) + cert.x.rad < mpmath.mpf(10) ** -30
    data = cert.to_json()
    assert set(data) >= {"inputs", "x", "j_theta", "residual", "err", "verdict"}


def test_identity_holds_off_cm_points():
    # Psi_k(C_N Lambda_k(tau), j(tau)) = 0 for every tau; CM only adds integrality
    cert = cm_certify(3, 1, CMPoint.parse("0.21+1.37i"), 40)
    assert cert.verdict == "pass"


def test_tampered_table_fails():
    psi = psi_poly(3, 1)
    bad = PsiPoly(psi.level, psi.k, psi.degree, dict(psi.coeffs), {})
    bad.coeffs[(0, 0)] = bad.coeffs.get((0, 0), CycNum.zero(3)) + 1
    cert = cm_certify(3, 1, CMPoint.parse("i"), 40, psi=bad)
    assert cert.verdict == "fail"


def test_psi_mismatch_rejected():
    with pytest.raises(ValueError):
        cm_certify(3, 1, CMPoint.parse("i"), 30, psi=psi_poly(3, 2))


def test_constant_shift_breaks_weight_two():
    """E = W - 1/12 with W of weight two, so E picks up (1 - (c tau + d)^-2) / 12."""
    mpmath.mp.dps = 60
    p = IndexPair(5, 1, 2)
    a = SL2Mat(2, 1, 1, 1)
    tau = mpmath.mpc("0.1", "1.2")
    f = HPComplex.exact(tau) * a.c + a.d
    lhs = e_value(p, mobius(a, tau).mid, 50) / (f * f)
    rhs = e_value(index_transform(p, a), tau, 50)
    gap = (1 - 1 / (f.mid * f.mid)) / 12
    assert abs((lhs.mid - rhs.mid) - gap) < mpmath.mpf(10) ** -40
    assert abs(gap) > 0.01
