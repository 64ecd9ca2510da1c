import json
import random
from fractions import Fraction
from math import gcd

import pytest

from genlambda.cyclotomic import CycNum
from genlambda.modpoly import (
    PsiPoly,
    classical_sextic,
    coset_index,
    coset_reps,
    deflate,
    delta_coefficients,
    express_in_j,
    j_coefficients,
    j_series,
    psi_poly,
    psi_specialize,
    rational_table,
)
from genlambda.qseries import QSeries
from genlambda.sl2 import coset_key, random_sl2


@pytest.mark.parametrize("n,count", [(2, 6), (3, 12), (4, 24), (5, 60), (6, 72), (7, 168), (12, 576)])
def test_coset_counts(n, count):
    reps = coset_reps(n)
    assert coset_index(n) == count == len(reps)
    assert len({coset_key(m, n) for m in reps}) == count
    assert all(m.det == 1 for m in reps)


def test_j_expansion():
    assert j_coefficients(4)[:3] == (1, 744, 196884)
    assert delta_coefficients(3)[:2] == (1, -24)
    # independent recomputation at a larger truncation gives the same prefix
    assert j_coefficients(40)[:10] == j_coefficients(10)
    j = j_series(5)
    assert j.order == -1 and j[0] == CycNum.rational(2, 744)


def test_j_at_level():
    j = j_series(4, 3).inflate(3)
    assert j.order == -3 and j[3] == CycNum.rational(3, 196884)
    assert all(e % 3 == 0 for e in j.exponents())


def test_express_in_j_examples():
    n = 3
    j = j_series(20, n).inflate(n)
    e = express_in_j(j)
    assert e.coeffs == [CycNum.zero(n), CycNum.one(n)] and e.remainder_ok
    five = express_in_j(QSeries.constant(n, 5, 30))
    assert five.coeffs == [CycNum.rational(n, 5)] and five.remainder_ok
    sq = express_in_j(j * j)
    assert sq.coeffs == [CycNum.zero(n), CycNum.zero(n), CycNum.one(n)] and sq.remainder_ok


def test_express_in_j_detects_non_invariant():
    with pytest.raises(ValueError):
        express_in_j(QSeries(3, -1, [1, 0, 0, 1], 10))
    # level-one exponents but not a polynomial in j
    bad = j_series(10, 3).inflate(3) + QSeries.monomial(3, 3, 1, 30)
    assert not express_in_j(bad).remainder_ok


def test_deflate():
    f = QSeries(2, -2, [1, 0, 3, 0, 5], 3)
    g = deflate(f, 2)
    assert g.order == -1 and g[1] == CycNum.rational(2, 5)


def test_psi_level_two_is_classical_sextic():
    psi = psi_poly(2, 1)
    assert psi.degree == 6 and psi.is_monic() and psi.all_integral()
    assert rational_table(psi) == {k: Fraction(v) for k, v in classical_sextic().items()}
    assert psi.coeffs[(0, 0)] == CycNum.rational(2, 16**6)
    assert psi.checks["remainder_zero"] and psi.checks["min_verified_margin"] >= 16


def test_psi_specialize_level_two():
    psi = psi_poly(2, 1)
    poly = psi_specialize(psi, CycNum.rational(2, 1728))
    x = CycNum.rational(2, -16)
    val = sum((c * x**i for i, c in enumerate(poly)), CycNum.zero(2))
    assert val.is_zero()
    at_zero = psi_specialize(psi, CycNum.zero(2))
    assert at_zero == [psi.j_poly(i)[0] for i in range(psi.degree + 1)]


@pytest.mark.parametrize("k", [1, 2])
def test_psi_level_three(k):
    psi = psi_poly(3, k)
    assert psi.degree == 12 and psi.is_monic() and psi.all_integral()
    assert psi.checks["remainder_zero"] and psi.checks["exponents_multiple_of_level"]
    assert psi.checks["min_verified_margin"] >= 24


def test_psi_permuted_reps():
    rng = random.Random(3)
    g = random_sl2(rng, 8)
    reps = [m @ g for m in coset_reps(3)]
    assert psi_poly(3, 1, reps=reps).same_table(psi_poly(3, 1))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_psi_galois_coherence(n):
    base = psi_poly(n, 1)
    for ell in range(2, n):
        if gcd(ell, n) == 1:
            assert base.galois(ell).same_table(psi_poly(n, ell))


def test_psi_level_four():
    psi = psi_poly(4, 1)
    assert psi.degree == 24 and psi.is_monic() and psi.all_integral()


def test_psi_json_is_byte_stable():
    a = psi_poly(3, 2)
    b = psi_poly(3, 2)
    assert a.dumps() == b.dumps()
    back = PsiPoly.from_json(json.loads(a.dumps()))
    assert back.same_table(a) and back.dumps() == a.dumps()
