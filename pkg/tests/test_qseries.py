from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from genlambda.cyclotomic import CycNum, euler_phi
from genlambda.qseries import (
    PrecisionError,
    QSeries,
    mul_rows,
    series_arith,
    series_div,
    series_galois,
    series_is_integral,
)


def z(n, e=1):
    return CycNum.zeta(n, e)


def S(n, order, coeffs, prec=None):
    return QSeries(n, order, coeffs, prec)


def test_add_examples():
    f = S(3, 1, [1, 1], 5)
    g = S(3, 1, [-1], 4)
    h = series_arith(f, g, "add")
    assert h == S(3, 2, [1], 4)
    assert h.precision == 4


def test_mul_examples():
    assert series_arith(S(3, -1, [1], 6), S(3, 1, [1], 6), "mul") == S(3, 0, [1], 5)
    p = 12
    geo = S(5, 0, [1] * p, p)
    assert series_arith(S(5, 0, [1, -1], p), geo, "mul") == QSeries.constant(5, 1, p)


def test_div_examples():
    assert series_div(S(4, 2, [1], 10), S(4, 1, [1], 10)) == S(4, 1, [1], 9)
    p = 15
    assert series_div(QSeries.constant(4, 1, p), S(4, 0, [1, -1], p)) == S(4, 0, [1] * p, p)


def test_division_precision_rule():
    f = S(5, -2, [1, 2, 3, 4, 5, 6], 10)
    g = S(5, 1, [z(5), 1, 1, 1], 8)
    assert (f / g).precision == min(f.precision - g.order, f.order + g.precision - 2 * g.order)


def test_zero_keeps_precision():
    f = S(7, 0, [1, z(7), 3], 9)
    d = f - f
    assert d.is_zero() and d.precision == 9


def test_galois_examples():
    assert series_galois(S(5, 1, [z(5)], 4), 2) == S(5, 1, [z(5, 2)], 4)
    f = S(5, -1, [3, Fraction(1, 2), -7], 6)
    assert all(series_galois(f, ell) == f for ell in (1, 2, 3, 4))


def test_integrality_examples():
    assert series_is_integral(S(3, -1, [1, z(3)]))
    assert not series_is_integral(S(3, 1, [Fraction(1, 2)]))
    lead = (1 - z(3)) ** 3 * z(3).inverse()
    assert lead == CycNum(3, [-3, 3])
    assert series_is_integral(S(3, 1, [lead, 7 * z(3)], 4))


def test_unknown_coefficient():
    with pytest.raises(PrecisionError):
        S(3, 0, [1, 2], 2)[2]


def test_json_roundtrip():
    f = S(5, -1, [z(5), Fraction(2, 3), 0, 1 + z(5, 3)], 7)
    assert QSeries.from_json(f.to_json()) == f
    zero = QSeries.zero(5, 11)
    assert QSeries.from_json(zero.to_json()) == zero


def test_inflate():
    f = S(3, -1, [1, 2, 3], 2)
    g = f.inflate(3)
    assert g.order == -3 and g.precision == 6
    assert g[0] == CycNum.rational(3, 2) and g[1].is_zero()


def test_kronecker_product_matches_schoolbook():
    n, phi = 7, euler_phi(7)
    a = [tuple((i * 31 + t * 7) % 23 - 11 for t in range(phi)) for i in range(20)]
    b = [tuple((i * 17 + t * 5) % 19 - 9 for t in range(phi)) for i in range(20)]
    got = mul_rows(n, a, b, 20)
    ca = [CycNum(n, r) for r in a]
    cb = [CycNum(n, r) for r in b]
    for e in range(20):
        want = sum((ca[i] * cb[e - i] for i in range(e + 1)), CycNum.zero(n))
        assert tuple(want.coeffs) == got[e]


levels = st.sampled_from([2, 3, 4, 5, 7, 8, 12])


@st.composite
def series(draw, n=None, nonzero=False):
    n = n or draw(levels)
    phi = euler_phi(n)
    order = draw(st.integers(-3, 3))
    length = draw(st.integers(1 if nonzero else 0, 10))
    cs = []
    for i in range(length):
        row = draw(st.lists(st.integers(-9, 9), min_size=phi, max_size=phi))
        if i == 0 and nonzero and not any(row):
            row[0] = 1
        cs.append(CycNum(n, [Fraction(c, draw(st.integers(1, 3))) for c in row]))
    return S(n, order, cs, order + length + draw(st.integers(0, 3)))


@st.composite
def series_pair(draw, nonzero=False):
    n = draw(levels)
    return draw(series(n)), draw(series(n, nonzero=nonzero))


@given(series_pair())
def test_mul_commutative(p):
    f, g = p
    assert f * g == g * f


@given(st.data())
def test_mul_associative(data):
    n = data.draw(levels)
    f, g, h = (data.draw(series(n)) for _ in range(3))
    assert (f * g) * h == f * (g * h)


@given(series_pair(nonzero=True))
def test_div_mul_roundtrip(p):
    f, g = p
    back = (f / g) * g
    assert back.agrees_with(f)
    assert back.precision <= f.precision


@given(series(nonzero=True))
def test_self_division(f):
    q = f / f
    assert q.agrees_with(QSeries.constant(f.level, 1, q.precision))


@given(series_pair(nonzero=True), st.data())
def test_galois_commutes(p, data):
    f, g = p
    n = f.level
    ell = data.draw(st.sampled_from([u for u in range(1, n) if gcd(u, n) == 1]))
    m = data.draw(st.sampled_from([u for u in range(1, n) if gcd(u, n) == 1]))
    assert (f + g).galois(ell) == f.galois(ell) + g.galois(ell)
    assert (f * g).galois(ell) == f.galois(ell) * g.galois(ell)
    assert (f / g).galois(ell) == f.galois(ell) / g.galois(ell)
    assert f.galois(ell).galois(m) == f.galois(ell * m % n)


@given(series_pair(nonzero=True), st.integers(1, 4))
def test_precision_is_conservative(p, drop):
    """Truncating the inputs first can only lose known coefficients, never change them."""
    f, g = p
    full = (f * g + f) / g
    f2 = f.truncate(max(f.precision - drop, min(f.order + 1, f.precision)))
    g2 = g.truncate(max(g.precision - drop, g.order + 1))
    low = (f2 * g2 + f2) / g2
    assert low.precision <= full.precision
    assert full.truncate(low.precision) == low
