"""The weight-two functions E(tau; r, s) attached to N-division points.

E(tau; r, s) = wp((r tau + s)/N; L_tau) / (2 pi i)^2 - 1/12, expanded in
q = exp(2 pi i tau / N). Differences of two such functions are the building
blocks of every lambda function in this package.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .cyclotomic import CycNum, euler_phi, power_table
from .qseries import QSeries
from .sl2 import SL2Mat


class DegenerateDifference(ValueError):
    """E(p1) - E(p2) vanishes identically because p2 = +-p1 mod N."""


@dataclass(frozen=True)
class IndexPair:
    level: int
    r: int
    s: int

    def __post_init__(self):
        n = self.level
        if n < 2:
            raise ValueError(f"level must be >= 2, got {n}")
        object.__setattr__(self, "r", self.r % n)
        object.__setattr__(self, "s", self.s % n)
        if self.r == 0 and self.s == 0:
            raise ValueError(f"(0, 0) is not a valid index pair mod {n}")

    def __neg__(self) -> "IndexPair":
        return IndexPair(self.level, -self.r, -self.s)

    def __add__(self, other: "IndexPair") -> "IndexPair":
        return IndexPair(self.level, self.r + other.r, self.s + other.s)

    def reduced(self) -> "ReducedIndex":
        brace, mu = brace_mu(self.r, self.level)
        return ReducedIndex(brace, mu, (mu * self.s) % self.level)

    def equiv_pm(self, other: "IndexPair") -> bool:
        return (self.r, self.s) in ((other.r, other.s), ((-other).r, (-other).s))


@dataclass(frozen=True)
class ReducedIndex:
    brace: int
    mu: int
    omega_exponent: int


def brace_mu(x: int, n: int) -> tuple[int, int]:
    """The pair ({x}, mu(x)) with 0 <= {x} <= n/2 and x = mu(x) {x} mod n.

    mu(x) = 1 when x = 0 or n/2 mod n; otherwise the sign is forced.
    """
    if n < 2:
        raise ValueError(f"level must be >= 2, got {n}")
    y = x % n
    if 2 * y <= n:
        return y, 1
    return n - y, -1


def index_transform(p: IndexPair, a: SL2Mat) -> IndexPair:
    """Index of E(tau; p)[A]_2, i.e. the row vector p times A."""
    if a.det != 1:
        raise ValueError(f"det {a} != 1")
    return IndexPair(p.level, a.a * p.r + a.c * p.s, a.b * p.r + a.d * p.s)


def omega_theta_zero(n: int, omega_exp: int) -> CycNum:
    """omega / (1 - omega)^2 for omega = zeta^omega_exp != 1."""
    w = CycNum.zeta(n, omega_exp)
    return w / (1 - w) ** 2


def _e_series_uncached(n: int, r: int, s: int, prec: int) -> QSeries:
    brace, mu = brace_mu(r, n)
    w = (mu * s) % n
    table = power_table(n)
    phi = euler_phi(n)
    acc = [[0] * phi for _ in range(prec)]

    def put(e: int, coef: int, zexp: int) -> None:
        if e < prec:
            row = acc[e]
            for t, v in enumerate(table[zexp % n]):
                if v:
                    row[t] += coef * v

    if brace:
        m = 1
        while m * brace < prec:
            put(m * brace, m, m * w)
            m += 1
    # double sum: n (u^n + u^-n - 2) q^(m n N); smallest exponent is m n N - n {r}
    k = 1
    while k * (n - brace) < prec:
        m = 1
        while k * (m * n - brace) < prec:
            base = m * k * n
            put(base + k * brace, k, k * w)
            put(base - k * brace, k, -k * w)
            put(base, -2 * k, 0)
            m += 1
        k += 1
    series = QSeries.from_int_rows(n, 0, [tuple(r_) for r_ in acc], prec)
    if brace == 0:
        series = series + omega_theta_zero(n, w)
    return series


_cache: dict[tuple[int, int, int], QSeries] = {}
_cache_lock = threading.Lock()


def e_series(p: IndexPair, prec: int) -> QSeries:
    """q-expansion of E(tau; r, s) modulo q^prec.

    Every term with exponent below ``prec`` is included, including the
    u^-n q^(mnN) terms that land at low order when {r} = N/2.
    """
    if prec < 1:
        raise ValueError(f"precision must be >= 1, got {prec}")
    key = (p.level, p.r, p.s)
    hit = _cache.get(key)
    if hit is not None and hit.precision >= prec:
        return hit if hit.precision == prec else hit.truncate(prec)
    series = _e_series_uncached(p.level, p.r, p.s, prec)
    with _cache_lock:
        cur = _cache.get(key)
        if cur is None or cur.precision < prec:
            _cache[key] = series
    return series


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def e_diff_series(p1: IndexPair, p2: IndexPair, prec: int) -> QSeries:
    """E(tau; p1) - E(tau; p2) modulo q^prec; never identically zero."""
    if p1.level != p2.level:
        raise ValueError("index pairs at different levels")
    if p1.equiv_pm(p2):
        raise DegenerateDifference(f"({p1.r},{p1.s}) = +-({p2.r},{p2.s}) mod {p1.level}")
    return e_series(p1, prec) - e_series(p2, prec)


def theta_leading(p1: IndexPair, p2: IndexPair) -> tuple[int, CycNum]:
    """Order t and leading coefficient theta of E(p1) - E(p2).

    The closed form assumes {r1} <= {r2}; when the caller's pairs come in the
    other order the difference is negated, and so is the returned theta.
    """
    n = p1.level
    if p1.equiv_pm(p2):
        raise DegenerateDifference(f"({p1.r},{p1.s}) = +-({p2.r},{p2.s}) mod {n}")
    sign = 1
    x1, x2 = p1.reduced(), p2.reduced()
    if x1.brace > x2.brace:
        x1, x2, sign = x2, x1, -1
    w1 = CycNum.zeta(n, x1.omega_exponent)
    w2 = CycNum.zeta(n, x2.omega_exponent)
    t = x1.brace
    if x1.brace == x2.brace:
        if t == 0:
            theta = (w1 - w2) * (1 - w1 * w2) / ((1 - w1) ** 2 * (1 - w2) ** 2)
        elif 2 * t == n:
            theta = -(w1 - w2) * (1 - w1 * w2) / (w1 * w2)
        else:
            theta = w1 - w2
    else:
        theta = w1 if t else w1 / (1 - w1) ** 2
    if theta.is_zero():
        raise ArithmeticError(
            f"theta vanished for ({p1.r},{p1.s}), ({p2.r},{p2.s}) at N={n}; "
            "the leading-term table does not cover this pair"
        )
    return t, theta * sign
