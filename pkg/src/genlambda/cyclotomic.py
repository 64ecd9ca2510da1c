"""Exact arithmetic in the cyclotomic field Q(zeta_N).

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(N)-1) modulo
the N-th cyclotomic polynomial, with ``fractions.Fraction`` coefficients.
The ring of integers of Q(zeta_N) is Z[zeta_N], so an element is an
algebraic integer exactly when every power-basis coefficient is an integer.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence


class LevelMismatch(ValueError):
    """Raised when elements of different cyclotomic fields are combined."""


# ---------------------------------------------------------------------------
# integer polynomials (lists, lowest degree first)


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(p: Sequence[int], q: Sequence[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_divmod(p: Sequence, d: Sequence) -> tuple[list, list]:
    """Long division by a polynomial; exact over Z when ``d`` is monic."""
    rem = list(p)
    d = _trim(list(d))
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    lead = d[-1]
    quot = [0] * max(len(rem) - len(d) + 1, 0)
    for i in range(len(rem) - len(d), -1, -1):
        c = rem[i + len(d) - 1]
        if c:
            if lead != 1:
                c = Fraction(c) / lead
            quot[i] = c
            for j, b in enumerate(d):
                rem[i + j] -= c * b
    return quot, _trim(rem[: len(d) - 1])


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``n == p**e`` (e >= 1), or None."""
    if n < 2:
        return None
    p = 2
    while p * p <= n and n % p:
        p += 1
    if n % p:
        p = n
    e, m = 0, n
    while m % p == 0:
        m //= p
        e += 1
    return (p, e) if m == 1 else None


@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> tuple[int, ...]:
    num = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        num, rem = _poly_divmod(num, _cyclotomic(d))
        assert not rem
    return tuple(int(c) for c in num)


def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n(x), lowest degree first.

    Obtained by dividing x^n - 1 by Phi_d for every proper divisor d.
    """
    if n < 2:
        raise ValueError(f"level must be >= 2, got {n}")
    return _cyclotomic(n)


@lru_cache(maxsize=None)
def power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Power-basis integer vectors of zeta^0, ..., zeta^(n-1)."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    rows = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x and reduce with x^deg = -(phi_0 + ... + phi_{deg-1} x^{deg-1})
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(rows)


def reduce_exponents(n: int, terms: Iterable[tuple[int, object]]) -> list:
    """Sum ``c * zeta^e`` over ``(e, c)`` pairs into a power-basis vector."""
    table = power_table(n)
    out = [0] * len(table[0])
    for e, c in terms:
        if c:
            for i, t in enumerate(table[e % n]):
                if t:
                    out[i] += c * t
    return out


# ---------------------------------------------------------------------------


class CycNum:
    """An element of Q(zeta_N). Immutable."""

    __slots__ = ("level", "coeffs", "_hash")

    def __init__(self, level: int, coeffs: Iterable = ()):
        if level < 2:
            raise ValueError(f"level must be >= 2, got {level}")
        deg = euler_phi(level)
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > deg:
            # treat as polynomial in zeta and reduce
            cs = reduce_exponents(level, enumerate(cs))
        cs += [Fraction(0)] * (deg - len(cs))
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in cs))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("CycNum is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, level: int) -> "CycNum":
        return cls(level)

    @classmethod
    def one(cls, level: int) -> "CycNum":
        return cls(level, [1])

    @classmethod
    def rational(cls, level: int, value) -> "CycNum":
        return cls(level, [value])

    @classmethod
    def zeta(cls, level: int, exponent: int = 1) -> "CycNum":
        return cls(level, power_table(level)[exponent % level])

    # -- basic protocol -----------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, CycNum):
            return self.level == other.level and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.level, self.coeffs)))
        return self._hash

    def __repr__(self) -> str:
        return f"CycNum({self.level}, {self})"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def _coerce(self, other) -> "CycNum":
        if isinstance(other, CycNum):
            if other.level != self.level:
                raise LevelMismatch(f"level {self.level} vs {other.level}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum(self.level, [other])
        return NotImplemented

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycNum(self.level, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.level, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycNum(self.level, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prod = [Fraction(0)] * (2 * self.degree - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycNum(self.level, reduce_exponents(self.level, enumerate(prod)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int) -> "CycNum":
        if e < 0:
            return self.inverse() ** (-e)
        result, base = CycNum.one(self.level), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "CycNum":
        """Multiplicative inverse via the extended Euclidean algorithm over Q."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        mod = [Fraction(c) for c in cyclotomic_poly(self.level)]
        a = _trim(list(self.coeffs))
        # invariant: s0 * self == r0 (mod Phi), s1 * self == r1 (mod Phi)
        r0, r1 = mod, a
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            qs = _poly_mul(q, s1)
            s_next = [
                (s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)
                for i in range(max(len(s0), len(qs)))
            ]
            r0, r1 = r1, r
            s0, s1 = s1, _trim(s_next)
            if not r1:
                raise ArithmeticError("non-invertible element (Phi_N not irreducible?)")
        c = r1[0]
        inv = CycNum(self.level, reduce_exponents(self.level, enumerate(x / c for x in s1)))
        assert inv * self == 1
        return inv

    def galois(self, ell: int) -> "CycNum":
        """Image under the automorphism zeta -> zeta^ell."""
        if gcd(ell, self.level) != 1:
            raise ValueError(f"gcd({ell}, {self.level}) != 1: not an automorphism")
        return CycNum(
            self.level,
            reduce_exponents(self.level, ((i * ell, c) for i, c in enumerate(self.coeffs))),
        )

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def norm(self) -> Fraction:
        return field_norm(self)

    def is_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    def denominator(self) -> int:
        d = 1
        for c in self.coeffs:
            d = d * c.denominator // gcd(d, c.denominator)
        return d

    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.level)
        return sum(float(c) * z**i for i, c in enumerate(self.coeffs))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_json(cls, level: int, data: Sequence[str]) -> "CycNum":
        if len(data) != euler_phi(level):
            raise ValueError(f"expected {euler_phi(level)} coefficients, got {len(data)}")
        return cls(level, [Fraction(s) for s in data])


# ---------------------------------------------------------------------------
# functional surface


def cyc_arith(a: CycNum, b: CycNum, which: str) -> CycNum:
    if a.level != b.level:
        raise LevelMismatch(f"level {a.level} vs {b.level}")
    if which == "add":
        return a + b
    if which == "sub":
        return a - b
    if which == "mul":
        return a * b
    raise ValueError(f"unknown operation {which!r}")


def cyc_inv(a: CycNum) -> CycNum:
    return a.inverse()


def galois_apply(a: CycNum, ell: int) -> CycNum:
    return a.galois(ell)


def is_integral(a: CycNum) -> bool:
    return a.is_integral()


def resultant(f: Sequence, g: Sequence) -> Fraction:
    """Resultant of two polynomials over Q (lists, lowest degree first)."""
    f = _trim([Fraction(c) for c in f])
    g = _trim([Fraction(c) for c in g])
    if not f or not g:
        return Fraction(0)
    res = Fraction(1)
    while True:
        df, dg = len(f) - 1, len(g) - 1
        if dg == 0:
            return res * g[0] ** df
        _, r = _poly_divmod(f, g)
        if not r:
            return Fraction(0)
        # Res(f, g) = (-1)^(df*dg) * lc(g)^(df - dr) * Res(g, r)
        dr = len(r) - 1
        res *= (-1) ** (df * dg) * g[-1] ** (df - dr)
        f, g = g, r


def field_norm(a: CycNum) -> Fraction:
    """Norm from Q(zeta_N) to Q as Res(Phi_N, a).

    Phi_N is monic, so Res(Phi_N, a) = prod a(zeta^j) over the primitive
    N-th roots; in particular the norm of a rational c is c^phi(N).
    """
    return resultant(cyclotomic_poly(a.level), a.coeffs)


def is_unit(a: CycNum) -> bool:
    return a.is_unit()


def unit_ratio(k: int, ell: int, n: int) -> CycNum:
    """The quotient (1 - zeta^ell)/(1 - zeta^k), checked to lie in Z[zeta]."""
    if k % n == 0:
        raise ValueError("k must be nonzero mod N")
    delta = gcd(k, n)
    if ell % delta:
        raise ValueError(f"gcd(k, N) = {delta} does not divide ell = {ell}")
    one = CycNum.one(n)
    q = (one - CycNum.zeta(n, ell)) / (one - CycNum.zeta(n, k))
    if not q.is_integral():
        raise ArithmeticError(f"(1-z^{ell})/(1-z^{k}) not integral at N={n}: {q}")
    return q
