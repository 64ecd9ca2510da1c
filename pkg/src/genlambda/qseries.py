"""Truncated Laurent series in q over Q(zeta_N) with explicit precision.

A series is stored densely as integer power-basis rows over a single common
denominator::

    f = q^order * (rows[0] + rows[1] q + ... ) / den   (mod q^precision)

Products are computed by Kronecker substitution: the bivariate integer
polynomial in (q, zeta) is packed into one big integer, multiplied with GMP,
unpacked and reduced modulo Phi_N. The results are exact, so they agree
bit-for-bit with schoolbook multiplication.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

import gmpy2

from .cyclotomic import CycNum, LevelMismatch, euler_phi, power_table

Rows = list  # list of tuples of ints, each of length phi(N)


class PrecisionError(ArithmeticError):
    """A requested coefficient or operation needs more precision than is known."""


# ---------------------------------------------------------------------------
# Kronecker-packed products


def _pack(rows: Sequence[Sequence[int]], width: int, nbytes: int) -> int:
    zero = bytes(nbytes)
    pad = zero * (width - len(rows[0])) if rows else b""
    pos, neg = [], []
    has_neg = False
    for row in rows:
        for c in row:
            if c > 0:
                pos.append(c.to_bytes(nbytes, "little"))
                neg.append(zero)
            elif c < 0:
                pos.append(zero)
                neg.append((-c).to_bytes(nbytes, "little"))
                has_neg = True
            else:
                pos.append(zero)
                neg.append(zero)
        pos.append(pad)
        neg.append(pad)
    value = int.from_bytes(b"".join(pos), "little")
    if has_neg:
        value -= int.from_bytes(b"".join(neg), "little")
    return value


def _unpack(value: int, nslots: int, nbytes: int) -> list[int]:
    total = nslots * nbytes
    raw = (value & ((1 << (8 * total)) - 1)).to_bytes(total, "little")
    half = 1 << (8 * nbytes - 1)
    full = 1 << (8 * nbytes)
    out = [0] * nslots
    carry = 0
    frm = int.from_bytes
    for k in range(nslots):
        c = frm(raw[k * nbytes : (k + 1) * nbytes], "little") + carry
        if c >= half:
            c -= full
            carry = 1
        else:
            carry = 0
        out[k] = c
    return out


def _max_abs(rows) -> int:
    m = 0
    for row in rows:
        for c in row:
            if c > m:
                m = c
            elif -c > m:
                m = -c
    return m


def mul_rows(level: int, a: Rows, b: Rows, n: int) -> Rows:
    """First ``n`` coefficient rows of the product a*b, reduced mod Phi_N."""
    a, b = a[:n], b[:n]
    if not a or not b or n <= 0:
        return []
    phi = len(a[0])
    n = min(n, len(a) + len(b) - 1)
    ma, mb = _max_abs(a), _max_abs(b)
    if ma == 0 or mb == 0:
        return [(0,) * phi for _ in range(n)]
    width = 2 * phi - 1
    bound = ma * mb * phi * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2 + 7) // 8
    pa = _pack(a, width, nbytes)
    pb = pa if a is b else _pack(b, width, nbytes)
    prod = int(gmpy2.mpz(pa) * gmpy2.mpz(pb))
    slots = _unpack(prod, n * width, nbytes)
    table = power_table(level)
    out = []
    for i in range(n):
        raw = slots[i * width : (i + 1) * width]
        row = raw[:phi]
        for j in range(phi, width):
            c = raw[j]
            if c:
                for t, v in enumerate(table[j % level]):
                    if v:
                        row[t] += c * v
        out.append(tuple(row))
    return out


@lru_cache(maxsize=None)
def _galois_matrix(level: int, ell: int) -> tuple[tuple[int, ...], ...]:
    table = power_table(level)
    return tuple(table[(i * ell) % level] for i in range(euler_phi(level)))


# ---------------------------------------------------------------------------


class QSeries:
    """A truncated Laurent series sum_{m >= order} a_m q^m, known mod q^precision.

    The zero series keeps its precision, so ``f - f`` still records how many
    coefficients are known to vanish. For the zero series ``order`` equals
    ``precision``.
    """

    __slots__ = ("level", "order", "precision", "_rows", "_den")

    def __init__(
        self,
        level: int,
        order: int,
        coeffs: Iterable[CycNum | int | Fraction],
        precision: int | None = None,
    ):
        cs = [c if isinstance(c, CycNum) else CycNum(level, [c]) for c in coeffs]
        for c in cs:
            if c.level != level:
                raise LevelMismatch(f"coefficient level {c.level} in series of level {level}")
        if precision is None:
            precision = order + len(cs)
        if precision < order + len(cs):
            cs = cs[: max(precision - order, 0)]
        cs += [CycNum.zero(level)] * (precision - order - len(cs))
        den = 1
        for c in cs:
            d = c.denominator()
            den = den * d // gcd(den, d)
        rows = [tuple(int(x * den) for x in c.coeffs) for c in cs]
        self._set(level, order, rows, den, precision)

    # -- internal construction ---------------------------------------------

    def _set(self, level, order, rows, den, precision):
        lead = 0
        while lead < len(rows) and not any(rows[lead]):
            lead += 1
        rows = rows[lead:]
        order += lead
        if not rows:
            order, den = precision, 1
        else:
            g = den
            for row in rows:
                for c in row:
                    if c:
                        g = gcd(g, c)
                        if g == 1:
                            break
                if g == 1:
                    break
            if g > 1:
                den //= g
                rows = [tuple(c // g for c in row) for row in rows]
        self.level, self.order, self.precision = level, order, precision
        self._rows, self._den = rows, den

    @classmethod
    def _raw(cls, level: int, order: int, rows: Rows, den: int, precision: int) -> "QSeries":
        obj = cls.__new__(cls)
        if den < 0:
            rows, den = [tuple(-c for c in r) for r in rows], -den
        obj._set(level, order, list(rows), den, precision)
        return obj

    @classmethod
    def zero(cls, level: int, precision: int) -> "QSeries":
        return cls._raw(level, precision, [], 1, precision)

    @classmethod
    def constant(cls, level: int, value, precision: int) -> "QSeries":
        return cls(level, 0, [value], precision)

    @classmethod
    def monomial(cls, level: int, exponent: int, value, precision: int) -> "QSeries":
        if precision <= exponent:
            return cls.zero(level, precision)
        return cls(level, exponent, [value], precision)

    @classmethod
    def from_terms(
        cls, level: int, terms: Mapping[int, CycNum | int | Fraction], precision: int
    ) -> "QSeries":
        keys = [e for e in terms if e < precision]
        if not keys:
            return cls.zero(level, precision)
        lo = min(keys)
        cs = [terms.get(e, 0) for e in range(lo, precision)]
        return cls(level, lo, cs, precision)

    @classmethod
    def from_int_rows(
        cls, level: int, order: int, rows: Rows, precision: int, den: int = 1
    ) -> "QSeries":
        """Build from power-basis integer rows (plumbing for fast constructors)."""
        rows = [tuple(r) for r in rows[: max(precision - order, 0)]]
        phi = euler_phi(level)
        rows += [(0,) * phi] * (precision - order - len(rows))
        return cls._raw(level, order, rows, den, precision)

    # -- inspection ---------------------------------------------------------

    @property
    def coeffs(self) -> list[CycNum]:
        return [self._cyc(row) for row in self._rows]

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def int_rows(self) -> Rows:
        return list(self._rows)

    def _cyc(self, row) -> CycNum:
        return CycNum(self.level, [Fraction(c, self._den) for c in row])

    def __len__(self) -> int:
        return len(self._rows)

    def is_zero(self) -> bool:
        return not self._rows

    def __getitem__(self, exponent: int) -> CycNum:
        if exponent >= self.precision:
            raise PrecisionError(f"coefficient q^{exponent} unknown (precision {self.precision})")
        if exponent < self.order:
            return CycNum.zero(self.level)
        return self._cyc(self._rows[exponent - self.order])

    def leading_coefficient(self) -> CycNum:
        if not self._rows:
            raise PrecisionError("zero series has no known leading coefficient")
        return self._cyc(self._rows[0])

    def terms(self) -> dict[int, CycNum]:
        return {self.order + i: self._cyc(r) for i, r in enumerate(self._rows) if any(r)}

    def exponents(self) -> list[int]:
        return [self.order + i for i, r in enumerate(self._rows) if any(r)]

    def is_integral(self) -> bool:
        """True iff every known coefficient lies in Z[zeta]."""
        return self._den == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.level == other.level
            and self.order == other.order
            and self.precision == other.precision
            and self._den == other._den
            and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self.level, self.order, self.precision, self._den, tuple(self._rows)))

    def agrees_with(self, other: "QSeries", through: int | None = None) -> bool:
        """Coefficient agreement on every exponent known to both (or below ``through``+1)."""
        diff = self - other
        if through is not None and diff.precision <= through:
            raise PrecisionError(f"agreement through q^{through} needs precision {through + 1}")
        if through is None:
            return diff.is_zero()
        return diff.order > through

    def __repr__(self) -> str:
        shown = []
        for e, c in list(self.terms().items())[:6]:
            shown.append(f"({c})*q^{e}")
        body = " + ".join(shown) if shown else "0"
        return f"QSeries[N={self.level}]({body} + O(q^{self.precision}))"

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "QSeries"):
        if other.level != self.level:
            raise LevelMismatch(f"level {self.level} vs {other.level}")

    def _as_series(self, other) -> "QSeries | None":
        if isinstance(other, QSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, CycNum)):
            if isinstance(other, CycNum) and other.level != self.level:
                raise LevelMismatch(f"level {self.level} vs {other.level}")
            # exact constant: give it enough precision not to limit the result
            prec = max(self.precision, 1)
            return QSeries(self.level, 0, [other], prec)
        return None

    def _combine(self, other: "QSeries", sign: int) -> "QSeries":
        prec = min(self.precision, other.precision)
        lo = min(self.order, other.order)
        if lo >= prec:
            return QSeries.zero(self.level, prec)
        den = lcm(self._den, other._den)
        phi = euler_phi(self.level)
        acc = [[0] * phi for _ in range(prec - lo)]
        for s, f in ((1, self), (sign, other)):
            k = s * (den // f._den)
            off = f.order - lo
            for i, row in enumerate(f._rows[: max(prec - f.order, 0)]):
                tgt = acc[off + i]
                for t, c in enumerate(row):
                    if c:
                        tgt[t] += k * c
        return QSeries._raw(self.level, lo, [tuple(r) for r in acc], den, prec)

    def __add__(self, other):
        other = self._as_series(other)
        if other is None:
            return NotImplemented
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._as_series(other)
        if other is None:
            return NotImplemented
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QSeries._raw(
            self.level, self.order, [tuple(-c for c in r) for r in self._rows],
            self._den, self.precision,
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        self._check(other)
        if self.is_zero() or other.is_zero():
            prec = min(self.precision + other.order, other.precision + self.order)
            return QSeries.zero(self.level, prec)
        order = self.order + other.order
        rel = min(len(self._rows), len(other._rows))
        rows = mul_rows(self.level, self._rows, other._rows, rel)
        return QSeries._raw(self.level, order, rows, self._den * other._den, order + rel)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "QSeries":
        """Multiply by an exact scalar (int, Fraction or CycNum)."""
        if not isinstance(c, CycNum):
            c = CycNum(self.level, [c])
        if c.level != self.level:
            raise LevelMismatch(f"level {self.level} vs {c.level}")
        if c.is_zero():
            return QSeries.zero(self.level, self.precision)
        if self.is_zero():
            return self
        d = c.denominator()
        crow = [tuple(int(x * d) for x in c.coeffs)]
        rows = mul_rows(self.level, self._rows, crow, len(self._rows))
        return QSeries._raw(self.level, self.order, rows, self._den * d, self.precision)

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k."""
        return QSeries._raw(
            self.level, self.order + k, self._rows, self._den, self.precision + k
        )

    def truncate(self, precision: int) -> "QSeries":
        if precision > self.precision:
            raise PrecisionError(f"cannot raise precision {self.precision} to {precision}")
        keep = max(precision - self.order, 0)
        return QSeries._raw(
            self.level, min(self.order, precision), self._rows[:keep], self._den, precision
        )

    def inverse(self) -> "QSeries":
        """Laurent inverse, by Newton iteration on the unit part."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of a series with no known nonzero coefficient")
        n = len(self._rows)
        lead_inv = self.leading_coefficient().inverse()
        unit = QSeries._raw(self.level, 0, self._rows, self._den, n).scale(lead_inv)
        u_rows, u_den = unit._rows, unit._den
        phi = euler_phi(self.level)
        one = (1,) + (0,) * (phi - 1)
        h_rows, h_den, m = [one], 1, 1
        while m < n:
            m = min(2 * m, n)
            t_rows = mul_rows(self.level, u_rows, h_rows, m)
            t_den = u_den * h_den
            # e = 2 - u*h, over denominator t_den
            e_rows = [tuple(-c for c in r) for r in t_rows]
            e_rows[0] = tuple(c + (2 * t_den if t == 0 else 0) for t, c in enumerate(e_rows[0]))
            h_rows = mul_rows(self.level, h_rows, e_rows, m)
            h_den = h_den * t_den
            h = QSeries._raw(self.level, 0, h_rows, h_den, m)
            h_rows, h_den = h._rows, h._den
            h_rows = h_rows + [(0,) * phi] * (m - len(h_rows))
        inv = QSeries._raw(self.level, 0, h_rows, h_den, n)
        return inv.scale(lead_inv).shift(-self.order)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            if not isinstance(other, CycNum):
                other = CycNum(self.level, [other])
            return self.scale(other.inverse())
        if not isinstance(other, QSeries):
            return NotImplemented
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by a series with no known nonzero coefficient")
        if self.is_zero():
            prec = min(self.precision - other.order, self.order + other.precision - 2 * other.order)
            return QSeries.zero(self.level, prec)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int) -> "QSeries":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return QSeries.constant(self.level, 1, max(self.precision - self.order, 1))
        result, base = None, self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def galois(self, ell: int) -> "QSeries":
        """Apply zeta -> zeta^ell to every coefficient."""
        if gcd(ell, self.level) != 1:
            raise ValueError(f"gcd({ell}, {self.level}) != 1: not an automorphism")
        mat = _galois_matrix(self.level, ell % self.level)
        phi = len(mat)
        rows = []
        for row in self._rows:
            out = [0] * phi
            for i, c in enumerate(row):
                if c:
                    for t, v in enumerate(mat[i]):
                        if v:
                            out[t] += c * v
            rows.append(tuple(out))
        return QSeries._raw(self.level, self.order, rows, self._den, self.precision)

    def inflate(self, m: int, level: int | None = None) -> "QSeries":
        """Substitute q -> q^m, optionally re-homing rational coefficients at another level."""
        level = self.level if level is None else level
        if level != self.level and any(any(r[1:]) for r in self._rows):
            raise LevelMismatch("only rational series can change level")
        prec = self.precision * m
        if not self._rows:
            return QSeries.zero(level, prec)
        phi = euler_phi(level)
        zero = (0,) * phi
        rows = []
        for r in self._rows:
            rows.append(r if level == self.level else (r[0],) + zero[1:])
            rows.extend([zero] * (m - 1))
        return QSeries.from_int_rows(level, self.order * m, rows, prec, self._den)

    def _phi(self) -> int:
        return euler_phi(self.level)

    # -- numerics -----------------------------------------------------------

    def evaluate(self, q, zeta=None):
        """Sum of the known terms at a numeric q (mpmath complex); no tail estimate."""
        import mpmath

        if zeta is None:
            zeta = mpmath.expjpi(mpmath.mpf(2) / self.level)
        zp = [zeta**i for i in range(self._phi())]
        total = mpmath.mpc(0)
        qp = q**self.order
        for row in self._rows:
            if any(row):
                total += qp * mpmath.fsum(c * z for c, z in zip(row, zp) if c)
            qp *= q
        return total / self._den

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "order": self.order,
            "precision": self.precision,
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "QSeries":
        level = data["level"]
        cs = [CycNum.from_json(level, c) for c in data["coeffs"]]
        if not cs:
            return cls.zero(level, data["precision"])
        return cls(level, data["order"], cs, data["precision"])


# ---------------------------------------------------------------------------
# functional surface


def series_arith(f: QSeries, g: QSeries, which: str) -> QSeries:
    if which == "add":
        return f + g
    if which == "sub":
        return f - g
    if which == "mul":
        return f * g
    raise ValueError(f"unknown operation {which!r}")


def series_div(f: QSeries, g: QSeries) -> QSeries:
    return f / g


def series_galois(f: QSeries, ell: int) -> QSeries:
    return f.galois(ell)


def series_is_integral(f: QSeries) -> bool:
    return f.is_integral()
