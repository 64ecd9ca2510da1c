"""The polynomial Psi_k(X) = prod_A (X - C_N Lambda_k o A) over Z[zeta][j].

A runs over representatives of SL2(Z) / Gamma(N){+-1}. Every coefficient of
the product is SL2(Z)-invariant, so its q-expansion involves only powers of
q^N and it reduces to a polynomial in j with Z[zeta] coefficients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

from .cyclotomic import CycNum
from .lambdas import c_constant, lambda_composed, lambda_order
from .qseries import PrecisionError, QSeries
from .sl2 import SL2Mat, coset_key, lift_sl2, sl2_mod_elements

SAFETY_MARGIN = 8
MAX_DOUBLINGS = 5


# ---------------------------------------------------------------------------
# cosets


def coset_index(n: int) -> int:
    """|SL2(Z) / Gamma(N){+-1}|."""
    if n == 2:
        return 6
    num, den = n**3, 2
    for p in range(2, n + 1):
        if n % p == 0 and all(p % d for d in range(2, p)):
            num *= p * p - 1
            den *= p * p
    return num // den


@dataclass(frozen=True)
class CosetReps:
    level: int
    reps: tuple[SL2Mat, ...]

    def __len__(self) -> int:
        return len(self.reps)

    def __iter__(self):
        return iter(self.reps)


@lru_cache(maxsize=None)
def coset_reps(n: int) -> CosetReps:
    """Deterministic representatives, one lift per class of SL2(Z/N) / {+-1}."""
    if n < 2:
        raise ValueError(f"level must be >= 2, got {n}")
    seen = set()
    reps = []
    for el in sl2_mod_elements(n):
        m = lift_sl2(*el, n)
        key = coset_key(m, n)
        if key not in seen:
            seen.add(key)
            reps.append(m)
    assert len(reps) == coset_index(n), (len(reps), coset_index(n))
    return CosetReps(n, tuple(reps))


# ---------------------------------------------------------------------------
# j


def _sigma3(n: int) -> int:
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def _int_mul(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def j_coefficients(count: int) -> tuple[int, ...]:
    """c(-1), c(0), ..., c(count - 2) of j = q^-1 + 744 + 196884 q + ...

    Computed as E4^3 / Delta with Delta = q prod (1 - q^n)^24.
    """
    e4 = [1] + [240 * _sigma3(k) for k in range(1, count)]
    e4cube = _int_mul(_int_mul(e4, e4, count), e4, count)
    eta24 = delta_coefficients(count)
    # inverse of a series with constant term 1 has integer coefficients
    inv = [1] + [0] * (count - 1)
    for i in range(1, count):
        inv[i] = -sum(eta24[t] * inv[i - t] for t in range(1, i + 1))
    return tuple(_int_mul(e4cube, inv, count))


def j_series(prec: int, level: int = 2) -> QSeries:
    """j as a series in q~ = exp(2 pi i tau) with integer coefficients, mod q~^prec.

    The result is homed at cyclotomic ``level`` (rational coefficients only);
    use ``.inflate(level)`` to rewrite it in q = q~^(1/N).
    """
    if prec < 0:
        raise ValueError("precision must be >= 0")
    cs = j_coefficients(prec + 1)
    return QSeries(level, -1, list(cs), prec)


@lru_cache(maxsize=None)
def delta_coefficients(count: int) -> tuple[int, ...]:
    """Coefficients of Delta starting at q^1, i.e. of prod (1 - q^n)^24."""
    eta24 = [1] + [0] * (count - 1)
    for k in range(1, count):
        for _ in range(24):
            for i in range(count - 1, k - 1, -1):
                eta24[i] -= eta24[i - k]
    return tuple(eta24)


# ---------------------------------------------------------------------------
# reduction to polynomials in j


@dataclass
class JExpansion:
    coeffs: list[CycNum]  # coefficient of j^d at index d
    remainder_ok: bool
    verified_to: int  # remainder known to vanish below q^verified_to (q = level variable)


def deflate(f: QSeries, m: int) -> QSeries:
    """Rewrite a series in q^m as a series in q; fails if other exponents occur."""
    bad = [e for e in f.exponents() if e % m]
    if bad:
        raise ValueError(f"exponent q^{bad[0]} is not a multiple of {m}")
    if f.is_zero():
        return QSeries.zero(f.level, -(-f.precision // m))
    rows = f.int_rows[::m]
    prec = -(-f.precision // m)
    return QSeries.from_int_rows(f.level, f.order // m, rows, prec, f.denominator)


def express_in_j(f: QSeries, jpowers: dict[int, QSeries] | None = None) -> JExpansion:
    """Greedy rewrite of a level-one invariant series as a polynomial in j."""
    n = f.level
    g = deflate(f, n)
    top = max(-g.order, 0)
    if jpowers is None:
        jpowers = j_powers(n, top, g.precision)
    coeffs: list[CycNum] = [CycNum.zero(n)] * (top + 1)
    rem = g
    while not rem.is_zero() and rem.order < 0:
        m = -rem.order
        c = rem.leading_coefficient()
        coeffs[m] = c
        rem = rem - jpowers[m].scale(c)
    if rem.precision <= 0:
        raise PrecisionError("constant term of the j-reduction is not known")
    if not rem.is_zero() and rem.order == 0:
        coeffs[0] = rem.leading_coefficient()
        rem = rem - coeffs[0]
    while len(coeffs) > 1 and coeffs[-1].is_zero():
        coeffs.pop()
    return JExpansion(coeffs, rem.is_zero(), rem.precision * n if rem.is_zero() else rem.order * n)


def j_powers(level: int, top: int, prec: int) -> dict[int, QSeries]:
    """j^0 .. j^top in q~, each known mod q~^prec."""
    j = j_series(prec + top + 1, level)
    out = {0: QSeries.constant(level, 1, max(prec, 1))}
    cur = None
    for m in range(1, top + 1):
        cur = j if cur is None else cur * j
        out[m] = cur.truncate(prec) if cur.precision > prec else cur
    return out


# ---------------------------------------------------------------------------
# Psi_k


@dataclass
class PsiPoly:
    level: int
    k: int
    degree: int
    coeffs: dict[tuple[int, int], CycNum]  # (x_power, j_power) -> value, nonzero only
    checks: dict = field(default_factory=dict)

    def j_poly(self, i: int) -> list[CycNum]:
        """Coefficient of X^i as a list indexed by the power of j."""
        ds = [d for (x, d) in self.coeffs if x == i]
        out = [CycNum.zero(self.level)] * (max(ds) + 1 if ds else 1)
        for d in ds:
            out[d] = self.coeffs[(i, d)]
        return out

    @property
    def j_degree(self) -> int:
        return max((d for (_, d) in self.coeffs), default=0)

    def is_monic(self) -> bool:
        return self.j_poly(self.degree) == [CycNum.one(self.level)]

    def all_integral(self) -> bool:
        return all(c.is_integral() for c in self.coeffs.values())

    def galois(self, ell: int) -> "PsiPoly":
        cs = {key: c.galois(ell) for key, c in self.coeffs.items()}
        return PsiPoly(self.level, (self.k * ell) % self.level, self.degree, cs, dict(self.checks))

    def same_table(self, other: "PsiPoly") -> bool:
        return (self.level, self.degree, self.coeffs) == (other.level, other.degree, other.coeffs)

    def to_json(self) -> dict:
        entries = [
            {"x_power": x, "j_power": d, "value": c.to_json()}
            for (x, d), c in sorted(self.coeffs.items())
        ]
        return {
            "level": self.level,
            "k": self.k,
            "degree": self.degree,
            "coeffs": entries,
            "checks": self.checks,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "PsiPoly":
        n = data["level"]
        cs = {
            (e["x_power"], e["j_power"]): CycNum.from_json(n, e["value"])
            for e in data["coeffs"]
        }
        return cls(n, data["k"], data["degree"], cs, data.get("checks", {}))


def _poly_mul(p: list, q: list) -> list:
    """Product of polynomials in X whose coefficients are QSeries or ints."""
    out: list = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            if isinstance(a, int) and isinstance(b, int):
                term = a * b
            elif isinstance(a, int):
                term = b.scale(a) if a != 1 else b
            elif isinstance(b, int):
                term = a.scale(b) if b != 1 else a
            else:
                term = a * b
            cur = out[i + j]
            if isinstance(cur, int) and cur == 0:
                out[i + j] = term
            else:
                out[i + j] = cur + term
    return out


def _product_tree(factors: list[list]) -> list:
    while len(factors) > 1:
        nxt = [_poly_mul(factors[i], factors[i + 1]) for i in range(0, len(factors) - 1, 2)]
        if len(factors) % 2:
            nxt.append(factors[-1])
        factors = nxt
    return factors[0]


def psi_product(n: int, k: int, relative: int, reps: Sequence[SL2Mat] | None = None) -> list:
    """Coefficients (in X, lowest first) of prod (X - C_N Lambda_k o A) as QSeries.

    Each factor is known to ``relative`` coefficients past its leading term.
    """
    reps = list(coset_reps(n).reps if reps is None else reps)
    cn = c_constant(n)
    factors = []
    for a in reps:
        order, _ = lambda_order(n, k, a)
        x = lambda_composed(n, k, a, order + relative).scale(cn)
        factors.append([-x, 1])
    return _product_tree(factors)


def pole_budget(n: int, k: int, reps: Sequence[SL2Mat]) -> int:
    """Total pole order of the factors: bounds the pole order of every coefficient."""
    return -sum(min(lambda_order(n, k, a)[0], 0) for a in reps)


def psi_poly(
    n: int,
    k: int,
    relative: int | None = None,
    reps: Sequence[SL2Mat] | None = None,
) -> PsiPoly:
    """Build Psi_k, retrying with doubled precision until every j-reduction is verified."""
    if gcd(k, n) != 1:
        raise ValueError(f"k = {k} is not prime to N = {n}")
    k %= n
    reps = list(coset_reps(n).reps if reps is None else reps)
    poles = pole_budget(n, k, reps)
    if relative is None:
        relative = poles + n * (SAFETY_MARGIN + 1)
    need = SAFETY_MARGIN * n
    for _ in range(MAX_DOUBLINGS):
        result = _psi_attempt(n, k, relative, reps, poles, need)
        if result is not None:
            return result
        relative *= 2
    raise PrecisionError(f"Psi_{k} at N={n}: j-reduction not verified after {MAX_DOUBLINGS} doublings")


def _psi_attempt(n, k, relative, reps, poles, need) -> PsiPoly | None:
    poly = psi_product(n, k, relative, reps)
    degree = len(poly) - 1
    top = -(-poles // n)
    min_prec = min(c.precision for c in poly if isinstance(c, QSeries))
    jp = j_powers(n, top, -(-min_prec // n))
    coeffs: dict[tuple[int, int], CycNum] = {}
    checks = {
        "degree": degree,
        "expected_degree": len(reps),
        "relative_precision": relative,
        "pole_budget": poles,
        "exponents_multiple_of_level": True,
        "remainder_zero": True,
        "min_verified_margin": None,
        "integral": True,
        "monic": poly[-1] == 1,
    }
    margins = []
    for i, c in enumerate(poly):
        if isinstance(c, int):
            if c:
                coeffs[(i, 0)] = CycNum.rational(n, c)
            continue
        if any(e % n for e in c.exponents()):
            checks["exponents_multiple_of_level"] = False
            raise ArithmeticError(f"coefficient of X^{i} has exponents not divisible by {n}")
        try:
            exp = express_in_j(c, jp)
        except PrecisionError:
            return None
        if not exp.remainder_ok or exp.verified_to < need:
            return None
        margins.append(exp.verified_to)
        for d, v in enumerate(exp.coeffs):
            if not v.is_zero():
                coeffs[(i, d)] = v
                if not v.is_integral():
                    checks["integral"] = False
                    checks.setdefault("offending", []).append(
                        {"x_power": i, "j_power": d, "value": v.to_json()}
                    )
    checks["min_verified_margin"] = min(margins) if margins else None
    return PsiPoly(n, k, degree, coeffs, checks)


def psi_specialize(psi: PsiPoly, j_val, one=None) -> list:
    """Substitute j = j_val; returns coefficients in X (lowest first).

    ``j_val`` may be a CycNum (exact) or any numeric type supporting + and *
    with values produced by ``one`` from CycNum (default: exact CycNum).
    """
    conv = (lambda c: c) if one is None else one
    out = []
    for i in range(psi.degree + 1):
        acc = None
        for c in reversed(psi.j_poly(i)):
            v = conv(c)
            acc = v if acc is None else acc * j_val + v
        out.append(acc)
    return out


def classical_sextic() -> dict[tuple[int, int], int]:
    """(X^2 - 16X + 256)^3 - j X^2 (X - 16)^2, the N = 2 polynomial for X = 16 lambda."""
    base = [256, -16, 1]
    cube = [1]
    for _ in range(3):
        cube = [sum(cube[t] * base[i - t] for t in range(len(cube)) if 0 <= i - t < 3)
                for i in range(len(cube) + 2)]
    sq = [256, -32, 1]  # (X - 16)^2
    jpart = [0, 0] + sq  # X^2 (X - 16)^2
    table = {(i, 0): c for i, c in enumerate(cube) if c}
    for i, c in enumerate(jpart):
        if c:
            table[(i, 1)] = -c
    return table


def rational_table(psi: PsiPoly) -> dict[tuple[int, int], Fraction]:
    out = {}
    for key, c in psi.coeffs.items():
        if any(c.coeffs[1:]):
            raise ValueError(f"coefficient {key} is not rational")
        out[key] = c.coeffs[0]
    return out
