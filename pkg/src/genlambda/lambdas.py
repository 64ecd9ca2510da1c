"""Generalized lambda functions and their integrality.

For a basis {Q1, Q2} of (Z/NZ)^2 the function

    Lambda(tau; Q1, Q2) = (E(Q1) - E(Q1+Q2)) / (E(Q2) - E(Q1+Q2))

is a modular function for Gamma(N). ``Lambda_k`` is the basis (1,0), (0,k),
and every basis is ``Lambda_k o A`` for some k and A in SL2(Z).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .cyclotomic import CycNum, prime_power
from .eisenstein import DegenerateDifference, IndexPair, e_diff_series, theta_leading
from .qseries import QSeries
from .sl2 import SL2Mat, lift_sl2

LEVEL6_MATRIX = SL2Mat(3, 11, 1, 4)


def default_precision(n: int) -> int:
    return max(200, 20 * n)


@dataclass(frozen=True)
class BasisPair:
    level: int
    q1: tuple[int, int]
    q2: tuple[int, int]

    def __post_init__(self):
        n = self.level
        object.__setattr__(self, "q1", (self.q1[0] % n, self.q1[1] % n))
        object.__setattr__(self, "q2", (self.q2[0] % n, self.q2[1] % n))
        if gcd(self.det, n) != 1:
            raise ValueError(f"{self.q1}, {self.q2} is not a basis of (Z/{n}Z)^2")

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.q1, self.q2
        return (a * d - b * c) % self.level

    def indices(self) -> tuple[IndexPair, IndexPair, IndexPair]:
        n = self.level
        p1 = IndexPair(n, *self.q1)
        p2 = IndexPair(n, *self.q2)
        return p1, p2, p1 + p2


def c_constant(n: int) -> int:
    """The scaling constant making C_N Lambda integral over Z[j]."""
    if n < 2:
        raise ValueError(f"level must be >= 2, got {n}")
    if n == 2:
        return 16
    pp = prime_power(n)
    if pp is None:
        return 1
    p = pp[0]
    return p * p if p in (2, 3) else p


def _check_k(n: int, k: int) -> None:
    if gcd(k, n) != 1:
        raise ValueError(f"k = {k} is not prime to N = {n}")


def _ratio(p1: IndexPair, p2: IndexPair, p3: IndexPair, prec: int) -> QSeries:
    """(E(p1) - E(p3)) / (E(p2) - E(p3)) known modulo q^prec."""
    n = p1.level
    work = prec + n  # the denominator has order <= N/2
    num = e_diff_series(p1, p3, work)
    den = e_diff_series(p2, p3, work)
    return (num / den).truncate(prec)


def composed_indices(n: int, k: int, a: SL2Mat) -> tuple[IndexPair, IndexPair, IndexPair]:
    return (
        IndexPair(n, a.a, a.b),
        IndexPair(n, a.c * k, a.d * k),
        IndexPair(n, a.a + a.c * k, a.b + a.d * k),
    )


def lambda_k_series(n: int, k: int, prec: int) -> QSeries:
    _check_k(n, k)
    if prec < 2:
        raise ValueError("precision must be >= 2")
    return _ratio(IndexPair(n, 1, 0), IndexPair(n, 0, k), IndexPair(n, 1, k), prec)


def lambda_composed(n: int, k: int, a: SL2Mat, prec: int) -> QSeries:
    """Lambda_k o A as a Laurent series in q."""
    _check_k(n, k)
    if a.det != 1:
        raise ValueError(f"{a} is not in SL2(Z)")
    return _ratio(*composed_indices(n, k, a), prec)


def lambda_order(n: int, k: int, a: SL2Mat) -> tuple[int, CycNum]:
    """q-order and leading coefficient of Lambda_k o A, from the theta table."""
    p1, p2, p3 = composed_indices(n, k, a)
    t1, th1 = theta_leading(p1, p3)
    t2, th2 = theta_leading(p2, p3)
    return t1 - t2, th1 / th2


def lambda_basis(bp: BasisPair, prec: int) -> QSeries:
    """Lambda(tau; Q1, Q2) computed directly from its defining ratio."""
    return _ratio(*bp.indices(), prec)


def decompose_basis(bp: BasisPair) -> tuple[int, SL2Mat]:
    """k and A with B = diag(1, k) A mod N, where B has rows Q1, Q2."""
    n = bp.level
    k = bp.det % n or n
    kinv = pow(k, -1, n)
    (a, b), (c, d) = bp.q1, bp.q2
    m = lift_sl2(a, b, c * kinv, d * kinv, n)
    if any(x % n for x in (m.a - a, m.b - b, m.c * k - c, m.d * k - d)):
        raise AssertionError(f"decomposition of {bp} failed: k={k}, A={m}")
    return k, m


def twist_matrix(n: int, k: int, a: SL2Mat) -> SL2Mat:
    """A_k = [[a, b k^-1], [c k, d]] lifted to SL2(Z)."""
    kinv = pow(k, -1, n)
    return lift_sl2(a.a, a.b * kinv, a.c * k, a.d, n)


def twist_pair(n: int, k: int, a: SL2Mat, prec: int) -> tuple[QSeries, QSeries]:
    """Both sides of Lambda_k o A = (Lambda_1 o A_k)^sigma_k."""
    _check_k(n, k)
    lhs = lambda_composed(n, k, a, prec)
    rhs = lambda_composed(n, 1, twist_matrix(n, k, a), prec).galois(k)
    if lhs != rhs:
        raise AssertionError(f"Lambda_k o A != (Lambda_1 o A_k)^sigma_k at N={n}, k={k}, A={a}")
    return lhs, rhs


def _first_bad(series: QSeries) -> dict | None:
    for e, c in series.terms().items():
        if not c.is_integral():
            return {"exponent": e, "coefficient": c.to_json()}
    return None


@dataclass
class IntegralityReport:
    level: int
    k: int
    matrix: SL2Mat
    precision: int
    order: int
    unit_scaled_integral: bool | None
    c_scaled_integral: bool
    offending: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.c_scaled_integral and self.unit_scaled_integral is not False

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "k": self.k,
            "matrix": self.matrix.to_list(),
            "precision": self.precision,
            "order": self.order,
            "unit_scaled_integral": self.unit_scaled_integral,
            "c_scaled_integral": self.c_scaled_integral,
            "offending": self.offending,
            "pass": self.passed,
        }


def integrality_certificate(n: int, k: int, a: SL2Mat, prec: int) -> IntegralityReport:
    """Check (1 - zeta^k)^3 Lambda_k o A and C_N Lambda_k o A lie in Z[zeta]((q)).

    At N = 2 only the C_2 = 16 scaling is checked.
    """
    _check_k(n, k)
    lam = lambda_composed(n, k, a, prec)
    offending = {}
    unit_ok = None
    if n > 2:
        unit = (1 - CycNum.zeta(n, k)) ** 3
        scaled = lam * unit
        unit_ok = scaled.is_integral()
        if not unit_ok:
            offending["unit_scaled"] = _first_bad(scaled)
    scaled = lam * c_constant(n)
    c_ok = scaled.is_integral()
    if not c_ok:
        offending["c_scaled"] = _first_bad(scaled)
    return IntegralityReport(n, k, a, prec, lam.order, unit_ok, c_ok, offending)


def lambda_star_indices(n: int, k: int, ell: int, m: int = 1):
    return (
        IndexPair(n, 0, k * m),
        IndexPair(n, 0, ell * m),
        IndexPair(n, 0, (k + ell) * m),
    )


def lambda_star_series(n: int, k: int, ell: int, prec: int) -> QSeries:
    """The Gamma_1(N) function (wp(k/N) - wp((k+l)/N)) / (wp(l/N) - wp((k+l)/N))."""
    if not (0 < k < n / 2 and 0 < ell < n / 2 and k != ell):
        raise ValueError(f"need 0 < k != l < N/2, got k={k}, l={ell}, N={n}")
    if gcd(k + ell, n) != 1:
        raise ValueError(f"gcd(k + l, N) = gcd({k + ell}, {n}) != 1")
    _check_star_degenerate(n, k, ell)
    return _ratio(*lambda_star_indices(n, k, ell), prec)


def _check_star_degenerate(n: int, k: int, ell: int) -> None:
    # k + l = -k or -l mod N makes one difference vanish by evenness
    if (2 * k + ell) % n == 0 or (k + 2 * ell) % n == 0:
        raise DegenerateDifference(
            f"Lambda*_(k={k}, l={ell}) at N={n} is 0/0: k+l is -k or -l mod N"
        )


def lambda_star_constant(n: int, k: int, ell: int) -> CycNum:
    """Constant term of Lambda*_{k,l} from the leading-term table."""
    _check_star_degenerate(n, k, ell)
    w1, w2, w3 = (CycNum.zeta(n, e) for e in (k, ell, k + ell))
    num = (w1 - w3) * (1 - w1 * w3) * (1 - w2) ** 2 * (1 - w3) ** 2
    den = (w2 - w3) * (1 - w2 * w3) * (1 - w1) ** 2 * (1 - w3) ** 2
    return num / den


@dataclass
class Level6Report:
    precision: int
    det_m: int
    m_in_gamma6: bool
    q2_coefficient_zero: bool
    f_vanishes_to: int
    lambda_fixed_to: int

    @property
    def passed(self) -> bool:
        return (
            self.det_m == 1
            and not self.m_in_gamma6
            and self.q2_coefficient_zero
            and self.f_vanishes_to >= self.precision - 1
            and self.lambda_fixed_to >= self.precision - 1
        )

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "matrix": LEVEL6_MATRIX.to_list(),
            "det_M": self.det_m,
            "M_in_Gamma6": self.m_in_gamma6,
            "q2_coefficient_zero": self.q2_coefficient_zero,
            "F_vanishes_to": self.f_vanishes_to,
            "Lambda1_fixed_to": self.lambda_fixed_to,
            "pass": self.passed,
        }


def level6_form(prec: int) -> QSeries:
    """The weight-4 form F at level 6 built from E-differences."""
    n = 6
    e = lambda r, s: IndexPair(n, r, s)  # noqa: E731
    return e_diff_series(e(3, 1), e(2, 3), prec) * e_diff_series(e(0, 1), e(1, 1), prec) - (
        e_diff_series(e(1, 4), e(2, 3), prec) * e_diff_series(e(1, 0), e(1, 1), prec)
    )


def level6_check(prec: int = 200) -> Level6Report:
    """Level 6: the matrix [[3,11],[1,4]] outside Gamma(6) fixes Lambda_1.

    Vanishing of F is verified to finite q-precision only.
    """
    if prec < 3:
        raise ValueError("precision must be >= 3")
    # *_to fields hold the last exponent through which the identity is verified
    f = level6_form(prec)
    vanish = (f.order if not f.is_zero() else f.precision) - 1
    lam = lambda_k_series(6, 1, prec)
    lam_m = lambda_composed(6, 1, LEVEL6_MATRIX, prec)
    d = lam_m - lam
    fixed = (d.order if not d.is_zero() else d.precision) - 1
    return Level6Report(
        precision=prec,
        det_m=LEVEL6_MATRIX.det,
        m_in_gamma6=LEVEL6_MATRIX.in_gamma(6),
        q2_coefficient_zero=f[2].is_zero(),
        f_vanishes_to=vanish,
        lambda_fixed_to=fixed,
    )
