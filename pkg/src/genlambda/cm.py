"""High-precision values of E, Lambda and j, and CM-point certificates.

Numbers are midpoint-radius balls over mpmath. The radius absorbs series
truncation (explicit geometric tail bounds) and rounding, so a certificate
``|Psi(x, j)| + err < 10^(-digits/2)`` means the residual is small for every
value consistent with the computation.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .cyclotomic import CycNum
from .eisenstein import IndexPair, brace_mu
from .lambdas import BasisPair, c_constant
from .modpoly import PsiPoly, j_coefficients, psi_poly, psi_specialize
from .sl2 import SL2Mat

DEFAULT_DIGITS = 50
REDUCE_BELOW = mpmath.mpf("0.8")
GUARD_BITS = 40


class PrecisionFailure(ArithmeticError):
    """The requested accuracy cannot be certified at the working precision."""


# ---------------------------------------------------------------------------
# balls


def _ulp_rel() -> mpmath.mpf:
    return mpmath.ldexp(1, -mpmath.mp.prec + 2)


class HPComplex:
    """Complex midpoint with an error radius; all operations widen the radius."""

    __slots__ = ("mid", "rad")

    def __init__(self, mid, rad=0):
        self.mid = mpmath.mpc(mid)
        self.rad = mpmath.mpf(rad)

    @classmethod
    def exact(cls, value) -> "HPComplex":
        if isinstance(value, Fraction):
            mid = mpmath.mpf(value.numerator) / value.denominator
            return cls(mid, abs(mid) * _ulp_rel())
        if isinstance(value, int):
            mid = mpmath.mpf(value)
            return cls(mid, 0 if mid == value else abs(mid) * _ulp_rel())
        return cls(value, abs(mpmath.mpc(value)) * _ulp_rel())

    @classmethod
    def lift(cls, value) -> "HPComplex":
        return value if isinstance(value, HPComplex) else cls.exact(value)

    def _round(self, mid, rad) -> "HPComplex":
        return HPComplex(mid, rad + abs(mid) * _ulp_rel())

    def __add__(self, o):
        o = HPComplex.lift(o)
        return self._round(self.mid + o.mid, self.rad + o.rad)

    __radd__ = __add__

    def __neg__(self):
        return HPComplex(-self.mid, self.rad)

    def __sub__(self, o):
        o = HPComplex.lift(o)
        return self._round(self.mid - o.mid, self.rad + o.rad)

    def __rsub__(self, o):
        return HPComplex.lift(o) - self

    def __mul__(self, o):
        o = HPComplex.lift(o)
        rad = abs(self.mid) * o.rad + abs(o.mid) * self.rad + self.rad * o.rad
        return self._round(self.mid * o.mid, rad)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = HPComplex.lift(o)
        den = abs(o.mid) - o.rad
        if den <= 0:
            raise PrecisionFailure("division by a ball containing zero")
        mid = self.mid / o.mid
        rad = (self.rad + abs(mid) * o.rad) / den
        return self._round(mid, rad)

    def __rtruediv__(self, o):
        return HPComplex.lift(o) / self

    def __pow__(self, e: int):
        if e < 0:
            return 1 / (self**-e)
        out, base = HPComplex(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def upper(self) -> mpmath.mpf:
        return abs(self.mid) + self.rad

    def contains_zero_within(self, tol) -> bool:
        return self.upper() < tol

    def __repr__(self) -> str:
        return f"HPComplex({mpmath.nstr(self.mid, 20)} +- {mpmath.nstr(self.rad, 3)})"

    def to_json(self, digits: int = 40) -> dict:
        return {
            "re": mpmath.nstr(self.mid.real, digits),
            "im": mpmath.nstr(self.mid.imag, digits),
            "err": mpmath.nstr(self.rad, 5),
        }


def _bits(digits: int) -> int:
    return int(digits * 3.33) + GUARD_BITS


def cyc_to_ball(c: CycNum) -> HPComplex:
    n = c.level
    out = HPComplex(0)
    for i, x in enumerate(c.coeffs):
        if x:
            z = mpmath.expjpi(mpmath.mpf(2 * i) / n)
            out = out + HPComplex.exact(x) * HPComplex(z, abs(z) * _ulp_rel())
    return out


# ---------------------------------------------------------------------------
# points


@dataclass
class CMPoint:
    """A point of the upper half plane, re-evaluated at the working precision."""

    theta: mpmath.mpc
    discriminant: int | None = None
    source: str | None = None

    def __post_init__(self):
        self.theta = mpmath.mpc(self.theta)
        if self.theta.imag <= 0:
            raise ValueError("theta must lie in the upper half plane")

    @classmethod
    def from_discriminant(cls, disc: int) -> "CMPoint":
        """Standard generator of the maximal order of discriminant ``disc`` < 0."""
        if disc >= 0 or disc % 4 not in (0, 1):
            raise ValueError(f"{disc} is not a negative discriminant")
        return cls(_disc_theta(disc), disc)

    @classmethod
    def parse(cls, text: str) -> "CMPoint":
        """Parse expressions such as ``i``, ``0.5+1.2i`` or ``(1+sqrt(3)*i)/2``."""
        return cls(_parse_expr(text), source=text)

    def value(self) -> mpmath.mpc:
        if self.discriminant is not None:
            return _disc_theta(self.discriminant)
        if self.source is not None:
            return _parse_expr(self.source)
        return self.theta

    def to_json(self) -> dict:
        return {
            "re": mpmath.nstr(self.theta.real, 30),
            "im": mpmath.nstr(self.theta.imag, 30),
            "discriminant": self.discriminant,
            "source": self.source,
        }


def _disc_theta(disc: int) -> mpmath.mpc:
    if disc % 4 == 0:
        return mpmath.mpc(0, mpmath.sqrt(-disc) / 2)
    return mpmath.mpc(1, mpmath.sqrt(-disc)) / 2


_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


def _parse_expr(text: str) -> mpmath.mpc:
    src = re.sub(r"(\d|\))\s*[iI]\b", r"\1*i", text.strip())
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return mpmath.mpf(str(node.value)) if isinstance(node.value, float) else node.value
        if isinstance(node, ast.Name) and node.id in ("i", "I", "j"):
            return mpmath.mpc(0, 1)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt"
            and len(node.args) == 1
        ):
            return mpmath.sqrt(ev(node.args[0]))
        raise ValueError(f"unsupported token in {text!r}")

    return mpmath.mpc(ev(tree))


def fundamental_reduce(tau) -> tuple[mpmath.mpc, SL2Mat]:
    """(tau', A) with tau' = A tau, |Re tau'| <= 1/2 and |tau'| >= 1."""
    tau = mpmath.mpc(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    m = SL2Mat.identity()
    for _ in range(10_000):
        n = int(mpmath.nint(tau.real))
        if n:
            tau -= n
            m = SL2Mat(1, -n, 0, 1) @ m
        if abs(tau) < 1 - mpmath.mpf(10) ** (-mpmath.mp.dps + 5):
            tau = -1 / tau
            m = SL2Mat(0, -1, 1, 0) @ m
        else:
            break
    return tau, m


def mobius(m: SL2Mat, tau) -> HPComplex:
    t = HPComplex.lift(tau)
    return (t * m.a + m.b) / (t * m.c + m.d)


# ---------------------------------------------------------------------------
# E values


def _tail(qabs, start: int) -> mpmath.mpf:
    """Bound for 5 * sum_{k >= start} k^2 qabs^k."""
    rho = ((start + 1) / mpmath.mpf(start)) ** 2 * qabs
    if rho >= 1:
        return mpmath.inf
    return 5 * start**2 * qabs**start / (1 - rho)


def _wp_direct(n: int, r: int, s: int, tau, digits: int) -> HPComplex:
    """E(tau; r, s) + 1/12 summed directly from its q-expansion at tau."""
    tau = mpmath.mpc(tau)
    q = mpmath.expjpi(2 * tau / n)
    qabs = abs(q)
    target = mpmath.mpf(10) ** (-digits - 5)
    cutoff = max(n + 1, 2)
    while _tail(qabs, cutoff) > target:
        cutoff += max(n, 8)
        if cutoff > 200_000:
            raise PrecisionFailure(f"Im tau = {tau.imag} too small for {digits} digits")
    brace, mu = brace_mu(r, n)
    w = (mu * s) % n
    zeta = [mpmath.expjpi(mpmath.mpf(2 * t) / n) for t in range(n)]
    qp = [mpmath.mpc(1)]
    for _ in range(cutoff):
        qp.append(qp[-1] * q)
    total = mpmath.mpc(0)
    size = mpmath.mpf(0)  # sum of |terms| for rounding
    slope = mpmath.mpf(0)  # sum of e |terms|, bounds |d/dtau| up to 2 pi / n

    def add(e: int, coef: int, zexp: int) -> None:
        nonlocal total, size, slope
        if e < cutoff:
            term = coef * zeta[zexp % n] * qp[e]
            total += term
            a = abs(term)
            size += a
            slope += e * a

    if brace == 0:
        omega = zeta[w]
        const = omega / (1 - omega) ** 2
        total += const
        size += abs(const)
    else:
        m = 1
        while m * brace < cutoff:
            add(m * brace, m, m * w)
            m += 1
    k = 1
    while k * (n - brace) < cutoff:
        m = 1
        while k * (m * n - brace) < cutoff:
            base = m * k * n
            add(base + k * brace, k, k * w)
            add(base - k * brace, k, -k * w)
            add(base, -2 * k, 0)
            m += 1
        k += 1
    total += mpmath.mpf(1) / 12
    rounding = (size + 1) * (cutoff + 10) * _ulp_rel()
    # tau itself was computed with relative error ~ ulp
    drift = slope * 2 * mpmath.pi / n * abs(tau) * _ulp_rel() * 4
    return HPComplex(total, _tail(qabs, cutoff) + rounding + drift)


def wp_value(p: IndexPair, tau, digits: int = DEFAULT_DIGITS) -> HPComplex:
    """wp((r tau + s)/N; L_tau) / (2 pi i)^2, an exact weight-two form in tau."""
    with mpmath.workprec(_bits(digits)):
        tau = mpmath.mpc(tau)
        if tau.imag >= REDUCE_BELOW:
            return _wp_direct(p.level, p.r, p.s, tau, digits)
        red, a = fundamental_reduce(tau)
        if red.imag < REDUCE_BELOW:
            raise PrecisionFailure("reduced point below the evaluation threshold")
        # wp(tau; p) = wp(A tau; p A^-1) (c tau + d)^-2
        inv = a.inverse()
        q = IndexPair(p.level, inv.a * p.r + inv.c * p.s, inv.b * p.r + inv.d * p.s)
        value = _wp_direct(p.level, q.r, q.s, red, digits)
        factor = HPComplex.exact(tau) * a.c + a.d
        return value / (factor * factor)


def e_value(p: IndexPair, tau, digits: int = DEFAULT_DIGITS) -> HPComplex:
    """E(tau; r, s) = wp((r tau + s)/N) / (2 pi i)^2 - 1/12 with an error radius.

    Points with Im tau < 0.8 are first moved into the fundamental domain; the
    weight-two factor is applied to the wp part, since the constant -1/12 is
    not itself modular.
    """
    with mpmath.workprec(_bits(digits)):
        return wp_value(p, tau, digits) - HPComplex.exact(Fraction(1, 12))


def lambda_value(bp: BasisPair, theta, digits: int = DEFAULT_DIGITS) -> HPComplex:
    tau = theta.value() if isinstance(theta, CMPoint) else theta
    p1, p2, p3 = bp.indices()
    with mpmath.workprec(_bits(digits)):
        e1, e2, e3 = (wp_value(p, tau, digits) for p in (p1, p2, p3))
        return (e1 - e3) / (e2 - e3)


def lambda_k_value(n: int, k: int, theta, digits: int = DEFAULT_DIGITS) -> HPComplex:
    return lambda_value(BasisPair(n, (1, 0), (0, k)), theta, digits)


# ---------------------------------------------------------------------------
# j


def _j_tail(qabs, start: int) -> mpmath.mpf:
    """Bound for sum_{n >= start} exp(4 pi sqrt n) qabs^n (c(n) <= exp(4 pi sqrt n))."""
    rho = mpmath.exp(2 * mpmath.pi / mpmath.sqrt(start)) * qabs
    if rho >= 1:
        return mpmath.inf
    return mpmath.exp(4 * mpmath.pi * mpmath.sqrt(start)) * qabs**start / (1 - rho)


def j_value(tau, digits: int = DEFAULT_DIGITS) -> HPComplex:
    """j(tau) from its q-expansion at the reduced point, with a tail bound."""
    with mpmath.workprec(_bits(digits)):
        tau = mpmath.mpc(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        red, _ = fundamental_reduce(tau)
        q = mpmath.expjpi(2 * red)
        qabs = abs(q)
        target = mpmath.mpf(10) ** (-digits - 5)
        cutoff = 8
        while _j_tail(qabs, cutoff) > target:
            cutoff += 8
        cs = j_coefficients(cutoff + 1)  # exponents -1 .. cutoff - 1
        for e in range(1, cutoff):
            if cs[e + 1] > math.exp(4 * math.pi * math.sqrt(e)):
                raise AssertionError(f"j coefficient bound violated at q^{e}")
        total = mpmath.mpc(0)
        size = mpmath.mpf(0)
        slope = mpmath.mpf(0)
        qp = 1 / q
        for e in range(-1, cutoff):
            term = cs[e + 1] * qp
            total += term
            size += abs(term)
            slope += abs(e) * abs(term)
            qp *= q
        rounding = (size + 1) * (cutoff + 10) * _ulp_rel()
        drift = slope * 2 * mpmath.pi * abs(red) * _ulp_rel() * 4
        return HPComplex(total, _j_tail(qabs, cutoff) + rounding + drift)


# ---------------------------------------------------------------------------
# certificates


@dataclass
class CMCertificate:
    level: int
    k: int
    theta: CMPoint
    digits: int
    x: HPComplex
    j_theta: HPComplex
    residual: HPComplex
    tolerance: mpmath.mpf
    working_bits: int
    verdict: str
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "inputs": {
                "level": self.level,
                "k": self.k,
                "theta": self.theta.to_json(),
                "digits": self.digits,
            },
            "x": self.x.to_json(),
            "j_theta": self.j_theta.to_json(),
            "residual": self.residual.to_json(),
            "err": mpmath.nstr(self.residual.rad, 5),
            "tolerance": mpmath.nstr(self.tolerance, 5),
            "working_bits": self.working_bits,
            "verdict": self.verdict,
            "notes": self.notes,
        }


def _horner(coeffs: list[HPComplex], x: HPComplex) -> HPComplex:
    acc = HPComplex(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def cm_certify(
    n: int,
    k: int,
    theta: CMPoint,
    digits: int = DEFAULT_DIGITS,
    psi: PsiPoly | None = None,
    max_extra_digits: int = 400,
) -> CMCertificate:
    """Certify that C_N Lambda_k(theta) is a root of Psi_k specialized at j(theta).

    The residual must satisfy |Psi| + err < 10^(-digits/2). Working precision
    is raised until the error budget allows a decision; a residual that stays
    unresolved is reported as a precision failure, never as a pass.
    """
    if psi is None:
        psi = psi_poly(n, k)
    if (psi.level, psi.k) != (n, k % n):
        raise ValueError(f"Psi is for (N, k) = ({psi.level}, {psi.k}), not ({n}, {k})")
    tol = mpmath.mpf(10) ** (-(digits / 2))
    notes = []
    if theta.discriminant is not None and n != 6:
        notes.append(
            "maximal-order generator; the value is expected to generate the ray class "
            "field mod N over K(j(theta)) (not checked)"
        )
    extra = 20
    while True:
        work = digits + extra
        with mpmath.workprec(_bits(work)):
            tau = theta.value()
            x = lambda_k_value(n, k, tau, work) * c_constant(n)
            jt = j_value(tau, work)
            coeffs = psi_specialize(psi, jt, one=cyc_to_ball)
            res = _horner(coeffs, x)
            tol_here = mpmath.mpf(10) ** (-(mpmath.mpf(digits) / 2))
            if res.rad < tol_here / 1000 or extra >= max_extra_digits:
                verdict = "pass" if res.upper() < tol_here else (
                    "fail" if abs(res.mid) - res.rad > tol_here else "precision-insufficient"
                )
                return CMCertificate(
                    n, k, theta, digits, x, jt, res, tol, _bits(work), verdict, notes
                )
        extra *= 2
