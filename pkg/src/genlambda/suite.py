"""Orchestrated verification suites with deterministic JSON reports."""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from math import gcd
from pathlib import Path

from . import eisenstein as es
from .cyclotomic import CycNum
from .eisenstein import IndexPair
from .lambdas import (
    BasisPair,
    decompose_basis,
    default_precision,
    integrality_certificate,
    lambda_basis,
    lambda_composed,
    lambda_k_series,
    twist_matrix,
    level6_check,
)
from .modpoly import classical_sextic, coset_reps, psi_poly, rational_table
from .qseries import QSeries
from .sl2 import SL2Mat, random_gamma, random_sl2

SUITES = ("eisenstein", "lambda", "integrality", "psi", "remark34", "cm")

DEFAULT_LEVELS = {
    "eisenstein": [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
    "lambda": [3, 4, 5, 7, 8],
    "integrality": [3, 4, 5, 7, 8, 9, 12],
    "psi": [2, 3],
    "remark34": [6],
    "cm": [2, 3, 4, 5],
}


@dataclass
class SuiteConfig:
    levels: list[int] | None = None
    precision: int | None = None
    digits: int = 60
    jobs: int = 1
    out: str = "reports"
    seed: int = 0
    samples: int = 20

    @classmethod
    def from_file(cls, path: str | Path) -> "SuiteConfig":
        data = json.loads(Path(path).read_text())
        return cls(**data)


@dataclass
class CheckRecord:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, **self.detail}


def _rng(cfg: SuiteConfig, suite: str, level: int) -> random.Random:
    return random.Random(f"{cfg.seed}:{suite}:{level}")


def _mismatch(name: str, lhs: QSeries, rhs: QSeries, **ctx) -> CheckRecord:
    """Compare two series exactly; report the first differing coefficient."""
    diff = lhs - rhs
    if diff.is_zero():
        return CheckRecord(name, True, {**ctx, "agree_to": diff.precision})
    e = diff.order
    return CheckRecord(
        name,
        False,
        {**ctx, "exponent": e, "expected": rhs[e].to_json(), "got": lhs[e].to_json()},
    )


# ---------------------------------------------------------------------------
# individual suites


def low_order_checks(n: int) -> list[CheckRecord]:
    z = CycNum.zeta(n)
    theta = z / (1 - z) ** 2
    want1 = QSeries(n, 0, [theta, -z, -2 * z * z], 3)
    want2 = QSeries(n, 0, [0, 1 - z, 2 * (1 - z * z)], 3)
    got1 = es.e_diff_series(IndexPair(n, 0, 1), IndexPair(n, 1, 1), 3)
    got2 = es.e_diff_series(IndexPair(n, 1, 0), IndexPair(n, 1, 1), 3)
    t, th = es.theta_leading(IndexPair(n, 0, 1), IndexPair(n, 1, 1))
    return [
        _mismatch("low_order_first", got1, want1, level=n),
        _mismatch("low_order_second", got2, want2, level=n),
        CheckRecord("low_order_theta", t == 0 and th == theta, {"level": n}),
    ]


def pair_classes(n: int) -> list[IndexPair]:
    """One index pair per class of (Z/N)^2 minus 0 modulo sign."""
    seen, out = set(), []
    for r in range(n):
        for s in range(n):
            if (r, s) == (0, 0):
                continue
            key = min((r, s), ((-r) % n, (-s) % n))
            if key not in seen:
                seen.add(key)
                out.append(IndexPair(n, *key))
    return out


@lru_cache(maxsize=None)
def _closed_form_part(n: int, brace: int, w: int) -> QSeries:
    """sum_{m<N} m u^m + u^-1 q^N mod q^N, u = zeta^w q^brace, brace > 0."""
    terms: dict[int, CycNum] = {}
    for e, c in [(m * brace, CycNum.zeta(n, m * w) * m) for m in range(1, n)] + [
        (n - brace, CycNum.zeta(n, -w))
    ]:
        if e < n:
            terms[e] = terms.get(e, CycNum.zero(n)) + c
    return QSeries.from_terms(n, terms, n)


def closed_form_mod_level(p1: IndexPair, p2: IndexPair) -> QSeries:
    """Closed-form truncation mod q^N of E(p1) - E(p2), {r1} <= {r2}."""
    n = p1.level
    x1, x2 = p1.reduced(), p2.reduced()
    if x1.brace:
        return _closed_form_part(n, x1.brace, x1.omega_exponent) - _closed_form_part(
            n, x2.brace, x2.omega_exponent
        )
    w1, w2 = CycNum.zeta(n, x1.omega_exponent), CycNum.zeta(n, x2.omega_exponent)
    if x2.brace:
        return QSeries.constant(n, w1 / (1 - w1) ** 2, n) - _closed_form_part(
            n, x2.brace, x2.omega_exponent
        )
    return QSeries.constant(n, (w1 - w2) * (1 - w1 * w2) / ((1 - w1) ** 2 * (1 - w2) ** 2), n)


def leading_term_checks(n: int, tail: int | None = None) -> list[CheckRecord]:
    """Closed forms mod q^N, leading terms and tail integrality for all class pairs."""
    tail = 4 * n if tail is None else tail
    classes = pair_classes(n)
    fails22, fails23, fails_h, count = [], [], [], 0
    for i, p1 in enumerate(classes):
        for p2 in classes[i + 1 :]:
            a, b = (p1, p2) if p1.reduced().brace <= p2.reduced().brace else (p2, p1)
            count += 1
            full = es.e_diff_series(a, b, n + tail + 2)
            if not (full.truncate(n) - closed_form_mod_level(a, b)).is_zero():
                fails22.append([[a.r, a.s], [b.r, b.s]])
            t, theta = es.theta_leading(a, b)
            t_rev, theta_rev = es.theta_leading(b, a)
            if full.order != t or full.leading_coefficient() != theta or (t_rev, theta_rev) != (
                t,
                -theta,
            ):
                fails23.append([[a.r, a.s], [b.r, b.s]])
                continue
            unit = full.shift(-t).scale(theta.inverse()).truncate(tail + 2)
            if not unit.is_integral():
                fails_h.append([[a.r, a.s], [b.r, b.s]])
    return [
        CheckRecord("closed_form_congruences", not fails22, {"level": n, "pairs": count, "failures": fails22[:5]}),
        CheckRecord("leading_terms", not fails23, {"level": n, "pairs": count, "failures": fails23[:5]}),
        CheckRecord(
            "tail_integral",
            not fails_h,
            {"level": n, "through": tail, "pairs": count, "failures": fails_h[:5]},
        ),
    ]


def galois_e_checks(n: int, prec: int = 101) -> list[CheckRecord]:
    bad = []
    for r in range(n):
        for s in range(n):
            if (r, s) == (0, 0):
                continue
            p = IndexPair(n, r, s)
            base = es.e_series(p, prec)
            for ell in range(1, n):
                if gcd(ell, n) == 1 and base.galois(ell) != es.e_series(IndexPair(n, r, s * ell), prec):
                    bad.append([r, s, ell])
    return [CheckRecord("galois_indices", not bad, {"level": n, "through": prec - 1, "failures": bad[:5]})]


def periodicity_checks(n: int, rng: random.Random, prec: int = 60) -> list[CheckRecord]:
    bad = []
    for _ in range(10):
        r, s = rng.randrange(n), rng.randrange(n)
        if (r, s) == (0, 0):
            continue
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)
        ref = es._e_series_uncached(n, r, s, prec)
        if es._e_series_uncached(n, r + a * n, s + b * n, prec) != ref:
            bad.append(["shift", r, s, a, b])
        if es._e_series_uncached(n, -r, -s, prec) != ref:
            bad.append(["neg", r, s])
    return [CheckRecord("periodicity_evenness", not bad, {"level": n, "failures": bad})]


def run_eisenstein(n: int, cfg: SuiteConfig) -> list[CheckRecord]:
    rng = _rng(cfg, "eisenstein", n)
    out = []
    if n >= 3:
        out += low_order_checks(n)
    out += leading_term_checks(n)
    out += galois_e_checks(n)
    out += periodicity_checks(n, rng)
    if n == 2:
        s = sum((es.e_series(IndexPair(2, *p), 50) for p in [(1, 0), (0, 1), (1, 1)]),
                QSeries.zero(2, 50))
        out.append(_mismatch("trace_identity", s, QSeries.constant(2, CycNum.rational(2, -1) / 4, 50)))
    return out


def random_outside(n: int, rng: random.Random) -> SL2Mat:
    while True:
        a = random_sl2(rng)
        if not a.in_pm_gamma(n):
            return a


def run_lambda(n: int, cfg: SuiteConfig) -> list[CheckRecord]:
    rng = _rng(cfg, "lambda", n)
    prec = cfg.precision or 101
    units = [k for k in range(1, n) if gcd(k, n) == 1]
    out = []
    bad_twist = []
    for _ in range(cfg.samples):
        k, a = rng.choice(units), random_sl2(rng)
        lhs = lambda_composed(n, k, a, prec)
        rhs = lambda_composed(n, 1, twist_matrix(n, k, a), prec).galois(k)
        if lhs != rhs:
            bad_twist.append({"k": k, "A": a.to_list()})
    out.append(CheckRecord("galois_twist", not bad_twist, {"level": n, "through": prec - 1, "failures": bad_twist}))

    bad_gamma, bad_pm = [], []
    for _ in range(5):
        k, a, g = rng.choice(units), random_sl2(rng), random_gamma(rng, n)
        base = lambda_composed(n, k, a, 4 * n + 1)
        if lambda_composed(n, k, a @ g, 4 * n + 1) != base:
            bad_gamma.append({"k": k, "A": a.to_list(), "gamma": g.to_list()})
        if lambda_composed(n, k, -a, 4 * n + 1) != base:
            bad_pm.append({"k": k, "A": a.to_list()})
    out.append(CheckRecord("gamma_invariance", not bad_gamma, {"level": n, "failures": bad_gamma}))
    out.append(CheckRecord("pm_invariance", not bad_pm, {"level": n, "failures": bad_pm}))

    if n != 6:
        lam1 = lambda_k_series(n, 1, 4 * n + 1)
        same = []
        for _ in range(cfg.samples):
            a = random_outside(n, rng)
            if lambda_composed(n, 1, a, 4 * n + 1) == lam1:
                same.append(a.to_list())
        out.append(CheckRecord("non_invariance", not same, {"level": n, "through": 4 * n, "fixed_by": same}))

    bad_dec = []
    for _ in range(10):
        while True:
            q1 = (rng.randrange(n), rng.randrange(n))
            q2 = (rng.randrange(n), rng.randrange(n))
            if gcd(q1[0] * q2[1] - q1[1] * q2[0], n) == 1:
                break
        bp = BasisPair(n, q1, q2)
        k, a = decompose_basis(bp)
        if lambda_basis(bp, 2 * n + 1) != lambda_composed(n, k, a, 2 * n + 1):
            bad_dec.append({"q1": list(q1), "q2": list(q2)})
    out.append(CheckRecord("decompose_roundtrip", not bad_dec, {"level": n, "failures": bad_dec}))
    return out


def run_integrality(n: int, cfg: SuiteConfig) -> list[CheckRecord]:
    prec = cfg.precision or 101
    fails, count = [], 0
    for k in range(1, n):
        if gcd(k, n) != 1:
            continue
        for a in coset_reps(n):
            count += 1
            rep = integrality_certificate(n, k, a, prec)
            if not rep.passed:
                fails.append(rep.to_json())
    return [
        CheckRecord(
            "integrality_sweep",
            not fails,
            {"level": n, "through": prec - 1, "certificates": count, "failures": fails},
        )
    ]


def run_psi(n: int, cfg: SuiteConfig) -> list[CheckRecord]:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = []
    for k in range(1, n):
        if gcd(k, n) != 1:
            continue
        psi = psi_poly(n, k)
        path = out_dir / f"psi_{n}_{k}.json"
        path.write_text(psi.dumps())
        ok = (
            psi.degree == len(coset_reps(n))
            and psi.is_monic()
            and psi.all_integral()
            and psi.checks["min_verified_margin"] >= 8 * n
        )
        out.append(CheckRecord("psi", ok, {"level": n, "k": k, "file": path.name, "checks": psi.checks}))
        if n == 2:
            out.append(CheckRecord("classical_sextic", rational_table(psi) == classical_sextic(), {"level": 2}))
    return out


def run_level6(n: int, cfg: SuiteConfig) -> list[CheckRecord]:
    rep = level6_check((cfg.precision or 200) + 1)
    return [CheckRecord("remark34", rep.passed, rep.to_json())]


CM_CASES = {
    2: [(1, "i")],
    3: [(1, "i"), (1, "(1+sqrt(3)*i)/2")],
    4: [(1, "i")],
    5: [(1, "i"), (2, "i")],
}


def run_cm(n: int, cfg: SuiteConfig) -> list[CheckRecord]:
    from .cm import CMPoint, cm_certify

    out = []
    for k, theta in CM_CASES.get(n, [(1, "i")]):
        cert = cm_certify(n, k, CMPoint.parse(theta), cfg.digits)
        out.append(CheckRecord("cm_certify", cert.passed, cert.to_json()))
    return out


RUNNERS = {
    "eisenstein": run_eisenstein,
    "lambda": run_lambda,
    "integrality": run_integrality,
    "psi": run_psi,
    "remark34": run_level6,
    "cm": run_cm,
}


def _run_item(args) -> dict:
    name, n, cfg = args
    checks = RUNNERS[name](n, cfg)
    return {
        "suite": name,
        "level": n,
        "seed": cfg.seed,
        "checks": [c.to_json() for c in checks],
        "pass": all(c.passed for c in checks),
    }


def run_suite(name: str, cfg: SuiteConfig) -> tuple[int, list[dict]]:
    """Run a suite over its levels; write one report per level; return (exit status, reports)."""
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    levels = cfg.levels or DEFAULT_LEVELS[name]
    items = [(name, n, cfg) for n in levels]
    if cfg.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            reports = list(pool.map(_run_item, items))
    else:
        reports = [_run_item(it) for it in items]
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        path = out_dir / f"{name}_{rep['level']}.json"
        path.write_text(json.dumps(rep, sort_keys=True, indent=1) + "\n")
    status = 0 if all(r["pass"] for r in reports) else 1
    return status, reports


def config_dict(cfg: SuiteConfig) -> dict:
    return asdict(cfg)
