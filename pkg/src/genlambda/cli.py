"""Command-line front end: ``genlambda <subcommand> ...``.

Exit status: 0 all checks passed, 1 a check failed, 2 usage error,
3 the requested precision could not be certified.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from math import gcd
from pathlib import Path

from .cm import PrecisionFailure
from .eisenstein import DegenerateDifference, IndexPair, e_series
from .lambdas import (
    BasisPair,
    decompose_basis,
    integrality_certificate,
    lambda_basis,
    lambda_composed,
    level6_check,
)
from .modpoly import PsiPoly, coset_reps, psi_poly
from .qseries import PrecisionError
from .sl2 import SL2Mat, parse_matrix
from .suite import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3


def _pair(text: str) -> tuple[int, int]:
    try:
        r, s = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected r,s got {text!r}") from None
    return r, s


def _matrix(text: str) -> SL2Mat:
    try:
        return parse_matrix(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _human_series(series) -> str:
    parts = [f"({c})*q^{e}" for e, c in series.terms().items()]
    return " + ".join(parts or ["0"]) + f" + O(q^{series.precision})"


def cmd_eseries(args) -> int:
    n = args.level
    p = IndexPair(n, *args.pair)
    series = e_series(p, args.prec or 20)
    if args.json:
        _emit({"level": n, "pair": [p.r, p.s], "series": series.to_json()}, args.out)
    else:
        print(_human_series(series))
    return EXIT_OK


def cmd_lambda(args) -> int:
    n = args.level
    prec = args.prec or 20
    if args.q1 is not None or args.q2 is not None:
        if args.q1 is None or args.q2 is None:
            raise UsageError("--q1 and --q2 must be given together")
        bp = BasisPair(n, args.q1, args.q2)
        k, a = decompose_basis(bp)
        series = lambda_basis(bp, prec)
    else:
        k, a = args.k, args.matrix or SL2Mat.identity()
        series = lambda_composed(n, k, a, prec)
    if args.json:
        _emit(
            {"level": n, "k": k, "matrix": a.to_list(), "series": series.to_json()},
            args.out,
        )
    else:
        print(f"# k = {k}, A = {a.to_list()}")
        print(_human_series(series))
    return EXIT_OK


def cmd_certify(args) -> int:
    if args.what == "remark34":
        rep = level6_check((args.prec or 200) + 1)
        _emit(rep.to_json(), args.out)
        return EXIT_OK if rep.passed else EXIT_FAIL
    n = args.level
    prec = (args.prec or 100) + 1
    fails, count = [], 0
    for k in range(1, n):
        if gcd(k, n) != 1:
            continue
        for a in coset_reps(n):
            count += 1
            rep = integrality_certificate(n, k, a, prec)
            if not rep.passed:
                fails.append(rep.to_json())
    _emit({"level": n, "through": prec - 1, "certificates": count, "failures": fails}, args.out)
    return EXIT_OK if not fails else EXIT_FAIL


def cmd_psi(args) -> int:
    psi = psi_poly(args.level, args.k, relative=args.prec)
    text = psi.dumps()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    ok = psi.is_monic() and psi.all_integral() and psi.checks.get("remainder_zero", False)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cm(args) -> int:
    from .cm import CMPoint, cm_certify

    if (args.theta is None) == (args.disc is None):
        raise UsageError("give exactly one of --theta and --disc")
    point = CMPoint.parse(args.theta) if args.theta else CMPoint.from_discriminant(args.disc)
    psi = PsiPoly.from_json(json.loads(Path(args.psi).read_text())) if args.psi else None
    cert = cm_certify(args.level, args.k, point, args.digits or 50, psi=psi)
    _emit(cert.to_json(), args.out)
    if cert.verdict == "precision-insufficient":
        return EXIT_PRECISION
    return EXIT_OK if cert.passed else EXIT_FAIL


def _suite_config(args) -> SuiteConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
        known = {f.name for f in fields(SuiteConfig)}
        unknown = set(base) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    flags = {
        "levels": args.levels or ([args.level] if args.level else None),
        "precision": args.prec,
        "digits": args.digits,
        "jobs": args.jobs,
        "seed": args.seed,
        "out": args.out,
        "samples": args.samples,
    }
    base.update({k: v for k, v in flags.items() if v is not None})
    return SuiteConfig(**base)


def cmd_suite(args) -> int:
    cfg = _suite_config(args)
    status, reports = run_suite(args.name, cfg)
    for rep in reports:
        bad = [c["name"] for c in rep["checks"] if not c["pass"]]
        mark = "PASS" if rep["pass"] else "FAIL"
        tail = f"  failing: {', '.join(bad)}" if bad else ""
        print(f"{mark}  {rep['suite']:<12} N={rep['level']:<3} checks={len(rep['checks'])}{tail}")
    return status


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--level", "-N", type=int, help="level N >= 2")
    common.add_argument("--prec", type=int, help="q-precision")
    common.add_argument("--digits", type=int, help="decimal digits for numerics")
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--out", help="output file or directory")

    parser = argparse.ArgumentParser(prog="genlambda", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eseries", parents=[common], help="q-expansion of E(tau; r, s)")
    p.add_argument("--pair", type=_pair, required=True, metavar="R,S")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eseries, needs_level=True)

    p = sub.add_parser("lambda", parents=[common], help="q-expansion of Lambda_k o A")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--matrix", type=_matrix, metavar="A,B,C,D")
    p.add_argument("--q1", type=_pair, metavar="R,S")
    p.add_argument("--q2", type=_pair, metavar="R,S")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lambda, needs_level=True)

    p = sub.add_parser("certify", parents=[common], help="integrality or level-6 checks")
    p.add_argument("what", choices=["integrality", "remark34"])
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("psi", parents=[common], help="build Psi_k(X) and write it as JSON")
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_psi, needs_level=True)

    p = sub.add_parser("cm", parents=[common], help="certify a CM value as a root of Psi_k")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--theta", help='point such as "i" or "(1+sqrt(3)*i)/2"')
    p.add_argument("--disc", type=int, help="negative discriminant")
    p.add_argument("--psi", help="precomputed Psi_k JSON")
    p.set_defaults(func=cmd_cm, needs_level=True)

    p = sub.add_parser("suite", parents=[common], help="run a verification suite")
    p.add_argument("name", choices=SUITES)
    p.add_argument("--levels", type=int, nargs="+")
    p.add_argument("--samples", type=int, help="random samples per property")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    needs_level = getattr(args, "needs_level", False) or (
        args.command == "certify" and args.what == "integrality"
    )
    if needs_level and args.level is None:
        print("error: --level is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (PrecisionError, PrecisionFailure) as exc:
        print(f"precision insufficient: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (UsageError, DegenerateDifference, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
