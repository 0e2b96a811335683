"""Command-line front end: the random matrix calculator.

Each subcommand takes an ensemble expression, folds it through the
operational laws, and emits the requested view: the canonical polynomial,
any of the six encodings, a density profile as CSV with a JSON sidecar,
exact moment or cumulant series, a fitted recurrence, or a Monte Carlo
verification report.

Exit codes: 0 success, 1 user error (syntax, unknown encoding, bad flags),
2 numeric failure inside the pipeline.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dsl
from .density import DensityError, density_grid
from .encodings import KIND_LABELS, EncodingError, convert
from .moments import MomentError, cumulant_series, fit_recurrence, \
    moment_series
from .oplaws import OperationalLawError


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rmcalc",
        description="Symbolic-numeric calculator for limiting eigenvalue "
                    "distributions of algebraic random matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="canonical Stieltjes polynomial")
    p.add_argument("expression")

    p = sub.add_parser("encode", help="polynomial in a chosen encoding")
    p.add_argument("expression")
    p.add_argument("--kind", default="mz", choices=sorted(KIND_LABELS))

    p = sub.add_parser("density", help="density profile as CSV")
    p.add_argument("expression")
    p.add_argument("--zmin", type=float, default=None)
    p.add_argument("--zmax", type=float, default=None)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--out", default=None,
                   help="CSV path; stdout when omitted")

    p = sub.add_parser("moments", help="exact moment series")
    p.add_argument("expression")
    p.add_argument("--n", type=int, default=8)

    p = sub.add_parser("cumulants", help="exact free cumulant series")
    p.add_argument("expression")
    p.add_argument("--n", type=int, default=8)

    p = sub.add_parser("recurrence", help="fit a moment recurrence")
    p.add_argument("expression")
    p.add_argument("--max-order", type=int, default=3)
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--terms", type=int, default=30,
                   help="series length used for fitting")

    p = sub.add_parser("verify", help="Monte Carlo comparison report")
    p.add_argument("expression")
    p.add_argument("--dim", type=int, default=200)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.1)
    return parser


def _distribution(text):
    return dsl.to_distribution(dsl.parse(text))


def _cmd_poly(args):
    dist = _distribution(args.expression)
    print(dist.poly)
    print(dist.poly.to_json())
    return 0


def _cmd_encode(args):
    dist = convert(_distribution(args.expression), args.kind)
    print(dist)
    print(dist.poly.to_json())
    return 0


def _cmd_density(args):
    dist = _distribution(args.expression)
    profile = density_grid(dist.poly, z_min=args.zmin, z_max=args.zmax,
                           n_points=args.points)
    if args.out:
        profile.to_csv(args.out, sidecar=args.out + ".json")
    else:
        print("z,f")
        for z, f in zip(profile.grid, profile.density):
            print(f"{z!r},{f!r}")
        print(json.dumps({
            "atoms": [[x, w] for x, w in profile.atoms.atoms],
            "endpoints": list(profile.support.endpoints),
            "poles": list(profile.support.poles),
            "total_mass": profile.total_mass,
        }))
    return 0


def _cmd_moments(args):
    series = moment_series(_distribution(args.expression), args.n)
    print(",".join(str(c) for c in series.coefficients))
    return 0


def _cmd_cumulants(args):
    series = cumulant_series(_distribution(args.expression), args.n)
    print(",".join(str(c) for c in series.coefficients))
    return 0


def _cmd_recurrence(args):
    series = moment_series(_distribution(args.expression), args.terms)
    rec = fit_recurrence(series, args.max_order, args.max_degree)
    if rec is None:
        print("no recurrence within bounds; try more terms or wider bounds")
        return 2
    print(rec)
    print(json.dumps(rec.to_json()))
    return 0


def _cmd_verify(args):
    from .sampler import verify_expression
    report = verify_expression(args.expression, n=args.dim,
                               trials=args.trials, seed=args.seed,
                               threshold=args.threshold)
    print(json.dumps(report, indent=2))
    return 0 if report["passed"] else 2


_COMMANDS = {
    "poly": _cmd_poly,
    "encode": _cmd_encode,
    "density": _cmd_density,
    "moments": _cmd_moments,
    "cumulants": _cmd_cumulants,
    "recurrence": _cmd_recurrence,
    "verify": _cmd_verify,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (dsl.DslError, EncodingError, OperationalLawError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DensityError, MomentError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
