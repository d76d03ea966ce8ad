#!/usr/bin/env python3
"""Track how fast the multiplet measures approach their limits.

Runs a convergence sweep on one profile, optionally with a symbol for
the matrix-element measure, and reports the fitted W1 decay exponent.
Doubling ladders of ell are the default since parity effects cancel
along them.

Usage:
    python scripts/convergence_study.py --profile ellipsoid --aspect 1.3 \
        --ells 10 20 40 80 --symbol-expr "cos(r)" --out results/converge
"""
import argparse
import csv
import json
import os

from revtone import (
    ActionEvaluator,
    angular_symbol,
    make_ellipsoid,
    make_round_sphere,
    parse_expr,
    radial_symbol,
)
from revtone.measures import convergence_sweep

COLUMNS = ["ell", "M_ell", "M_ell_over_ell", "ks_mu", "w1_mu", "ks_nu", "w1_nu"]


def build_symbol(kind: str, expr: str | None):
    if expr is None:
        return None
    if kind == "radial_mult":
        return radial_symbol(parse_expr(expr, "r"), name=expr)
    return angular_symbol(parse_expr(expr, "s"), name=expr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--profile", choices=["sphere", "ellipsoid"],
                        default="sphere")
    parser.add_argument("--aspect", type=float, default=1.3)
    parser.add_argument("--ells", type=int, nargs="+", default=[10, 20, 40, 80])
    parser.add_argument("--grid", type=int, default=4000)
    parser.add_argument("--symbol-kind", choices=["radial_mult", "angular_ratio"],
                        default="radial_mult")
    parser.add_argument("--symbol-expr", default=None,
                        help="expression in r (radial) or s (angular)")
    parser.add_argument("--out", default="results/converge")
    args = parser.parse_args(argv)

    profile = make_round_sphere() if args.profile == "sphere" \
        else make_ellipsoid(args.aspect)
    ev = ActionEvaluator(profile)
    sym = build_symbol(args.symbol_kind, args.symbol_expr)

    report = convergence_sweep(profile, ev, args.ells, sym, grid_size=args.grid)

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "converge.json"), "w") as f:
        json.dump(report.as_dict(), f, indent=2)
    with open(os.path.join(args.out, "converge.csv"), "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(COLUMNS)
        for row in report.rows:
            writer.writerow([row.get(col) for col in COLUMNS])

    for row in report.rows:
        if "error" in row:
            print(f"ell {row['ell']}: {row['error']}")
        else:
            nu = "" if row["w1_nu"] is None else f", W1(nu) = {row['w1_nu']:.5f}"
            print(f"ell {row['ell']}: M = {row['M_ell']:.3f}, "
                  f"W1(mu) = {row['w1_mu']:.5f}{nu}")
    print(f"fit: W1 ~ ell^{report.fit['w1_exponent']:.3f} "
          f"(r^2 = {report.fit['w1_r2']:.4f})")
    if report.fit_even is not None:
        print(f"even-ell fit: W1 ~ ell^{report.fit_even['w1_exponent']:.3f}")
    print(f"wrote report to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
