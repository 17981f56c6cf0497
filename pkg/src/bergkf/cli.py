"""``bergkf`` command line: oracles, boundary sweeps, scaling sweeps, moments, point evaluation."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import lab


def _print_report(report, output):
    print(report.summary())
    if output:
        path = report.write(output)
        print(f"wrote {path} and {path}.json")


def cmd_ball_oracle(args) -> int:
    rep = lab.run_ball_oracle(args.n, count=args.count, seed=args.seed)
    print(rep.summary())
    print(f"  elapsed {rep.seconds:.3f} s")
    return 0 if rep.passed else 1


def _config(args) -> lab.ExperimentConfig:
    cfg = lab.ExperimentConfig.from_file(args.config)
    if args.output:
        cfg.output = args.output
    return cfg


def cmd_asymptotics(args) -> int:
    cfg = _config(args)
    rep = lab.run_asymptotics(cfg)
    _print_report(rep, cfg.output)
    return 0 if rep.passed else 1


def cmd_scaling(args) -> int:
    cfg = _config(args)
    rep = lab.run_scaling(cfg)
    _print_report(rep, cfg.output)
    return 0 if rep.passed else 1


def cmd_moments(args) -> int:
    rows, ok = lab.run_moments(args.p, args.N)
    if args.output:
        lab.write_moments(args.output, rows)
    for r in rows:
        flag = "ok " if r.rel_err <= lab.MOMENT_QUAD_RTOL else "BAD"
        print(f"{flag} alpha={r.alpha} c={r.c:.17g} quad={r.c_quad:.17g} rel={r.rel_err:.3g}")
    return 0 if ok else 1


def cmd_eval(args) -> int:
    z = lab.parse_vector(args.point)
    prov = lab.provider_for(args.domain, z.size, args.p or (), args.N)
    if not prov.contains(z):
        print("point is outside the domain", file=sys.stderr)
        return 2
    X = lab.parse_vector(args.vector) if args.vector else None
    out = lab.evaluate_point(prov, z, X)
    with np.printoptions(precision=12, suppress=False):
        for k, v in out.items():
            print(f"{k} = {v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bergkf", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ball-oracle", help="closed-form checks on the unit ball")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--count", type=int, default=25)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_ball_oracle)

    for name, func, hlp in (
        ("asymptotics", cmd_asymptotics, "boundary-approach sweep"),
        ("scaling", cmd_scaling, "scaled kernels at b* against the Siegel domain"),
    ):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--config", required=True)
        s.add_argument("--output", help="CSV path (overrides the config)")
        s.set_defaults(func=func)

    s = sub.add_parser("moments", help="monomial moments with a quadrature check")
    s.add_argument("--p", type=float, nargs="+", required=True)
    s.add_argument("--N", type=int, default=4, help="maximum total degree")
    s.add_argument("--output")
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("eval", help="kernel, metrics and curvatures at one point")
    s.add_argument("--domain", required=True, choices=["ball", "polydisc", "siegel", "ellipsoid"])
    s.add_argument("--point", required=True, help="comma-separated a+bi entries")
    s.add_argument("--vector")
    s.add_argument("--p", type=float, nargs="+", help="ellipsoid exponents")
    s.add_argument("--N", type=int, help="ellipsoid series truncation")
    s.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"bergkf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
