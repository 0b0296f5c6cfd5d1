"""Command line entry point: bounds, eval, run, certify."""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .harness import CSV_COLUMNS, FLOAT_FMT, ExperimentConfig, certify, run_experiment
from .methods import METHODS
from .theta_zeta import reference_bounds
from .worst_case import eval_worst_case, worst_case_function


def _fmt(x) -> str:
    return FLOAT_FMT.format(x)


def _cmd_bounds(args) -> int:
    rep = reference_bounds(args.L, args.R, args.N, args.M)
    for key, val in rep.as_dict().items():
        if val is not None:
            print(f"{key}: {_fmt(val) if isinstance(val, float) else val}")
    return 0


def _cmd_eval(args) -> int:
    W = worst_case_function(args.N, args.L, args.R)
    y = np.array([float(v) for v in args.point.split(",")])
    if y.shape != (W.dim,):
        print(f"error: point must have N+1={W.dim} coordinates, got {y.size}", file=sys.stderr)
        return 2
    res = eval_worst_case(W, y)
    print(f"value: {_fmt(res.value)}")
    print("gradient: " + ",".join(_fmt(g) for g in res.gradient))
    m, t = res.active_pair
    print(f"active_pair: {m},{_fmt(t)}")
    return 0


def _cmd_run(args) -> int:
    overrides = {k: getattr(args, k) for k in ("L", "R", "N", "d", "method", "tol", "seed", "out", "transcript")}
    if args.config:
        cfg = ExperimentConfig.from_file(args.config, **overrides)
    else:
        cfg = ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})
    try:
        rec = run_experiment(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(",".join(CSV_COLUMNS))
    print(",".join(rec.row()))
    ok = rec.replay_ok and rec.ratio >= 1.0 - 1e-9
    return 0 if ok else 1


def _cmd_certify(args) -> int:
    rep = certify(n_max=args.n_max, L=args.L, R=args.R, seed=args.seed, probes=args.probes,
                  zeta_perturbation=args.perturb_zeta, transcript_dir=args.transcripts)
    for r in rep.records:
        if args.verbose or not r.passed:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status} {r.name}: observed={_fmt(r.observed)} ({r.expected})")
    print(json.dumps(rep.summary()))
    if args.out:
        rep.write(args.out)
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minimax-smooth", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="closed-form reference bounds")
    b.add_argument("--L", type=float, required=True)
    b.add_argument("--R", type=float, required=True)
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--M", type=float, default=None, help="Lipschitz constant for the non-smooth reference")
    b.set_defaults(func=_cmd_bounds)

    e = sub.add_parser("eval", help="evaluate the worst-case function at a point")
    e.add_argument("--N", type=int, required=True)
    e.add_argument("--L", type=float, required=True)
    e.add_argument("--R", type=float, required=True)
    e.add_argument("--point", required=True, help="comma-separated N+1 coordinates")
    e.set_defaults(func=_cmd_eval)

    r = sub.add_parser("run", help="run one method against the resisting oracle")
    r.add_argument("--config", default=None, help="JSON file with ExperimentConfig keys; flags override")
    r.add_argument("--method", choices=sorted(METHODS), default=None)
    r.add_argument("--L", type=float, default=None)
    r.add_argument("--R", type=float, default=None)
    r.add_argument("--N", type=int, default=None)
    r.add_argument("--d", type=int, default=None)
    r.add_argument("--tol", type=float, default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", default=None, help="CSV file to append the result row to")
    r.add_argument("--transcript", default=None, help="JSON Lines transcript path")
    r.set_defaults(func=_cmd_run)

    c = sub.add_parser("certify", help="run the numerical certificate sweep")
    c.add_argument("--n-max", type=int, default=30)
    c.add_argument("--L", type=float, default=1.0)
    c.add_argument("--R", type=float, default=1.0)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--probes", type=int, default=100)
    c.add_argument("--perturb-zeta", type=float, default=None,
                   help="add this multiple of zeta_0 to zeta_1 (the checks must then fail)")
    c.add_argument("--transcripts", default=None, help="directory for per-run transcripts")
    c.add_argument("--out", default=None, help="JSON report path")
    c.add_argument("-v", "--verbose", action="store_true")
    c.set_defaults(func=_cmd_certify)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
