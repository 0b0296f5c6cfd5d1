"""Run GD, FGM and OGM against the resisting oracle for a range of N and tabulate gap/bound.

    python scripts/sweep_methods.py --n-max 30 --out runs/sweep.csv --transcripts runs/transcripts
"""
import argparse
from pathlib import Path

from minimax_smooth.harness import ExperimentConfig, export, run_experiment
from minimax_smooth.methods import METHODS


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--extra-dim", type=int, default=0, help="use d = N + 1 + extra_dim")
    p.add_argument("--out", default="runs/sweep.csv")
    p.add_argument("--transcripts", default=None)
    args = p.parse_args()

    records = []
    print(f"{'N':>4} " + " ".join(f"{m + ' ratio':>12}" for m in METHODS))
    for N in range(1, args.n_max + 1):
        row = []
        for m in METHODS:
            tr = str(Path(args.transcripts) / f"{m}_N{N}.jsonl") if args.transcripts else None
            rec = run_experiment(ExperimentConfig(L=args.L, R=args.R, N=N, d=N + 1 + args.extra_dim,
                                                  method=m, transcript=tr))
            records.append(rec)
            row.append(rec.ratio)
        print(f"{N:>4} " + " ".join(f"{r:12.8f}" for r in row))
    print(f"wrote {export(records, args.out)}")


if __name__ == "__main__":
    main()
