"""Desk-scale benchmark: p=30, N=2, n in {200, 2000}, alpha=0.05, 30 replicates.

Writes the per-replicate rows and the per-cell means, then prints the paired
sign test on skeleton recall between the two sample sizes.

    python3 scripts/run_desk_grid.py --out desk.csv --summary desk_summary.csv
"""
import argparse
import sys

import numpy as np
from scipy.stats import binomtest

from cglearn import __version__
from cglearn.evaluate import GridSpec, run_grid, write_summary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="desk.csv")
    ap.add_argument("--summary", default="desk_summary.csv")
    ap.add_argument("--reps", type=int, default=30)
    ap.add_argument("--algos", default="mbc-csp", help="comma-separated")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    grid = GridSpec(ps=(30,), Ns=(2.0,), ns=(200, 2000), alphas=(0.05,), reps=args.reps,
                    algos=tuple(args.algos.split(",")), seed_base=args.seed)
    header = [f"cglearn {__version__}", "command: " + " ".join(sys.argv), f"seed: {args.seed}"]
    with open(args.out, "w", newline="") as fh:
        rows = run_grid(grid, fh, workers=args.workers, header=header)
    with open(args.summary, "w", newline="") as fh:
        write_summary(rows, fh, header)

    for algo in grid.algos:
        tpr = {(r["rep"], r["n"]): r["tpr"] for r in rows if r["algo"] == algo.value and r.get("tpr") is not None}
        diffs = np.array([tpr[k, 2000] - tpr[k, 200] for k in range(args.reps) if (k, 200) in tpr and (k, 2000) in tpr])
        wins, losses = int((diffs > 0).sum()), int((diffs < 0).sum())
        pval = binomtest(wins, wins + losses, alternative="greater").pvalue if wins + losses else 1.0
        print(f"{algo.value}: mean TPR gain {diffs.mean():+.3f}, sign test {wins}+/{losses}-, p={pval:.2e}")


if __name__ == "__main__":
    main()
