"""Precision-recall data: sweep alpha and record skeleton TDR (precision) and TPR (recall).

    python3 scripts/pr_sweep.py --out pr.csv
"""
import argparse
import sys

from cglearn import __version__
from cglearn.evaluate import GridSpec, run_grid, summarize

ALPHAS = (0.005, 0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="pr.csv")
    ap.add_argument("--p", type=int, default=30)
    ap.add_argument("--N", type=float, default=2.0)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--algos", default="gs,iamb,mbc-csp")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    grid = GridSpec(ps=(args.p,), Ns=(args.N,), ns=(args.n,), alphas=ALPHAS, reps=args.reps,
                    algos=tuple(args.algos.split(",")), seed_base=args.seed, timing=False)
    rows = run_grid(grid, workers=args.workers)
    with open(args.out, "w") as fh:
        fh.write(f"# cglearn {__version__}\n# command: {' '.join(sys.argv)}\n# seed: {args.seed}\n")
        fh.write("algo,alpha,precision,recall,reps\n")
        for s in sorted(summarize(rows), key=lambda s: (s["algo"], s["alpha"])):
            prec = "" if s["tdr"] is None else f"{s['tdr']:.4f}"
            rec = "" if s["tpr"] is None else f"{s['tpr']:.4f}"
            fh.write(f"{s['algo']},{s['alpha']},{prec},{rec},{s['reps']}\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
