"""Command-line entry point: ``cglearn <generate|learn-mb|learn-cg|evaluate|benchmark>``.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import shlex
import sys
from pathlib import Path

from . import __version__
from .blanket import MbAlgorithm, learn_mb
from .ci import FisherZ, GraphOracle, read_dataset, write_dataset
from .errors import CGLearnError
from .evaluate import evaluate, parse_grid, run_grid, write_summary
from .graph import read_graph, write_graph
from .learner import LearnTrace, mblwf
from .simulate import GenConfig, SampleConfig, random_cg, sample_gaussian

log = logging.getLogger("cglearn")

RIDGE = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _header(argv, seed=None) -> list[str]:
    return [
        f"cglearn {__version__}",
        "command: cglearn " + " ".join(shlex.quote(a) for a in argv),
        f"seed: {seed if seed is not None else 'none'}",
    ]


def _source(args):
    """Build the CI source and the vertex names for a learning command."""
    if args.oracle:
        if args.graph is None or args.data is not None:
            raise UsageError("--oracle needs --graph and excludes --data")
        g = read_graph(args.graph)
        return GraphOracle(g), [str(v) for v in range(g.p)]
    if args.data is None or args.graph is not None:
        raise UsageError("give exactly one source: --data <csv> or --graph <file> --oracle")
    data = read_dataset(args.data)
    return FisherZ.from_dataset(data, ridge=RIDGE if args.ridge else 0.0), list(data.names)


def _resolve(name: str, names: list[str]) -> int:
    if name in names:
        return names.index(name)
    if name.isdigit() and int(name) < len(names):
        return int(name)
    raise UsageError(f"unknown variable {name!r}")


INPUTS = ("data", "graph", "learned", "truth", "grid")
OUTPUTS = ("out", "out_graph", "out_data", "trace", "summary")


def _check_paths(args) -> None:
    for name in INPUTS:
        path = getattr(args, name, None)
        if path is not None and not Path(path).is_file():
            raise UsageError(f"--{name}: no such file: {path}")
    for name in OUTPUTS:
        path = getattr(args, name, None)
        if path is not None and not Path(path).resolve().parent.is_dir():
            raise UsageError(f"--{name.replace('_', '-')}: directory does not exist: {path}")


def cmd_generate(args, argv):
    g = random_cg(GenConfig(args.p, args.N, args.seed))
    header = _header(argv, args.seed)
    write_graph(g, args.out_graph, header)
    if args.out_data:
        data = sample_gaussian(g, SampleConfig(args.n, args.seed))
        write_dataset(data, args.out_data, header)
    log.info("generated p=%d with %d edges", g.p, g.n_edges())


def cmd_learn_mb(args, argv):
    src, names = _source(args)
    t = _resolve(args.target, names)
    res = learn_mb(src, t, args.algo, args.alpha)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        for line in _header(argv):
            out.write(f"# {line}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["role", "vertex", "sepset"])
        for v in sorted(res.blanket):
            writer.writerow(["member", names[v], ""])
        for v, s in sorted(res.sepsets.items()):
            writer.writerow(["separated", names[v], ";".join(names[u] for u in sorted(s))])
        writer.writerow(["test_count", "", res.test_count])
    finally:
        if args.out:
            out.close()


def cmd_learn_cg(args, argv):
    src, _ = _source(args)
    trace = LearnTrace()
    pattern = mblwf(src, args.algo, args.alpha, workers=args.workers, trace=trace)
    write_graph(pattern, args.out, _header(argv))
    if args.trace:
        Path(args.trace).write_text(trace.to_json())
    log.info("learned %d edges with %d tests", pattern.n_edges(), trace.total_tests)


def cmd_evaluate(args, argv):
    learned = read_graph(args.learned, pattern=True)
    truth = read_graph(args.truth)
    if learned.p != truth.p:
        raise CGLearnError(f"learned graph has p={learned.p}, truth has p={truth.p}")
    rep = evaluate(learned, truth)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        for line in _header(argv):
            out.write(f"# {line}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["tpr", "fpr", "tdr", "acc", "shd"])
        writer.writerow(["" if x is None else format(x, ".10g") for x in (rep.tpr, rep.fpr, rep.tdr, rep.acc)] + [rep.shd])
    finally:
        if args.out:
            out.close()


def cmd_benchmark(args, argv):
    grid = parse_grid(Path(args.grid).read_text())
    header = _header(argv, grid.seed_base)
    with open(args.out, "w", newline="") as fh:
        rows = run_grid(grid, fh, workers=args.workers, header=header)
    if args.summary:
        with open(args.summary, "w", newline="") as fh:
            write_summary(rows, fh, header)
    failed = sum(1 for r in rows if r.get("error"))
    log.info("%d rows, %d failed", len(rows), failed)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cglearn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cglearn {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="random chain graph and Gaussian sample")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--N", type=float, required=True, help="expected vertex degree")
    p.add_argument("--n", type=int, default=1000, help="sample size")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-graph", required=True)
    p.add_argument("--out-data")
    p.set_defaults(func=cmd_generate)

    def source_args(q):
        q.add_argument("--algo", choices=[a.value for a in MbAlgorithm], default="mbc-csp")
        q.add_argument("--alpha", type=float, default=0.05)
        q.add_argument("--data", help="CSV file, header row then one sample per row")
        q.add_argument("--graph", help="chain graph file (with --oracle)")
        q.add_argument("--oracle", action="store_true", help="answer tests by c-separation in --graph")
        q.add_argument("--ridge", action="store_true", help=f"add {RIDGE:g} to correlation submatrices")

    p = sub.add_parser("learn-mb", help="Markov blanket of one variable")
    source_args(p)
    p.add_argument("--target", required=True, help="column name or vertex index")
    p.add_argument("--out")
    p.set_defaults(func=cmd_learn_mb)

    p = sub.add_parser("learn-cg", help="pattern of the chain graph")
    source_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_learn_cg)

    p = sub.add_parser("evaluate", help="compare a learned pattern with a true chain graph")
    p.add_argument("--learned", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="run a replicate grid")
    p.add_argument("--grid", required=True, help="key=value config file")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="also write per-cell means here")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        _check_paths(args)
        args.func(args, argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cglearn: error: {exc}", file=sys.stderr)
        return 1
    except (CGLearnError, OSError, ValueError) as exc:
        print(f"cglearn: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
