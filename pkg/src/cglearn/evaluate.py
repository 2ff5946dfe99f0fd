"""Skeleton metrics, structural Hamming distance and the replicate-grid benchmark."""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Iterable, TextIO

import numpy as np

from .blanket import MbAlgorithm
from .ci import FisherZ, GraphOracle
from .errors import ConfigError
from .graph import PartiallyDirectedGraph, UndirectedGraph, pattern_of
from .learner import LearnTrace, mblwf
from .simulate import GenConfig, SampleConfig, random_cg, sample_gaussian

CSV_COLUMNS = ["p", "N", "n", "alpha", "algo", "rep", "seed", "tpr", "fpr", "tdr", "acc", "shd", "tests", "ms", "error"]
METRICS = ("tpr", "fpr", "tdr", "acc")


@dataclass(frozen=True)
class SkeletonMetrics:
    """Rates are ``None`` when their denominator is zero."""

    tpr: float | None
    fpr: float | None
    tdr: float | None
    acc: float | None
    tp: int
    fp: int
    pos: int
    neg: int


def _ratio(num, den):
    return num / den if den > 0 else None


def skeleton_metrics(learned: UndirectedGraph, truth: UndirectedGraph) -> SkeletonMetrics:
    if learned.p != truth.p:
        raise ValueError(f"vertex counts differ: {learned.p} vs {truth.p}")
    pos = len(truth.edges)
    neg = comb(truth.p, 2) - pos
    tp = len(learned.edges & truth.edges)
    fp = len(learned.edges - truth.edges)
    tn = neg - fp
    return SkeletonMetrics(
        tpr=_ratio(tp, pos),
        fpr=_ratio(fp, neg),
        tdr=_ratio(tp, len(learned.edges)),
        acc=_ratio(tp + tn, pos + neg),
        tp=tp,
        fp=fp,
        pos=pos,
        neg=neg,
    )


def shd(learned: PartiallyDirectedGraph, truth: PartiallyDirectedGraph) -> int:
    """Number of vertex pairs whose edge state (absent, ``--``, ``->``, ``<-``) differs."""
    if learned.p != truth.p:
        raise ValueError(f"vertex counts differ: {learned.p} vs {truth.p}")
    pairs = set(learned.skeleton().edges) | set(truth.skeleton().edges)
    return sum(learned.edge_state(u, v) != truth.edge_state(u, v) for u, v in pairs)


@dataclass(frozen=True)
class EvalReport:
    tpr: float | None
    fpr: float | None
    tdr: float | None
    acc: float | None
    shd: int
    test_count: int = 0
    wall_time: float = 0.0


def evaluate(learned: PartiallyDirectedGraph, truth, test_count: int = 0, wall_time: float = 0.0) -> EvalReport:
    """Compare a learned pattern with the pattern of the true chain graph."""
    truth_pattern = truth if isinstance(truth, PartiallyDirectedGraph) else pattern_of(truth)
    m = skeleton_metrics(learned.skeleton(), truth_pattern.skeleton())
    return EvalReport(m.tpr, m.fpr, m.tdr, m.acc, shd(learned, truth_pattern), test_count, wall_time)


@dataclass(frozen=True)
class GridSpec:
    ps: tuple = (30,)
    Ns: tuple = (2.0,)
    ns: tuple = (200, 2000)
    alphas: tuple = (0.05,)
    reps: int = 30
    algos: tuple = (MbAlgorithm.MBC_CSP,)
    seed_base: int = 0
    oracle: bool = False
    # wall-clock times make rows differ between runs; switch off for byte-stable output
    timing: bool = True

    def __post_init__(self):
        for name in ("ps", "Ns", "ns", "alphas", "algos"):
            if not getattr(self, name):
                raise ConfigError(f"grid list {name!r} is empty")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        object.__setattr__(self, "algos", tuple(MbAlgorithm(a) for a in self.algos))
        for p, N in product(self.ps, self.Ns):
            GenConfig(p, N)

    def cells(self):
        """Graph-generating cells ``(index, p, N)``.

        Within a replicate every sample size, alpha and algorithm sees the same
        graph, and every alpha and algorithm sees the same data.
        """
        return [(i, p, N) for i, (p, N) in enumerate(product(self.ps, self.Ns))]


def parse_grid(text: str) -> GridSpec:
    """Parse ``key=value`` lines (comma-separated lists, ``#`` comments)."""
    raw: dict[str, list[str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value")
        raw[key.strip()] = [v.strip() for v in value.split(",") if v.strip()]
    kinds = {
        "p": ("ps", int),
        "N": ("Ns", float),
        "n": ("ns", int),
        "alpha": ("alphas", float),
        "algo": ("algos", str),
    }
    kwargs = {}
    try:
        for key, values in raw.items():
            if key in kinds:
                name, cast = kinds[key]
                kwargs[name] = tuple(cast(v) for v in values)
            elif key == "reps":
                kwargs["reps"] = int(values[0])
            elif key == "seed":
                kwargs["seed_base"] = int(values[0])
            elif key == "oracle":
                kwargs["oracle"] = values[0].lower() in ("1", "true", "yes")
            elif key == "timing":
                kwargs["timing"] = values[0].lower() in ("1", "true", "yes")
            else:
                raise ConfigError(f"unknown grid key {key!r}")
        return GridSpec(**kwargs)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad grid value: {exc}") from None


def replicate_seed(seed_base: int, cell: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed_base, cell, rep]).generate_state(1, dtype=np.uint64)[0] >> 1)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def data_seed(rep_seed: int, n: int) -> int:
    return int(np.random.SeedSequence([rep_seed, n]).generate_state(1, dtype=np.uint64)[0] >> 1)


def _learn_rows(grid, g, truth, base, corr, n):
    rows = []
    for alpha, algo in product(grid.alphas, grid.algos):
        row = dict(base, n=n, alpha=alpha, algo=algo.value)
        src = GraphOracle(g) if grid.oracle else FisherZ(corr, n)
        trace = LearnTrace()
        start = time.perf_counter()
        try:
            learned = mblwf(src, algo, alpha, trace=trace)
        except Exception as exc:  # recorded, the grid goes on
            row["error"] = type(exc).__name__
            rows.append(row)
            continue
        elapsed = (time.perf_counter() - start) * 1000
        report = evaluate(learned, truth, trace.total_tests, elapsed)
        row.update(
            tpr=report.tpr, fpr=report.fpr, tdr=report.tdr, acc=report.acc, shd=report.shd,
            tests=report.test_count, ms=round(elapsed, 3) if grid.timing else None,
        )
        rows.append(row)
    return rows


def _error_rows(grid, base, ns, err):
    return [dict(base, n=n, alpha=a, algo=algo.value, error=err) for n in ns for a, algo in product(grid.alphas, grid.algos)]


def _run_job(job):
    grid, cell, p, N, rep = job
    seed = replicate_seed(grid.seed_base, cell, rep)
    base = {"p": p, "N": N, "rep": rep, "seed": seed}
    ns = ("",) if grid.oracle else grid.ns
    try:
        g = random_cg(GenConfig(p, N, seed))
        truth = pattern_of(g)
    except Exception as exc:
        return _error_rows(grid, base, ns, type(exc).__name__)
    if grid.oracle:
        return _learn_rows(grid, g, truth, base, None, "")
    rows = []
    for n in grid.ns:
        try:
            data = sample_gaussian(g, SampleConfig(n, data_seed(seed, n)))
            corr = FisherZ.from_dataset(data).corr
        except Exception as exc:
            rows.extend(_error_rows(grid, base, (n,), type(exc).__name__))
            continue
        rows.extend(_learn_rows(grid, g, truth, base, corr, n))
    return rows


def run_grid(grid: GridSpec, out: TextIO | None = None, workers: int = 1, header: Iterable[str] = ()) -> list[dict]:
    """Run every cell and replicate; rows are returned and, if ``out`` is given, written as CSV.

    Rows come out in cell/replicate/n/alpha/algorithm order whatever the
    worker count. The graph seed depends only on ``(seed_base, cell, rep)``;
    the data seed adds the sample size (see :func:`data_seed`).
    """
    jobs = [(grid, cell, p, N, rep) for cell, p, N in grid.cells() for rep in range(grid.reps)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_run_job, jobs))
    else:
        chunks = [_run_job(job) for job in jobs]
    rows = [r for chunk in chunks for r in chunk]
    if out is not None:
        write_rows(rows, out, header)
    return rows


def write_rows(rows, out: TextIO, header: Iterable[str] = ()) -> None:
    for line in header:
        out.write(f"# {line}\n")
    writer = csv.DictWriter(out, CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _fmt(row.get(c)) for c in CSV_COLUMNS})


def rows_to_csv(rows, header: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    write_rows(rows, buf, header)
    return buf.getvalue()


@dataclass
class _Acc:
    values: dict = field(default_factory=dict)

    def add(self, key, value):
        if value is not None and value != "":
            self.values.setdefault(key, []).append(float(value))

    def mean(self, key):
        vals = self.values.get(key, [])
        return (sum(vals) / len(vals), len(vals)) if vals else (None, 0)


SUMMARY_COLUMNS = ["p", "N", "n", "alpha", "algo", "reps", "errors"] + [
    c for m in (*METRICS, "shd", "tests", "ms") for c in (m, f"{m}_count")
]


def summarize(rows) -> list[dict]:
    """Per-cell means; undefined metrics are left out of the mean and counted separately."""
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault(tuple(row.get(k) for k in ("p", "N", "n", "alpha", "algo")), []).append(row)
    out = []
    for key, members in groups.items():
        acc = _Acc()
        for row in members:
            for m in (*METRICS, "shd", "tests", "ms"):
                acc.add(m, row.get(m))
        summary = dict(zip(("p", "N", "n", "alpha", "algo"), key))
        summary["reps"] = len(members)
        summary["errors"] = sum(1 for r in members if r.get("error"))
        for m in (*METRICS, "shd", "tests", "ms"):
            summary[m], summary[f"{m}_count"] = acc.mean(m)
        out.append(summary)
    return out


def write_summary(rows, out: TextIO, header: Iterable[str] = ()) -> None:
    for line in header:
        out.write(f"# {line}\n")
    writer = csv.DictWriter(out, SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for s in summarize(rows):
        writer.writerow({c: _fmt(s.get(c)) for c in SUMMARY_COLUMNS})
