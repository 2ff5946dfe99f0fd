"""Acceptance criteria 1-11; each test reports one PASS/FAIL line in the terminal summary."""
from __future__ import annotations

import csv
import io
import time
from itertools import combinations

import numpy as np
import pytest
from scipy.stats import binomtest

from cglearn.blanket import MbAlgorithm, learn_mb
from cglearn.ci import FisherZ, GraphOracle
from cglearn.evaluate import GridSpec, rows_to_csv, run_grid, shd
from cglearn.graph import c_separated, pattern_of, true_markov_blanket
from cglearn.learner import LearnTrace, mblwf
from cglearn.naive import c_separated_naive
from cglearn.simulate import GenConfig, SampleConfig, random_cg, sample_gaussian

from conftest import ACCEPTANCE_LINES, EX16_NAMES, ex16_graph, ex16_index, ex4_graph, suite_graphs

pytestmark = pytest.mark.slow

# frozen once from oracle runs at p = 20..50 (largest observed ratio 1.32)
ENVELOPE_C = 2.0
SIGN_LEVEL = 0.05

_graphs: list | None = None
_outputs: dict[int, str] = {}


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def graphs():
    global _graphs
    if _graphs is None:
        _graphs = suite_graphs(200)
    return _graphs


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def blanket_csv() -> str:
    rows = []
    for i, g in enumerate(graphs()):
        for algo in MbAlgorithm:
            src = GraphOracle(g)
            for t in range(g.p):
                res = learn_mb(src, t, algo)
                rows.append([i, g.p, t, algo.value, " ".join(map(str, sorted(res.blanket))), res.test_count,
                             int(res.blanket == true_markov_blanket(g, t))])
    return _csv(["graph", "p", "target", "algo", "blanket", "tests", "match"], rows)


def pattern_csv() -> str:
    rows = []
    for i, g in enumerate(graphs()):
        truth = pattern_of(g)
        for algo in MbAlgorithm:
            trace = LearnTrace()
            learned = mblwf(GraphOracle(g), algo, trace=trace)
            rows.append([i, g.p, algo.value, shd(learned, truth), trace.total_tests])
    return _csv(["graph", "p", "algo", "shd", "tests"], rows)


DESK_GRID = GridSpec(ps=(30,), Ns=(2.0,), ns=(200, 2000), alphas=(0.05,), reps=30,
                     algos=(MbAlgorithm.MBC_CSP,), seed_base=2024, timing=False)


def desk_csv() -> str:
    return rows_to_csv(run_grid(DESK_GRID, workers=4))


# ---------------------------------------------------------------- 1


def test_criterion_01_blanket_separates_minimally():
    start = time.perf_counter()
    failures = []
    for i, g in enumerate(graphs()):
        everything = set(range(g.p))
        for t in range(g.p):
            mb = true_markov_blanket(g, t)
            rest = everything - mb - {t}
            if rest and not c_separated(g, {t}, rest, mb):
                failures.append((i, t, "not separating"))
            if g.p > 10:
                continue
            for r in range(len(mb)):
                for s in combinations(sorted(mb), r):
                    outside = everything - set(s) - {t}
                    if c_separated(g, {t}, outside, s):
                        failures.append((i, t, s))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 120
    report(1, ok, f"{len(failures)} violations on 200 graphs, {elapsed:.1f}s (limit 120s)")
    assert ok, failures[:5]


# ---------------------------------------------------------------- 2


def test_criterion_02_oracle_blankets():
    start = time.perf_counter()
    text = blanket_csv()
    elapsed = time.perf_counter() - start
    _outputs[2] = text
    rows = list(csv.DictReader(io.StringIO(text)))
    mismatches = sum(r["match"] == "0" for r in rows)
    ok = mismatches == 0 and elapsed < 300
    report(2, ok, f"{mismatches} mismatches in {len(rows)} blanket runs (6 algorithms), {elapsed:.1f}s (limit 300s)")
    assert ok


# ---------------------------------------------------------------- 3


def test_criterion_03_oracle_patterns():
    start = time.perf_counter()
    text = pattern_csv()
    elapsed = time.perf_counter() - start
    _outputs[3] = text
    rows = list(csv.DictReader(io.StringIO(text)))
    bad = sum(r["shd"] != "0" for r in rows)
    ok = bad == 0 and elapsed < 600
    report(3, ok, f"{bad} of {len(rows)} learned patterns with shd > 0, {elapsed:.1f}s (limit 600s)")
    assert ok


# ---------------------------------------------------------------- 4


def test_criterion_04_ex16_golden():
    start = time.perf_counter()
    g = ex16_graph()
    t = EX16_NAMES.index("T")
    res = learn_mb(GraphOracle(g), t, "mbc-csp")
    mb = ex16_index("CFGHKL")
    q1 = c_separated(g, {t}, set(range(16)) - mb - {t}, mb)
    q2 = c_separated(g, {t}, ex16_index("L"), ex16_index("CFGK"))
    elapsed = time.perf_counter() - start
    got = "".join(sorted(EX16_NAMES[v] for v in res.blanket))
    ok = res.blanket == mb and q1 and not q2 and elapsed < 1
    report(4, ok, f"Mb(T)={{{','.join(got)}}}, separated by Mb: {q1}, T-L given adjacents: {q2}, {elapsed:.3f}s")
    assert ok


# ---------------------------------------------------------------- 5


def test_criterion_05_ex4_golden():
    start = time.perf_counter()
    g = ex4_graph()
    trace = LearnTrace()
    pat = mblwf(GraphOracle(g), "gs", trace=trace)
    hstar = trace.hstar(4)
    elapsed = time.perf_counter() - start
    ok = (
        hstar.directed == {(0, 3), (1, 2), (1, 3)}
        and hstar.undirected == {(2, 3)}
        and pat.directed == {(0, 3), (1, 3)}
        and pat.labels == pat.directed
        and pat.undirected == {(1, 2), (2, 3)}
        and elapsed < 1
    )
    report(5, ok, f"intermediate {sorted(hstar.directed)}+{sorted(hstar.undirected)}, "
                  f"final {sorted(pat.directed)}+{sorted(pat.undirected)}, {elapsed:.3f}s")
    assert ok


# ---------------------------------------------------------------- 6


def test_criterion_06_cross_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(606)
    cache = {}
    disagreements = 0
    for q in range(10_000):
        gi = int(rng.integers(0, 300))
        if gi not in cache:
            p = 3 + gi % 8
            cache[gi] = random_cg(GenConfig(p, min(1 + gi % 3, p - 1), 6000 + gi))
        g = cache[gi]
        perm = rng.permutation(g.p).tolist()
        na = int(rng.integers(1, 3)) if g.p > 3 else 1
        a, rest = perm[:na], perm[na:]
        nb = int(rng.integers(1, min(2, len(rest) - 1) + 1)) if len(rest) > 1 else 1
        b, rest = rest[:nb], rest[nb:]
        s = rest[: int(rng.integers(0, min(3, len(rest)) + 1))]
        if c_separated(g, a, b, s) != c_separated_naive(g, a, b, s):
            disagreements += 1
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and elapsed < 120
    report(6, ok, f"{disagreements} disagreements in 10000 queries, {elapsed:.1f}s (limit 120s)")
    assert ok


# ---------------------------------------------------------------- 7


def test_criterion_07_mean_degree():
    start = time.perf_counter()
    degrees = np.array([2 * random_cg(GenConfig(50, 3, s)).n_edges() / 50 for s in range(10_000)])
    elapsed = time.perf_counter() - start
    mean, se = degrees.mean(), degrees.std(ddof=1) / np.sqrt(degrees.size)
    ok = abs(mean - 3.0) <= 3 * se and elapsed < 60
    report(7, ok, f"mean degree {mean:.4f}, 3 SE = {3 * se:.4f}, {elapsed:.1f}s (limit 60s)")
    assert ok


# ---------------------------------------------------------------- 8


def test_criterion_08_fisher_matches_oracle():
    start = time.perf_counter()
    agree = total = 0
    for i in range(20):
        g = random_cg(GenConfig(6 + i % 5, 2, 800 + i))
        fisher = FisherZ.from_dataset(sample_gaussian(g, SampleConfig(100_000, 800 + i)))
        oracle = GraphOracle(g)
        for x, y in combinations(range(g.p), 2):
            others = [v for v in range(g.p) if v not in (x, y)]
            for r in range(3):
                for s in combinations(others, r):
                    total += 1
                    agree += fisher.test(x, y, s, 0.01).independent == oracle.test(x, y, s).independent
    elapsed = time.perf_counter() - start
    rate = agree / total
    ok = rate >= 0.95 and elapsed < 600
    report(8, ok, f"agreement {rate:.4f} on {total} queries (need >= 0.95), {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------- 9


def test_criterion_09_recall_grows_with_n():
    start = time.perf_counter()
    text = desk_csv()
    elapsed = time.perf_counter() - start
    _outputs[9] = text
    rows = [r for r in csv.DictReader(io.StringIO(text))]
    tpr = {(int(r["rep"]), int(r["n"])): float(r["tpr"]) for r in rows if r["tpr"]}
    diffs = [tpr[rep, 2000] - tpr[rep, 200] for rep in range(30) if (rep, 200) in tpr and (rep, 2000) in tpr]
    wins, losses = sum(d > 0 for d in diffs), sum(d < 0 for d in diffs)
    pval = binomtest(wins, wins + losses, 0.5, alternative="greater").pvalue if wins + losses else 1.0
    m200 = np.mean([tpr[k] for k in tpr if k[1] == 200])
    m2000 = np.mean([tpr[k] for k in tpr if k[1] == 2000])
    ok = m2000 > m200 and pval < SIGN_LEVEL and elapsed < 1800
    report(9, ok, f"mean TPR {m200:.3f} (n=200) vs {m2000:.3f} (n=2000); sign test {wins}+/{losses}-, "
                  f"p={pval:.2e}, {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------- 10


def test_criterion_10_test_count_scaling():
    start = time.perf_counter()
    ps = (20, 30, 40, 50)
    details, ok = [], True
    for algo in ("gs", "mbc-csp"):
        means, worst = [], 0.0
        for p in ps:
            counts = []
            for r in range(10):
                g = random_cg(GenConfig(p, 2, 1000 * p + r))
                trace = LearnTrace()
                mblwf(GraphOracle(g), algo, trace=trace)
                b = max(len(true_markov_blanket(g, t)) for t in range(p))
                bound = p * p + p * b * 2**b + g.n_edges() * p
                worst = max(worst, trace.total_tests / bound)
                counts.append(trace.total_tests)
            means.append(np.mean(counts))
        slope = np.polyfit(np.log(ps), np.log(means), 1)[0]
        ok &= slope <= 2.3 and worst <= ENVELOPE_C
        details.append(f"{algo}: slope {slope:.2f} (<= 2.3), max count/envelope {worst:.2f} (<= {ENVELOPE_C})")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    report(10, ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------- 11


def test_criterion_11_deterministic_outputs():
    first = {k: _outputs.get(k) for k in (2, 3, 9)}
    producers = {2: blanket_csv, 3: pattern_csv, 9: desk_csv}
    for k, make in producers.items():
        if first[k] is None:
            first[k] = make()
    again = {k: make() for k, make in producers.items()}
    same = [k for k in producers if again[k] == first[k]]
    ok = len(same) == 3
    report(11, ok, f"byte-identical reruns for criteria {same} of [2, 3, 9]")
    assert ok
