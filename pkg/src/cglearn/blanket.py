"""Markov-blanket discovery over a :class:`~cglearn.ci.CISource`.

Six algorithms share one result type: Grow-Shrink, IAMB, interleaved IAMB,
Fast-IAMB, IAMB with Benjamini-Yekutieli control, and MBC-CSP, which grows
the adjacency set first and then adds complex-spouses.

Every algorithm is deterministic: candidates are visited in vertex order and
ties in association are broken towards the smaller vertex.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.stats import false_discovery_control

from .ci import CISource
from .errors import InvalidQueryError


class MbAlgorithm(str, enum.Enum):
    GS = "gs"
    IAMB = "iamb"
    INTER_IAMB = "inter-iamb"
    FAST_IAMB = "fast-iamb"
    FDR_IAMB = "fdr-iamb"
    MBC_CSP = "mbc-csp"


@dataclass
class MbResult:
    target: int
    blanket: frozenset
    sepsets: dict = field(default_factory=dict)
    test_count: int = 0
    # MBC-CSP only: complex-spouse -> (sepset, adjacent vertex that made it dependent)
    witnesses: dict = field(default_factory=dict)


class _Tally:
    """Per-call view of a source that counts the tests issued through it."""

    def __init__(self, src: CISource):
        self.src = src
        self.count = 0

    def pvalue(self, x, y, s=()):
        self.count += 1
        return self.src.pvalue(x, y, s)


def _finish(t, cmb, sepsets, tally, witnesses=None) -> MbResult:
    blanket = frozenset(cmb)
    sepsets = {v: frozenset(s) for v, s in sepsets.items() if v not in blanket}
    return MbResult(t, blanket, sepsets, tally.count, witnesses or {})


def _shrink(tally, t, cmb: list, alpha, sepsets) -> bool:
    """Drop members independent of ``t`` given the rest until none is; True if any went."""
    removed = False
    changed = True
    while changed:
        changed = False
        for x in sorted(cmb):
            rest = [v for v in cmb if v != x]
            if tally.pvalue(t, x, rest) > alpha:
                cmb.remove(x)
                sepsets[x] = frozenset(rest)
                changed = removed = True
    return removed


def _best(pvals: dict):
    """Most associated candidate: smallest p-value, then smallest vertex."""
    return min(pvals, key=lambda v: (pvals[v], v))


def gs_mb(src: CISource, t: int, alpha: float = 0.05) -> MbResult:
    tally = _Tally(src)
    cmb: list[int] = []
    sepsets: dict = {}
    changed = True
    while changed:
        changed = False
        for x in range(src.p):
            if x == t or x in cmb:
                continue
            if tally.pvalue(t, x, cmb) <= alpha:
                cmb.append(x)
                changed = True
            else:
                sepsets[x] = frozenset(cmb)
    _shrink(tally, t, cmb, alpha, sepsets)
    return _finish(t, cmb, sepsets, tally)


def _iamb_grow_step(tally, t, cmb, alpha, sepsets, adjust=None):
    """One forward step of IAMB; returns the admitted vertex or None."""
    pool = [x for x in range(tally.src.p) if x != t and x not in cmb]
    if not pool:
        return None
    pvals = {x: tally.pvalue(t, x, cmb) for x in pool}
    if adjust is not None:
        ranked = dict(zip(pool, adjust(np.array([pvals[x] for x in pool]))))
        best = min(pool, key=lambda v: (ranked[v], pvals[v], v))
        admit = ranked[best] <= alpha
    else:
        best = _best(pvals)
        admit = pvals[best] <= alpha
    for x in pool:
        if pvals[x] > alpha:
            sepsets[x] = frozenset(cmb)
    if not admit:
        return None
    cmb.append(best)
    return best


def iamb(src: CISource, t: int, alpha: float = 0.05) -> MbResult:
    tally = _Tally(src)
    cmb: list[int] = []
    sepsets: dict = {}
    while _iamb_grow_step(tally, t, cmb, alpha, sepsets) is not None:
        pass
    _shrink(tally, t, cmb, alpha, sepsets)
    return _finish(t, cmb, sepsets, tally)


def inter_iamb(src: CISource, t: int, alpha: float = 0.05) -> MbResult:
    tally = _Tally(src)
    cmb: list[int] = []
    sepsets: dict = {}
    seen = {frozenset()}
    while _iamb_grow_step(tally, t, cmb, alpha, sepsets) is not None:
        _shrink(tally, t, cmb, alpha, sepsets)
        state = frozenset(cmb)
        if state in seen:  # finite-sample oscillation
            break
        seen.add(state)
    _shrink(tally, t, cmb, alpha, sepsets)
    return _finish(t, cmb, sepsets, tally)


def _by_adjust(pvals: np.ndarray) -> np.ndarray:
    return false_discovery_control(pvals, method="by")


def fdr_iamb(src: CISource, t: int, alpha: float = 0.05) -> MbResult:
    tally = _Tally(src)
    cmb: list[int] = []
    sepsets: dict = {}
    while _iamb_grow_step(tally, t, cmb, alpha, sepsets, adjust=_by_adjust) is not None:
        pass
    _shrink(tally, t, cmb, alpha, sepsets)
    return _finish(t, cmb, sepsets, tally)


def fast_iamb(src: CISource, t: int, alpha: float = 0.05) -> MbResult:
    """Fast-IAMB: admit several dependent candidates per round, strongest first.

    With data, a round stops admitting once the conditioning set would leave
    fewer than ``n/2`` degrees of freedom (``n - |S| - 3 >= n/2``). The oracle
    has no sample size, so every dependent candidate is admitted at once.
    """
    tally = _Tally(src)
    cmb: list[int] = []
    sepsets: dict = {}
    n = getattr(src, "n", None)
    seen = {frozenset()}
    while True:
        pool = [x for x in range(src.p) if x != t and x not in cmb]
        pvals = {x: tally.pvalue(t, x, cmb) for x in pool}
        for x in pool:
            if pvals[x] > alpha:
                sepsets[x] = frozenset(cmb)
        dependent = sorted((x for x in pool if pvals[x] <= alpha), key=lambda v: (pvals[v], v))
        if n is not None:
            room = n // 2 - 3 - len(cmb)
            dependent = dependent[: max(room, 0)]
        if not dependent:
            break
        cmb.extend(dependent)
        _shrink(tally, t, cmb, alpha, sepsets)
        state = frozenset(cmb)
        if state in seen:
            break
        seen.add(state)
    return _finish(t, cmb, sepsets, tally)


def mbc_csp(src: CISource, t: int, alpha: float = 0.05) -> MbResult:
    """MBC-CSP: adjacency search, complex-spouse search, then IAMB-style shrink."""
    tally = _Tally(src)
    sepsets: dict = {}
    others = [v for v in range(src.p) if v != t]

    # marginal screen
    marginal = {}
    adj = []
    for v in others:
        marginal[v] = tally.pvalue(t, v)
        if marginal[v] > alpha:
            sepsets[v] = frozenset()
        else:
            adj.append(v)
    # weakest association first; ties by vertex
    adj.sort(key=lambda v: (src.marginal_strength(t, v, marginal[v]), v))

    k = 1
    while k <= len(adj):
        for vj in list(adj):
            if vj not in adj:
                continue
            rest = [v for v in adj if v != vj]
            for s in combinations(rest, k):
                if tally.pvalue(t, vj, s) > alpha:
                    adj.remove(vj)
                    sepsets[vj] = frozenset(s)
                    break
        k += 1

    # complex-spouses
    spouses: list[int] = []
    witnesses = {}
    outside = [v for v in others if v not in adj]
    for vi in adj:
        for vj in outside:
            sep = sepsets[vj]
            pval1 = tally.pvalue(t, vj, sep)
            pval2 = tally.pvalue(t, vj, sep | {vi})
            if pval1 > alpha and pval2 < alpha:
                if vj not in spouses:
                    spouses.append(vj)
                    witnesses[vj] = (sep, vi)

    # shrink: drop the lowest-index member among the most independent ones
    cmb = set(adj) | set(spouses)
    while cmb:
        pvals = {y: tally.pvalue(t, y, sorted(cmb - {y})) for y in sorted(cmb)}
        pmax = max(pvals.values())
        if pmax <= alpha:
            break
        drop = min(y for y, pv in pvals.items() if pv == pmax)
        cmb.remove(drop)
        sepsets[drop] = frozenset(cmb)
    witnesses = {v: w for v, w in witnesses.items() if v in cmb}
    return _finish(t, cmb, sepsets, tally, witnesses)


MB_ALGORITHMS = {
    MbAlgorithm.GS: gs_mb,
    MbAlgorithm.IAMB: iamb,
    MbAlgorithm.INTER_IAMB: inter_iamb,
    MbAlgorithm.FAST_IAMB: fast_iamb,
    MbAlgorithm.FDR_IAMB: fdr_iamb,
    MbAlgorithm.MBC_CSP: mbc_csp,
}


def learn_mb(src: CISource, t: int, algo: MbAlgorithm | str = MbAlgorithm.MBC_CSP, alpha: float = 0.05) -> MbResult:
    if not 0 <= t < src.p:
        raise InvalidQueryError(f"target {t} outside [0, {src.p})")
    return MB_ALGORITHMS[MbAlgorithm(algo)](src, t, alpha)
