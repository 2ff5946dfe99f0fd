"""Chain-graph pattern recovery from Markov blankets.

:func:`mblwf` runs three phases over a CI source:

1. learn every Markov blanket, keep only mutual memberships;
2. prune the blanket graph to the skeleton with PC-style searches whose
   conditioning sets come from one endpoint's current neighbours;
3. orient ``u -> w`` whenever ``u`` and a nonadjacent ``v`` become dependent
   once ``w`` joins their separating set, then keep only arrows that pair up
   into complexes and undirect everything else.
"""
from __future__ import annotations

import json
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations

from .blanket import MbAlgorithm, learn_mb
from .ci import CISource
from .errors import InvalidQueryError
from .graph import ChainGraph, PartiallyDirectedGraph, UndirectedGraph, _pair, anc_closure


class SepsetTable:
    """Symmetric map ``{u, v} -> separating set``."""

    def __init__(self):
        self._table: dict[tuple[int, int], frozenset] = {}

    def __setitem__(self, key, sepset):
        u, v = key
        sepset = frozenset(sepset)
        if u == v or u in sepset or v in sepset:
            raise ValueError(f"invalid sepset {sorted(sepset)} for ({u}, {v})")
        self._table[_pair(u, v)] = sepset

    def __getitem__(self, key) -> frozenset:
        return self._table[_pair(*key)]

    def __contains__(self, key) -> bool:
        return _pair(*key) in self._table

    def __len__(self):
        return len(self._table)

    def items(self):
        return sorted(self._table.items())


@dataclass
class LearnTrace:
    tests: dict = field(default_factory=lambda: {"blankets": 0, "skeleton": 0, "complexes": 0})
    blankets: dict = field(default_factory=dict)
    symmetric_blankets: dict = field(default_factory=dict)
    removed: list = field(default_factory=list)  # (u, v, sepset)
    skeleton: list = field(default_factory=list)  # edges of H after pruning
    oriented: list = field(default_factory=list)  # (u, w, v, sepset of u and v)
    conflicts: list = field(default_factory=list)  # edges demanded in both directions
    labels: list = field(default_factory=list)

    @property
    def total_tests(self) -> int:
        return sum(self.tests.values())

    def hstar(self, p: int) -> PartiallyDirectedGraph:
        """``H*`` as it stood right before complex labelling (needs a conflict-free run)."""
        arrows = {(u, w) for u, w, _, _ in self.oriented}
        if self.conflicts:
            raise ValueError("orientation conflicts: H* is not a partially directed graph")
        undirected = {e for e in self.skeleton if (e[0], e[1]) not in arrows and (e[1], e[0]) not in arrows}
        return PartiallyDirectedGraph(p, arrows, undirected)

    def to_json(self) -> str:
        def plain(x):
            if isinstance(x, (set, frozenset)):
                return sorted(x)
            if isinstance(x, (list, tuple)):
                return [plain(i) for i in x]
            if isinstance(x, dict):
                return {str(k): plain(v) for k, v in x.items()}
            return x

        return json.dumps(plain(asdict(self)), indent=1, sort_keys=True)


class _Tally:
    def __init__(self, src):
        self.src = src
        self.count = 0

    def pvalue(self, x, y, s=()):
        self.count += 1
        return self.src.pvalue(x, y, s)


def mblwf(
    src: CISource,
    mb_algo: MbAlgorithm | str = MbAlgorithm.MBC_CSP,
    alpha: float = 0.05,
    *,
    workers: int = 1,
    trace: LearnTrace | None = None,
) -> PartiallyDirectedGraph:
    """Learn the pattern of a chain graph from the independences reported by ``src``."""
    trace = trace if trace is not None else LearnTrace()
    p = src.p
    vertices = range(p)

    # Phase 1: blankets, AND-rule symmetry, blanket-based sepsets
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda t: learn_mb(src, t, mb_algo, alpha), vertices))
    else:
        results = [learn_mb(src, t, mb_algo, alpha) for t in vertices]
    mb = [set(r.blanket) for r in results]
    trace.tests["blankets"] = sum(r.test_count for r in results)
    trace.blankets = {t: sorted(mb[t]) for t in vertices}
    h = [{j for j in mb[i] if i in mb[j]} for i in vertices]
    trace.symmetric_blankets = {t: sorted(h[t]) for t in vertices}
    sepsets = SepsetTable()
    for i, j in combinations(vertices, 2):
        if j not in h[i]:
            sepsets[i, j] = h[i] if len(h[i]) <= len(h[j]) else h[j]

    # Phase 2: skeleton; one ordered pass per level reaches the same fixed
    # point as rescanning, because adjacency sets only shrink
    tally = _Tally(src)
    for level in range(max(p - 1, 0)):
        qualified = False
        for u in vertices:
            for v in sorted(h[u]):
                if v not in h[u]:
                    continue
                cand = sorted(h[u] - {v})
                if len(cand) < level:
                    continue
                qualified = True
                for s in combinations(cand, level):
                    if tally.pvalue(u, v, s) > alpha:
                        sepsets[u, v] = s
                        h[u].discard(v)
                        h[v].discard(u)
                        trace.removed.append((u, v, sorted(s)))
                        break
        if not qualified:
            break
    trace.tests["skeleton"] = tally.count
    trace.skeleton = sorted({_pair(u, v) for u in vertices for v in h[u]})

    # Phase 3: candidate arrows
    tally = _Tally(src)
    arrows: set[tuple[int, int]] = set()
    for u in vertices:
        for v in vertices:
            if u == v or v in h[u]:
                continue
            s_uv = sepsets[u, v]
            for w in sorted(h[u]):
                if tally.pvalue(u, v, s_uv | {w}) <= alpha:
                    if (u, w) not in arrows:
                        arrows.add((u, w))
                        trace.oriented.append((u, w, v, sorted(s_uv)))
    trace.tests["complexes"] = tally.count
    conflicts = sorted({_pair(u, w) for u, w in arrows if (w, u) in arrows})
    trace.conflicts = conflicts

    labels = _label_complex_arrows(p, h, arrows)
    trace.labels = sorted(labels)

    directed, undirected = set(), set()
    for a, b in trace.skeleton:
        fwd, back = (a, b) in labels, (b, a) in labels
        if fwd and not back:
            directed.add((a, b))
        elif back and not fwd:
            directed.add((b, a))
        else:
            undirected.add((a, b))
    return PartiallyDirectedGraph(p, directed, undirected, directed)


def _label_complex_arrows(p: int, h: list, arrows: set) -> set:
    """Arrows ``u1 -> w1`` that pair with some ``u2 -> w2`` into an induced complex.

    The pair qualifies when ``u1`` and ``u2`` are nonadjacent and an
    undirected path ``w1 - ... - w2`` exists whose vertices, apart from the
    head of each arrow, avoid the neighbourhoods of both tails. A collider
    ``u1 -> w <- u2`` is the empty path. The criterion does not look at
    existing labels, so a single pass is already a fixed point.
    """
    undirected = [set() for _ in range(p)]
    for u in range(p):
        for v in h[u]:
            if (u, v) not in arrows and (v, u) not in arrows:
                undirected[u].add(v)
    heads = {}
    for u, w in arrows:
        heads.setdefault(u, set()).add(w)

    labels = set()
    for u1, w1 in sorted(arrows):
        for u2 in sorted(heads):
            if u2 == u1 or u2 in h[u1]:
                continue
            z = _partner_head(u1, w1, u2, h, undirected, heads[u2])
            if z is not None:
                labels.add((u1, w1))
                labels.add((u2, z))
                break
    return labels


def _partner_head(u1, w1, u2, h, undirected, heads2):
    if w1 in heads2:
        return w1
    if u2 in h[w1]:
        return None
    seen = {w1}
    queue = deque([w1])
    while queue:
        x = queue.popleft()
        for y in sorted(undirected[x]):
            if y in seen:
                continue
            seen.add(y)
            if y in (u1, u2) or u1 in h[y]:
                continue
            if y in heads2:
                return y
            if u2 not in h[y]:
                queue.append(y)
    return None


def min_separator(g: ChainGraph, a: int, b: int) -> frozenset:
    """A minimal c-separator of nonadjacent ``a`` and ``b``.

    Works in the moral graph of the smallest ancestral set containing both:
    the separator is the part of ``a``'s moral neighbourhood that ``b`` can
    reach without crossing that neighbourhood.
    """
    if a == b or g.is_adjacent(a, b):
        raise InvalidQueryError(f"{a} and {b} must be distinct and nonadjacent")
    within = anc_closure(g, {a, b})
    nbrs = {}
    for v in within:
        out = {u for u in g.adjacent(v) if u in within}
        for c in g.children(v):
            if c in within:
                out |= g.component_parents[g.component_index[c]]
        out.discard(v)
        nbrs[v] = out

    def bfs_marking(start, stoppers):
        marked, seen = set(), {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in sorted(nbrs[x]):
                if y in seen:
                    continue
                seen.add(y)
                if y in stoppers:
                    marked.add(y)
                else:
                    queue.append(y)
        return marked

    z1 = nbrs[a]
    z2 = bfs_marking(a, z1)
    return frozenset(bfs_marking(b, z2))


def skeleton_of(g: PartiallyDirectedGraph) -> UndirectedGraph:
    return g.skeleton()


def orientations_of(g: PartiallyDirectedGraph) -> list[tuple[int, int, bool]]:
    """Directed edges as ``(tail, head, labelled)``, sorted."""
    return sorted((u, v, (u, v) in g.labels) for u, v in g.directed)
