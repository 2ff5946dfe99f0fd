"""Chain graphs, patterns and the graphical machinery used by the learners.

Vertices are the integers ``0..p-1``. All graph objects are immutable; every
function in this module is pure.

Conventions
-----------
* directed edges are ordered pairs ``(u, v)`` meaning ``u -> v``;
* undirected edges are stored as sorted pairs ``(u, v)`` with ``u < v``;
* vertex sets are ``frozenset[int]``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from itertools import combinations
from pathlib import Path
from typing import Iterable

from .errors import InvalidGraphError, InvalidQueryError

VertexSet = frozenset  # frozenset[int]

__all__ = [
    "ChainGraph",
    "PartiallyDirectedGraph",
    "UndirectedGraph",
    "chain_components",
    "pa",
    "ch",
    "ne",
    "sp",
    "adj",
    "bd",
    "cl",
    "csp",
    "ancestors",
    "anc_closure",
    "moral_graph",
    "c_separated",
    "minimal_complexes",
    "complex_arrows",
    "true_markov_blanket",
    "pattern_of",
    "markov_equivalent",
    "loads_graph",
    "dumps_graph",
    "read_graph",
    "write_graph",
]


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _check_vertex(p: int, v: int) -> None:
    if not 0 <= v < p:
        raise InvalidGraphError(f"vertex {v} outside [0, {p})")


@dataclass(frozen=True)
class UndirectedGraph:
    p: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        edges = set()
        for u, v in self.edges:
            _check_vertex(self.p, u)
            _check_vertex(self.p, v)
            if u == v:
                raise InvalidGraphError(f"self-loop at {u}")
            edges.add(_pair(u, v))
        object.__setattr__(self, "edges", frozenset(edges))

    @cached_property
    def _nbrs(self) -> tuple[frozenset, ...]:
        nbrs = [set() for _ in range(self.p)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def neighbors(self, v: int) -> frozenset:
        return self._nbrs[v]

    def has_edge(self, u: int, v: int) -> bool:
        return _pair(u, v) in self.edges


class _MixedGraph:
    """Adjacency bookkeeping shared by chain graphs and patterns."""

    p: int
    directed: frozenset
    undirected: frozenset

    def _normalize(self) -> None:
        if self.p < 0:
            raise InvalidGraphError("negative vertex count")
        directed = set()
        for u, v in self.directed:
            _check_vertex(self.p, u)
            _check_vertex(self.p, v)
            if u == v:
                raise InvalidGraphError(f"self-loop at {u}")
            directed.add((u, v))
        undirected = set()
        for u, v in self.undirected:
            _check_vertex(self.p, u)
            _check_vertex(self.p, v)
            if u == v:
                raise InvalidGraphError(f"self-loop at {u}")
            undirected.add(_pair(u, v))
        seen = set()
        for u, v in directed:
            key = _pair(u, v)
            if key in seen or key in undirected:
                raise InvalidGraphError(f"more than one edge between {u} and {v}")
            seen.add(key)
        object.__setattr__(self, "directed", frozenset(directed))
        object.__setattr__(self, "undirected", frozenset(undirected))

    @cached_property
    def _tables(self):
        parents = [set() for _ in range(self.p)]
        children = [set() for _ in range(self.p)]
        neighbors = [set() for _ in range(self.p)]
        for u, v in self.directed:
            children[u].add(v)
            parents[v].add(u)
        for u, v in self.undirected:
            neighbors[u].add(v)
            neighbors[v].add(u)
        freeze = lambda rows: tuple(frozenset(r) for r in rows)  # noqa: E731
        adjacent = [parents[v] | children[v] | neighbors[v] for v in range(self.p)]
        return freeze(parents), freeze(children), freeze(neighbors), freeze(adjacent)

    def parents(self, v: int) -> frozenset:
        return self._tables[0][v]

    def children(self, v: int) -> frozenset:
        return self._tables[1][v]

    def neighbors(self, v: int) -> frozenset:
        return self._tables[2][v]

    def adjacent(self, v: int) -> frozenset:
        return self._tables[3][v]

    def is_adjacent(self, u: int, v: int) -> bool:
        return v in self._tables[3][u]

    @property
    def vertices(self) -> range:
        return range(self.p)

    def skeleton(self) -> UndirectedGraph:
        return UndirectedGraph(self.p, frozenset(self.undirected | {_pair(u, v) for u, v in self.directed}))

    def edge_state(self, u: int, v: int) -> str:
        """One of ``'none'``, ``'--'``, ``'->'`` (u to v) or ``'<-'``."""
        if (u, v) in self.directed:
            return "->"
        if (v, u) in self.directed:
            return "<-"
        if _pair(u, v) in self.undirected:
            return "--"
        return "none"

    def n_edges(self) -> int:
        return len(self.directed) + len(self.undirected)


@dataclass(frozen=True)
class ChainGraph(_MixedGraph):
    """An LWF chain graph: directed and undirected edges, no partially directed cycle."""

    p: int
    directed: frozenset = field(default_factory=frozenset)
    undirected: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        self._normalize()
        comp = self.component_index
        graph = {i: set() for i in range(len(self.components))}
        for u, v in self.directed:
            if comp[u] == comp[v]:
                raise InvalidGraphError(f"partially directed cycle through {u} -> {v}")
            graph[comp[v]].add(comp[u])
        try:
            order = tuple(TopologicalSorter(graph).static_order())
        except CycleError as exc:
            raise InvalidGraphError("partially directed cycle between chain components") from exc
        object.__setattr__(self, "_component_order", order)

    @cached_property
    def components(self) -> tuple[frozenset, ...]:
        """Chain components, ordered by their smallest vertex."""
        parent = list(range(self.p))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.undirected:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        groups: dict[int, set] = {}
        for v in range(self.p):
            groups.setdefault(find(v), set()).add(v)
        return tuple(frozenset(g) for _, g in sorted(groups.items()))

    @cached_property
    def component_index(self) -> tuple[int, ...]:
        index = [0] * self.p
        for i, comp in enumerate(self.components):
            for v in comp:
                index[v] = i
        return tuple(index)

    @cached_property
    def component_parents(self) -> tuple[frozenset, ...]:
        """``pa(tau)`` for every chain component ``tau``."""
        out = [set() for _ in self.components]
        for u, v in self.directed:
            out[self.component_index[v]].add(u)
        return tuple(frozenset(s) for s in out)

    def topological_components(self) -> list[frozenset]:
        """Chain components in an order where every parent component comes first."""
        return [self.components[i] for i in self._component_order]


@dataclass(frozen=True)
class PartiallyDirectedGraph(_MixedGraph):
    """A mixed graph without the acyclicity requirement; ``labels`` marks complex arrows."""

    p: int
    directed: frozenset = field(default_factory=frozenset)
    undirected: frozenset = field(default_factory=frozenset)
    labels: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        self._normalize()
        labels = frozenset(tuple(e) for e in self.labels)
        if not labels <= self.directed:
            raise InvalidGraphError("labels must be a subset of the directed edges")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_chain_graph(cls, g: ChainGraph) -> "PartiallyDirectedGraph":
        return cls(g.p, g.directed, g.undirected)


def _as_set(vs) -> frozenset:
    if isinstance(vs, int):
        return frozenset((vs,))
    return frozenset(vs)


# --------------------------------------------------------------------------
# accessors


def chain_components(g: ChainGraph) -> list[frozenset]:
    return list(g.components)


def pa(g: _MixedGraph, v: int) -> frozenset:
    return g.parents(v)


def ch(g: _MixedGraph, v: int) -> frozenset:
    return g.children(v)


def ne(g: _MixedGraph, v: int) -> frozenset:
    return g.neighbors(v)


def adj(g: _MixedGraph, v: int) -> frozenset:
    return g.adjacent(v)


def sp(g: _MixedGraph, v: int) -> frozenset:
    """Vertices sharing a child with ``v``."""
    out = set()
    for c in g.children(v):
        out |= g.parents(c)
    out.discard(v)
    return frozenset(out)


def bd(g: _MixedGraph, a) -> frozenset:
    a = _as_set(a)
    out = set()
    for v in a:
        out |= g.parents(v) | g.neighbors(v)
    return frozenset(out - a)


def cl(g: _MixedGraph, a) -> frozenset:
    a = _as_set(a)
    return bd(g, a) | a


def csp(g: ChainGraph, v: int) -> frozenset:
    """Complex-spouses of ``v``.

    Two nonadjacent vertices are complex-spouses exactly when both are parents
    of one chain component: a closest pair of their children inside that
    component, joined by a shortest undirected path, is an induced complex.
    """
    out = set()
    for c in g.children(v):
        out |= g.component_parents[g.component_index[c]]
    out -= g.adjacent(v)
    out.discard(v)
    return frozenset(out)


def ancestors(g: ChainGraph, a) -> frozenset:
    """``an(A)``: vertices with a partially directed path into ``A`` but none back.

    Inside one chain component no partially directed path exists, so the
    ancestors of ``b`` are the vertices of the strictly upstream components.
    """
    a = _as_set(a)
    comp = g.component_index
    seen = set()
    stack = [comp[v] for v in a]
    upstream = set()
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        for u in g.component_parents[c]:
            cu = comp[u]
            upstream.add(cu)
            stack.append(cu)
    out = set()
    for c in upstream:
        out |= g.components[c]
    return frozenset(out)


def anc_closure(g: _MixedGraph, a) -> frozenset:
    """``An(A)``: the smallest ancestral set containing ``A``."""
    out = set(_as_set(a))
    stack = list(out)
    while stack:
        v = stack.pop()
        for u in g.parents(v) | g.neighbors(v):
            if u not in out:
                out.add(u)
                stack.append(u)
    return frozenset(out)


def moral_graph(g: ChainGraph) -> UndirectedGraph:
    edges = set(g.skeleton().edges)
    for parents in g.component_parents:
        edges.update(_pair(u, v) for u, v in combinations(parents, 2))
    return UndirectedGraph(g.p, frozenset(edges))


def _moral_neighbors(g: ChainGraph, v: int, within: frozenset) -> set:
    """Neighbours of ``v`` in the moral graph of the induced subgraph on ``within``.

    ``within`` must be ancestral, so it holds whole chain components together
    with their parents.
    """
    out = {u for u in g.adjacent(v) if u in within}
    for c in g.children(v):
        if c in within:
            out |= g.component_parents[g.component_index[c]]
    out.discard(v)
    return out


def c_separated(g: ChainGraph, a, b, s=()) -> bool:
    """Whether ``s`` c-separates ``a`` from ``b`` (moralization criterion)."""
    a, b, s = _as_set(a), _as_set(b), _as_set(s)
    if not a or not b:
        raise InvalidQueryError("A and B must be nonempty")
    if a & b or a & s or b & s:
        raise InvalidQueryError("A, B and S must be pairwise disjoint")
    for v in a | b | s:
        if not 0 <= v < g.p:
            raise InvalidQueryError(f"vertex {v} outside [0, {g.p})")
    within = anc_closure(g, a | b | s)
    seen = set(a)
    queue = deque(a)
    while queue:
        v = queue.popleft()
        for u in _moral_neighbors(g, v, within):
            if u in b:
                return False
            if u not in seen and u not in s:
                seen.add(u)
                queue.append(u)
    return True


def minimal_complexes(g: ChainGraph) -> list[tuple[int, tuple[int, ...], int]]:
    """Every induced subgraph ``a -> v1 - ... - vr <- b``, as ``(a, (v1..vr), b)`` with ``a < b``.

    Exhaustive enumeration of chordless undirected paths; exponential in the
    worst case and meant for graphs of modest size.
    """
    found = []
    for a, b in combinations(range(g.p), 2):
        if g.is_adjacent(a, b):
            continue
        blocked_a, blocked_b = g.adjacent(a), g.adjacent(b)
        targets = g.children(b)

        def extend(path):
            last = path[-1]
            for y in sorted(g.neighbors(last)):
                if y in path or y in blocked_a:
                    continue
                if any(g.is_adjacent(y, x) for x in path[:-1]):
                    continue
                if y in targets:
                    found.append((a, tuple(path) + (y,), b))
                elif y not in blocked_b:
                    extend(path + [y])

        for x in sorted(g.children(a)):
            if x in targets:
                found.append((a, (x,), b))
            elif x not in blocked_b:
                extend([x])
    return sorted(found)


def complex_arrows(g: ChainGraph) -> frozenset:
    """Arrows ``u -> w`` that take part in at least one minimal complex."""
    out = set()
    for u, w in g.directed:
        if (u, w) in out:
            continue
        tau = g.component_index[w]
        for v in sorted(g.component_parents[tau]):
            if v == u or g.is_adjacent(u, v):
                continue
            hit = _complex_partner(g, u, w, v)
            if hit is not None:
                out.add((u, w))
                out.add((v, hit))
                break
    return frozenset(out)


def _complex_partner(g: ChainGraph, u: int, w: int, v: int):
    """A child ``z`` of ``v`` closing a complex ``u -> w - ... - z <- v``, else None."""
    if v in g.parents(w):
        return w
    off_limits = g.adjacent(u) | g.adjacent(v)
    seen = {w}
    queue = deque([w])
    while queue:
        x = queue.popleft()
        for y in sorted(g.neighbors(x)):
            if y in seen:
                continue
            seen.add(y)
            if v in g.parents(y) and y not in g.adjacent(u):
                return y
            if y not in off_limits:
                queue.append(y)
    return None


def true_markov_blanket(g: ChainGraph, t: int) -> frozenset:
    return g.parents(t) | g.neighbors(t) | g.children(t) | csp(g, t)


def pattern_of(g: ChainGraph) -> PartiallyDirectedGraph:
    """Skeleton of ``g`` with only the complex arrows kept (and labelled)."""
    arrows = complex_arrows(g)
    undirected = set(g.undirected) | {_pair(u, v) for u, v in g.directed if (u, v) not in arrows}
    return PartiallyDirectedGraph(g.p, arrows, frozenset(undirected), arrows)


def markov_equivalent(g1: ChainGraph, g2: ChainGraph) -> bool:
    if g1.p != g2.p:
        return False
    if g1.skeleton() != g2.skeleton():
        return False
    return set(minimal_complexes(g1)) == set(minimal_complexes(g2))


# --------------------------------------------------------------------------
# text format


def _parse_lines(text: str):
    p = None
    directed, undirected, labels = set(), set(), set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if p is None:
            key, _, value = line.partition("=")
            if key.strip() != "p" or not value.strip().lstrip("-").isdigit():
                raise InvalidGraphError(f"line {lineno}: expected 'p=<int>', got {raw!r}")
            p = int(value)
            continue
        for sym in ("=>", "->", "--"):
            if sym in line:
                lhs, _, rhs = line.partition(sym)
                break
        else:
            raise InvalidGraphError(f"line {lineno}: no edge symbol in {raw!r}")
        try:
            u, v = int(lhs), int(rhs)
        except ValueError:
            raise InvalidGraphError(f"line {lineno}: vertices must be integers: {raw!r}") from None
        if sym == "--":
            undirected.add((u, v))
        else:
            directed.add((u, v))
            if sym == "=>":
                labels.add((u, v))
    if p is None:
        raise InvalidGraphError("missing 'p=<int>' line")
    return p, directed, undirected, labels


def loads_graph(text: str, pattern: bool = False):
    """Parse the graph text format.

    With ``pattern=False`` the result is a :class:`ChainGraph` and labelled
    arrows (``=>``) are rejected; otherwise a :class:`PartiallyDirectedGraph`.
    """
    p, directed, undirected, labels = _parse_lines(text)
    if pattern:
        return PartiallyDirectedGraph(p, directed, undirected, labels)
    if labels:
        raise InvalidGraphError("labelled arrows ('=>') are only allowed in pattern files")
    return ChainGraph(p, directed, undirected)


def dumps_graph(g: _MixedGraph, header: Iterable[str] = ()) -> str:
    labels = getattr(g, "labels", frozenset())
    rows = []
    for u, v in g.undirected:
        rows.append((u, v, 0, f"{u} -- {v}"))
    for u, v in g.directed:
        sym = "=>" if (u, v) in labels else "->"
        rows.append((min(u, v), max(u, v), 1 if u < v else 2, f"{u} {sym} {v}"))
    rows.sort()
    lines = [f"# {h}" for h in header]
    lines.append(f"p={g.p}")
    lines.extend(r[3] for r in rows)
    return "\n".join(lines) + "\n"


def read_graph(path, pattern: bool = False):
    return loads_graph(Path(path).read_text(), pattern=pattern)


def write_graph(g: _MixedGraph, path, header: Iterable[str] = ()) -> None:
    Path(path).write_text(dumps_graph(g, header))
