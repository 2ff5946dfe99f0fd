"""A deliberately slow c-separation check used to cross-validate :func:`cglearn.graph.c_separated`.

Nothing here is shared with the main implementation: the ancestral set is a
sweep-until-stable fixed point over the raw edge lists, complex-spouses are
found by enumerating induced paths inside the ancestral subgraph, and the
final separation test is a recursive depth-first search. Only suitable for
small graphs.
"""
from __future__ import annotations

from itertools import combinations

from .errors import InvalidQueryError


def _ancestral_set(directed, undirected, start):
    current = set(start)
    changed = True
    while changed:
        changed = False
        for u, v in directed:
            if v in current and u not in current:
                current.add(u)
                changed = True
        for u, v in undirected:
            if u in current and v not in current:
                current.add(v)
                changed = True
            elif v in current and u not in current:
                current.add(u)
                changed = True
    return current


def _is_complex_pair(a, b, nodes, arrows, lines):
    """Search for an induced ``a -> v1 - ... - vr <- b`` using only ``nodes``."""

    def linked(x, y):
        return (x, y) in arrows or (y, x) in arrows or frozenset((x, y)) in lines

    if linked(a, b):
        return False

    def walk(path):
        last = path[-1]
        if (b, last) in arrows:
            return True
        for y in nodes:
            if y in path or y in (a, b) or frozenset((last, y)) not in lines:
                continue
            if linked(a, y) or (linked(b, y) and (b, y) not in arrows):
                continue
            if any(linked(x, y) for x in path[:-1]):
                continue
            if walk(path + [y]):
                return True
        return False

    for x in nodes:
        if (a, x) in arrows and x not in (a, b):
            if linked(b, x) and (b, x) not in arrows:
                continue
            if walk([x]):
                return True
    return False


def c_separated_naive(g, a, b, s=()) -> bool:
    a = {a} if isinstance(a, int) else set(a)
    b = {b} if isinstance(b, int) else set(b)
    s = {s} if isinstance(s, int) else set(s)
    if not a or not b:
        raise InvalidQueryError("A and B must be nonempty")
    if a & b or a & s or b & s:
        raise InvalidQueryError("A, B and S must be pairwise disjoint")
    for v in a | b | s:
        if not 0 <= v < g.p:
            raise InvalidQueryError(f"vertex {v} outside [0, {g.p})")

    nodes = sorted(_ancestral_set(g.directed, g.undirected, a | b | s))
    keep = set(nodes)
    arrows = {(u, v) for u, v in g.directed if u in keep and v in keep}
    lines = {frozenset(e) for e in g.undirected if set(e) <= keep}

    moral = {v: set() for v in nodes}
    for u, v in arrows:
        moral[u].add(v)
        moral[v].add(u)
    for e in lines:
        u, v = tuple(e)
        moral[u].add(v)
        moral[v].add(u)
    for u, v in combinations(nodes, 2):
        if v not in moral[u] and _is_complex_pair(u, v, nodes, arrows, lines):
            moral[u].add(v)
            moral[v].add(u)

    visited = set()

    def reaches(x):
        if x in b:
            return True
        visited.add(x)
        return any(y not in visited and y not in s and reaches(y) for y in moral[x])

    return not any(reaches(x) for x in sorted(a) if x not in visited)
