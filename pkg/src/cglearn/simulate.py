"""Random chain graphs and Gaussian samples that are Markov to them.

Randomness comes from numpy's PCG64 generator, which is bit-stable across
platforms. Stream layout for :func:`sample_gaussian` with seed ``s``:
``SeedSequence(s).spawn(2)`` gives one stream for edge weights and one
parent stream for noise; the noise stream is split again with one child per
chain component, in topological order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from .ci import Dataset
from .errors import ConfigError
from .graph import ChainGraph


@dataclass(frozen=True)
class GenConfig:
    p: int
    N: float
    seed: int = 0

    def __post_init__(self):
        if self.p < 1:
            raise ConfigError("p must be at least 1")
        if self.p == 1 and self.N > 0:
            raise ConfigError("a single vertex cannot have positive degree")
        if not 0 <= self.N <= max(self.p - 1, 0):
            raise ConfigError(f"N must lie in [0, p-1], got {self.N}")


@dataclass(frozen=True)
class SampleConfig:
    n: int
    seed: int = 0
    coef_low: float = 0.5
    coef_high: float = 1.0
    # off-diagonal precision entry for every undirected edge
    partial: float = 0.3

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if not 0 < self.coef_low <= self.coef_high:
            raise ConfigError("coefficient range must satisfy 0 < low <= high")


def interval_bounds(p: int, k: int) -> list[tuple[int, int]]:
    """Split ``0..p-1`` into ``k`` runs of length ``p // k``; the last absorbs the remainder."""
    width = p // k
    bounds = [(i * width, (i + 1) * width) for i in range(k)]
    bounds[-1] = (bounds[-1][0], p)
    return bounds


def random_cg(cfg: GenConfig) -> ChainGraph:
    """Random chain graph with expected vertex degree ``cfg.N``.

    Each vertex pair is linked with probability ``N / (p - 1)``. The vertex
    order is cut into ``k`` (uniform on ``1..p``) consecutive intervals; links
    inside an interval stay undirected and links across intervals point from
    the earlier interval to the later one.
    """
    rng = np.random.default_rng(cfg.seed)
    p = cfg.p
    if p == 1:
        return ChainGraph(1)
    s = cfg.N / (p - 1)
    coins = rng.random((p, p)) < s
    lower = np.tril(coins, k=-1)
    a = lower | lower.T
    k = int(rng.integers(1, p + 1))
    block = np.empty(p, dtype=int)
    for i, (lo, hi) in enumerate(interval_bounds(p, k)):
        block[lo:hi] = i
    # drop entries pointing from a later interval back to an earlier one
    a &= ~(block[:, None] > block[None, :])
    directed, undirected = [], []
    for i, j in zip(*np.nonzero(np.triu(a | a.T, k=1))):
        i, j = int(i), int(j)
        if a[i, j] and a[j, i]:
            undirected.append((i, j))
        elif a[i, j]:
            directed.append((i, j))
        else:
            directed.append((j, i))
    return ChainGraph(p, directed, undirected)


def sample_gaussian(g: ChainGraph, cfg: SampleConfig) -> Dataset:
    """Draw ``cfg.n`` samples from a Gaussian that factorizes along ``g``.

    For a chain component ``C`` with parents ``P`` the conditional law is
    ``N(K^{-1} B x_P, K^{-1})``: ``K`` is a diagonally dominant precision with
    ``-partial`` on every undirected edge inside ``C``, and ``B`` holds one
    weight per arrow ``P -> C`` drawn uniformly from ``+-[coef_low, coef_high]``.
    Both the zero pattern of ``K`` and that of ``B`` (which is ``-K_{C,P}`` of
    the joint precision) match the graph, so the LWF global Markov property
    holds.
    """
    weight_seq, noise_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    weight_rng = np.random.default_rng(weight_seq)
    components = g.topological_components()
    noise_rngs = [np.random.default_rng(s) for s in noise_seq.spawn(len(components))]

    x = np.zeros((cfg.n, g.p))
    for comp, rng in zip(components, noise_rngs):
        nodes = sorted(comp)
        pos = {v: i for i, v in enumerate(nodes)}
        m = len(nodes)
        prec = np.zeros((m, m))
        for u, v in g.undirected:
            if u in pos and v in pos:
                prec[pos[u], pos[v]] = prec[pos[v], pos[u]] = -cfg.partial
        prec[np.diag_indices(m)] = 1.0 + np.abs(prec).sum(axis=1)

        parents = sorted({u for v in nodes for u in g.parents(v)})
        natural = np.zeros((cfg.n, m))
        if parents:
            b = np.zeros((m, len(parents)))
            for j, u in enumerate(parents):
                for v in sorted(g.children(u) & comp):
                    mag = weight_rng.uniform(cfg.coef_low, cfg.coef_high)
                    sign = 1.0 if weight_rng.random() < 0.5 else -1.0
                    b[pos[v], j] = sign * mag
            natural = x[:, parents] @ b.T

        try:
            chol = cholesky(prec, lower=True)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - prevented by dominance
            raise RuntimeError("component precision is not positive definite") from exc
        mean = cho_solve((chol, True), natural.T).T
        z = rng.standard_normal((cfg.n, m))
        # L^{-T} z has covariance K^{-1}
        noise = solve_triangular(chol, z.T, lower=True, trans="T").T
        x[:, nodes] = mean + noise
    return Dataset(x, tuple(f"X{j}" for j in range(g.p)))
