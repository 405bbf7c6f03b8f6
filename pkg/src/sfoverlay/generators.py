"""Seeded generators for initial connected overlays."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError


@dataclass(frozen=True)
class GenSpec:
    """Generator parameters.

    ``m_target`` is the total edge count for ``ER`` and the number of
    edges attached per arriving node for ``BA``.
    """

    model: str
    n: int
    m_target: int
    seed: int
    permute_ids: bool = False

    def __post_init__(self):
        if self.model not in ("BA", "ER"):
            raise ValueError(f"unknown model {self.model!r}, expected 'BA' or 'ER'")
        if self.n < 2:
            raise ValueError("n must be at least 2")

    def build(self) -> Graph:
        rng = random.Random(self.seed)
        if self.model == "BA":
            g = generate_ba(self.n, self.m_target, rng)
        else:
            g = generate_er(self.n, self.m_target, rng)
        if self.permute_ids:
            g = permute_ids(g, rng)
        return g

    def meta(self) -> dict:
        return {"model": self.model, "n": self.n, "m": self.m_target, "seed": self.seed,
                "permute_ids": self.permute_ids}


def _as_rng(rng) -> random.Random:
    if rng is None or isinstance(rng, int):
        return random.Random(rng)
    return rng


def generate_ba(n: int, m_per_node: int, rng=None) -> Graph:
    """Barabasi-Albert preferential attachment.

    Starts from a clique on ``m_per_node + 1`` nodes; every later node
    attaches ``m_per_node`` edges to distinct existing nodes chosen with
    probability proportional to their current degree. Node ids follow
    creation order.
    """
    if m_per_node < 1 or n <= m_per_node:
        raise GraphError(f"need m_per_node >= 1 and n > m_per_node, got n={n}, m_per_node={m_per_node}")
    rng = _as_rng(rng)
    g = Graph(n)
    seed = m_per_node + 1
    # every edge endpoint appears once here, so a uniform pick is degree-proportional
    stubs: list[int] = []
    for a in range(1, seed + 1):
        for b in range(a + 1, seed + 1):
            g.add_edge(a, b)
            stubs += (a, b)
    for v in range(seed + 1, n + 1):
        targets: set[int] = set()
        while len(targets) < m_per_node:
            targets.add(stubs[int(rng.random() * len(stubs))])
        for t in targets:
            g.add_edge(v, t)
            stubs += (v, t)
    return g


def generate_er(n: int, m: int, rng=None, max_tries: int = 1000) -> Graph:
    """Uniform G(n, m) conditioned on connectivity (regenerated until connected)."""
    if not n - 1 <= m <= n * (n - 1) // 2:
        raise GraphError(f"m={m} infeasible for a connected simple graph on n={n} nodes")
    rng = _as_rng(rng)
    total = n * (n - 1) // 2
    for _ in range(max_tries):
        g = Graph(n)
        if 2 * m > total:
            # dense case: sample pairs without replacement
            pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
            for a, b in rng.sample(pairs, m):
                g.add_edge(a, b)
        else:
            while g.m < m:
                a = int(rng.random() * n) + 1
                b = int(rng.random() * n) + 1
                if a != b:
                    g.add_edge(a, b)
        if g.is_connected():
            return g
    raise GraphError(f"no connected G({n}, {m}) after {max_tries} attempts")


def permute_ids(g: Graph, rng=None) -> Graph:
    """Relabel nodes by a uniform random permutation of ``1..n``."""
    rng = _as_rng(rng)
    perm = list(range(1, g.n + 1))
    rng.shuffle(perm)
    return g.relabel(np.array(perm))


def random_connected_graph(n: int, rng=None, mean_degree: float | None = None) -> Graph:
    """Small connected test graph: a random spanning tree plus extra random edges."""
    rng = _as_rng(rng)
    g = Graph(n)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    for i in range(1, n):
        g.add_edge(order[i], order[int(rng.random() * i)])
    if mean_degree is None:
        mean_degree = 2 + rng.random() * 6
    target = min(int(mean_degree * n / 2), n * (n - 1) // 2)
    while g.m < target:
        a = int(rng.random() * n) + 1
        b = int(rng.random() * n) + 1
        if a != b:
            g.add_edge(a, b)
    return g
