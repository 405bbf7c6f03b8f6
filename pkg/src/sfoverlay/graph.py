"""Undirected simple graph with per-edge rewiring marks.

Nodes are the integers ``1..n``. Each node keeps its neighbours in a list
paired with a position index, so membership tests, removal and uniform
sampling are all O(1). Marks live on both endpoints of an edge.
"""

from __future__ import annotations

import os
from collections import deque
from typing import Iterable, Iterator

import numpy as np


class GraphError(ValueError):
    """Raised for structurally invalid graph operations."""


class Graph:
    """Mutable undirected simple graph on nodes ``1..n``."""

    def __init__(self, n: int):
        if n < 1:
            raise GraphError(f"graph needs at least one node, got n={n}")
        self.n = int(n)
        # index 0 is unused so node ids can index directly
        self._nbrs: list[list[int]] = [[] for _ in range(self.n + 1)]
        self._pos: list[dict[int, int]] = [{} for _ in range(self.n + 1)]
        self._marked: list[set[int]] = [set() for _ in range(self.n + 1)]
        self._m = 0
        self._n_marked = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        g = cls(n)
        for a, b in edges:
            g.add_edge(a, b)
        return g

    # ------------------------------------------------------------------
    # basic queries

    @property
    def m(self) -> int:
        return self._m

    @property
    def n_marked(self) -> int:
        return self._n_marked

    def nodes(self) -> range:
        return range(1, self.n + 1)

    def degree(self, v: int) -> int:
        return len(self._nbrs[v])

    def degrees(self) -> np.ndarray:
        """Degree of every node, indexed ``0..n-1`` for nodes ``1..n``."""
        return np.fromiter((len(self._nbrs[v]) for v in self.nodes()), dtype=np.int64, count=self.n)

    def neighbors(self, v: int) -> list[int]:
        return list(self._nbrs[v])

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._pos[a]

    def is_marked(self, a: int, b: int) -> bool:
        return b in self._marked[a]

    def marked_neighbors(self, v: int) -> set[int]:
        return set(self._marked[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        for a in self.nodes():
            for b in self._nbrs[a]:
                if a < b:
                    yield a, b

    def copy(self) -> "Graph":
        g = Graph(self.n)
        g._nbrs = [list(x) for x in self._nbrs]
        g._pos = [dict(x) for x in self._pos]
        g._marked = [set(x) for x in self._marked]
        g._m = self._m
        g._n_marked = self._n_marked
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        if self.n != other.n or self._m != other._m:
            return False
        return all(
            set(self._nbrs[v]) == set(other._nbrs[v]) and self._marked[v] == other._marked[v]
            for v in self.nodes()
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self._m}, marked={self._n_marked})"

    # ------------------------------------------------------------------
    # mutation

    def _check_node(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise GraphError(f"node {v} outside 1..{self.n}")

    def add_edge(self, a: int, b: int, marked: bool = False) -> bool:
        """Insert edge ``(a, b)``.

        Returns ``False`` (and leaves the graph unchanged apart from an
        optional mark) when the edge already exists.
        """
        if a == b:
            raise GraphError(f"self-loop on node {a} rejected")
        self._check_node(a)
        self._check_node(b)
        if b in self._pos[a]:
            if marked:
                self.mark(a, b)
            return False
        self._pos[a][b] = len(self._nbrs[a])
        self._nbrs[a].append(b)
        self._pos[b][a] = len(self._nbrs[b])
        self._nbrs[b].append(a)
        self._m += 1
        if marked:
            self.mark(a, b)
        return True

    def _detach(self, a: int, b: int) -> None:
        nbrs, pos = self._nbrs[a], self._pos[a]
        i = pos.pop(b)
        last = nbrs.pop()
        if last != b:
            nbrs[i] = last
            pos[last] = i

    def remove_edge(self, a: int, b: int) -> bool:
        """Delete edge ``(a, b)`` and its mark. Returns ``False`` if absent."""
        if a == b or b not in self._pos[a]:
            return False
        self._detach(a, b)
        self._detach(b, a)
        self._m -= 1
        if b in self._marked[a]:
            self._marked[a].discard(b)
            self._marked[b].discard(a)
            self._n_marked -= 1
        return True

    def mark(self, a: int, b: int) -> bool:
        if b not in self._pos[a]:
            raise GraphError(f"cannot mark absent edge ({a}, {b})")
        if b in self._marked[a]:
            return False
        self._marked[a].add(b)
        self._marked[b].add(a)
        self._n_marked += 1
        return True

    def clear_marks(self) -> None:
        for s in self._marked:
            s.clear()
        self._n_marked = 0

    # ------------------------------------------------------------------
    # sampling

    def random_neighbor(self, v: int, rng) -> int:
        nbrs = self._nbrs[v]
        if not nbrs:
            raise GraphError(f"node {v} is isolated")
        return nbrs[int(rng.random() * len(nbrs))]

    def random_unmarked_neighbor(self, v: int, rng) -> int | None:
        nbrs = self._nbrs[v]
        marked = self._marked[v]
        k = len(nbrs) - len(marked)
        if k <= 0:
            return None
        if not marked:
            return nbrs[int(rng.random() * len(nbrs))]
        # rejection sampling while unmarked edges are plentiful
        if 2 * k >= len(nbrs):
            while True:
                u = nbrs[int(rng.random() * len(nbrs))]
                if u not in marked:
                    return u
        candidates = [u for u in nbrs if u not in marked]
        return candidates[int(rng.random() * len(candidates))]

    # ------------------------------------------------------------------
    # structure

    def connected_components(self) -> list[set[int]]:
        seen = bytearray(self.n + 1)
        comps = []
        for s in self.nodes():
            if seen[s]:
                continue
            seen[s] = 1
            comp = {s}
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for u in self._nbrs[v]:
                    if not seen[u]:
                        seen[u] = 1
                        comp.add(u)
                        queue.append(u)
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return len(self.connected_components()) == 1

    def eccentricity(self, s: int) -> int:
        dist = [-1] * (self.n + 1)
        dist[s] = 0
        queue = deque([s])
        far = 0
        reached = 1
        while queue:
            v = queue.popleft()
            dv = dist[v] + 1
            for u in self._nbrs[v]:
                if dist[u] < 0:
                    dist[u] = dv
                    far = dv
                    reached += 1
                    queue.append(u)
        if reached != self.n:
            raise GraphError("graph is disconnected")
        return far

    def diameter(self) -> int:
        """Longest shortest path, by BFS from every node."""
        if not self.is_connected():
            raise GraphError("diameter undefined on a disconnected graph")
        return max(self.eccentricity(s) for s in self.nodes())

    def to_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency in CSR form over 0-based rows (row ``v-1`` for node ``v``).

        Column entries are 0-based node indices as well.
        """
        deg = self.degrees()
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(int(indptr[-1]), dtype=np.int64)
        for v in self.nodes():
            s = indptr[v - 1]
            indices[s:s + deg[v - 1]] = self._nbrs[v]
        indices -= 1
        return indptr, indices

    def relabel(self, perm: np.ndarray) -> "Graph":
        """Return a copy where node ``v`` becomes ``perm[v-1]``."""
        perm = np.asarray(perm)
        if sorted(perm.tolist()) != list(self.nodes()):
            raise GraphError("relabeling must be a permutation of 1..n")
        g = Graph(self.n)
        for a, b in self.edges():
            g.add_edge(int(perm[a - 1]), int(perm[b - 1]), marked=self.is_marked(a, b))
        return g

    def validate(self) -> None:
        """Full scan of the structural invariants; raises ``GraphError``."""
        total = 0
        marks = 0
        for v in self.nodes():
            nbrs, pos = self._nbrs[v], self._pos[v]
            if len(nbrs) != len(pos) or len(set(nbrs)) != len(nbrs):
                raise GraphError(f"node {v}: neighbour index out of sync")
            for i, u in enumerate(nbrs):
                if u == v:
                    raise GraphError(f"self-loop at {v}")
                if pos[u] != i:
                    raise GraphError(f"node {v}: bad position for {u}")
                if v not in self._pos[u]:
                    raise GraphError(f"asymmetric edge ({v}, {u})")
            if not self._marked[v] <= pos.keys():
                raise GraphError(f"node {v}: mark on absent edge")
            for u in self._marked[v]:
                if v not in self._marked[u]:
                    raise GraphError(f"asymmetric mark ({v}, {u})")
            total += len(nbrs)
            marks += len(self._marked[v])
        if total != 2 * self._m or marks != 2 * self._n_marked:
            raise GraphError("edge or mark count out of sync with adjacency")


# ----------------------------------------------------------------------
# edge-list text format


def write_edgelist(g: Graph, path: str | os.PathLike, meta: dict | None = None) -> None:
    """Write ``g`` as ``n=.. m=..`` header plus one ``a b [marked]`` line per edge.

    ``meta`` entries are written as leading ``# key=value`` comment lines.
    """
    with open(path, "w") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}={value}\n")
        fh.write(f"n={g.n} m={g.m}\n")
        for a, b in sorted(g.edges()):
            fh.write(f"{a} {b} marked\n" if g.is_marked(a, b) else f"{a} {b}\n")


def read_edgelist(path: str | os.PathLike) -> tuple[Graph, dict]:
    meta: dict[str, str] = {}
    g = None
    expected_m = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
                continue
            if g is None:
                fields = dict(tok.split("=", 1) for tok in line.split())
                try:
                    g = Graph(int(fields["n"]))
                    expected_m = int(fields["m"])
                except (KeyError, ValueError) as exc:
                    raise GraphError(f"{path}:{lineno}: bad header {line!r}") from exc
                continue
            toks = line.split()
            if len(toks) not in (2, 3) or (len(toks) == 3 and toks[2] != "marked"):
                raise GraphError(f"{path}:{lineno}: bad edge line {line!r}")
            g.add_edge(int(toks[0]), int(toks[1]), marked=len(toks) == 3)
    if g is None:
        raise GraphError(f"{path}: missing header line")
    if g.m != expected_m:
        raise GraphError(f"{path}: header says m={expected_m}, found {g.m} edges")
    return g, meta
