"""Metropolis-Hastings biased random walks.

Two execution paths share the same transition rule:

* scalar walks on a live :class:`~sfoverlay.graph.Graph` (``mh_step``,
  ``run_walk``), which read current degrees at every hop and are what the
  protocol simulator uses;
* vectorised batches over a frozen CSR snapshot (:class:`WalkSnapshot`),
  used to push millions of walks through for distance measurements.

The exact transition matrix is available as an oracle for small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import Graph, GraphError
from .stationary import TargetSpec

DENSE_LIMIT = 5000


@dataclass
class WalkOutcome:
    endpoint_mid: int
    endpoint_end: int
    hops_taken: int
    self_loops: int


def mh_step(g: Graph, current: int, spec: TargetSpec, rng) -> int:
    """One biased hop: propose a uniform neighbour, accept with the Metropolis ratio.

    Consumes exactly two uniform draws from ``rng``. Returns ``current``
    when the proposal is rejected.
    """
    nbrs = g._nbrs[current]
    d_cur = len(nbrs)
    if d_cur == 0:
        raise GraphError(f"walk stuck on isolated node {current}")
    v = nbrs[int(rng.random() * d_cur)]
    if rng.random() <= (current / v) ** spec.alpha * d_cur / len(g._nbrs[v]):
        return v
    return current


def run_walk(g: Graph, start: int, length: int, spec: TargetSpec, rng) -> int:
    v = start
    for _ in range(length):
        v = mh_step(g, v, spec, rng)
    return v


def sample_edge_endpoints(g: Graph, start: int, l: int, spec: TargetSpec, rng) -> WalkOutcome:
    """Continue one walk for ``2*l`` hops, recording the nodes at hop ``l`` and ``2*l``."""
    v = start
    loops = 0
    mid = start
    for hop in range(1, 2 * l + 1):
        nxt = mh_step(g, v, spec, rng)
        loops += nxt == v
        v = nxt
        if hop == l:
            mid = v
    return WalkOutcome(endpoint_mid=mid, endpoint_end=v, hops_taken=2 * l, self_loops=loops)


# ----------------------------------------------------------------------
# exact chain


def _edge_probs(g: Graph, spec: TargetSpec):
    indptr, indices = g.to_csr()
    deg = np.diff(indptr).astype(float)
    if np.any(deg == 0):
        raise GraphError("transition matrix undefined with isolated nodes")
    q = np.arange(1, g.n + 1, dtype=float) ** spec.alpha * deg
    rows = np.repeat(np.arange(g.n), np.diff(indptr))
    vals = np.minimum(q[rows] / q[indices], 1.0) / deg[rows]
    return rows, indices, vals


def transition_matrix(g: Graph, spec: TargetSpec) -> np.ndarray:
    """Dense row-stochastic matrix of the biased walk (row ``i-1`` is node ``i``)."""
    if g.n > DENSE_LIMIT:
        raise ValueError(f"dense transition matrix limited to n <= {DENSE_LIMIT}, got {g.n}")
    rows, cols, vals = _edge_probs(g, spec)
    P = np.zeros((g.n, g.n))
    P[rows, cols] = vals
    P[np.diag_indices(g.n)] = 1.0 - P.sum(axis=1)
    return P


def transition_matrix_sparse(g: Graph, spec: TargetSpec) -> sp.csr_matrix:
    rows, cols, vals = _edge_probs(g, spec)
    off = sp.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))
    diag = 1.0 - np.asarray(off.sum(axis=1)).ravel()
    return (off + sp.diags(diag)).tocsr()


def exact_distribution(P, start: int, l: int) -> np.ndarray:
    """Distribution after ``l`` steps from node ``start``: ``e_start @ P**l``."""
    v = np.zeros(P.shape[0])
    v[start - 1] = 1.0
    for _ in range(l):
        v = v @ P
    return np.asarray(v).ravel()


def exact_distributions(P, starts, l: int) -> np.ndarray:
    """Row ``k`` is the ``l``-step distribution from ``starts[k]``."""
    starts = np.asarray(starts, dtype=np.int64)
    V = np.zeros((len(starts), P.shape[0]))
    V[np.arange(len(starts)), starts - 1] = 1.0
    PT = P.T.tocsr() if sp.issparse(P) else P.T
    for _ in range(l):
        V = (PT @ V.T).T if sp.issparse(P) else V @ P
    return np.asarray(V)


# ----------------------------------------------------------------------
# vectorised batches


class WalkSnapshot:
    """Frozen CSR view of a graph for running many walks at once."""

    def __init__(self, g: Graph, spec: TargetSpec):
        self.n = g.n
        self.spec = spec
        self.indptr, self.indices = g.to_csr()
        self.deg = np.diff(self.indptr)
        # move i -> j is accepted iff u * q[j] <= q[i]
        self.q = np.arange(1, g.n + 1, dtype=float) ** spec.alpha * self.deg

    def step(self, cur: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        d = self.deg[cur]
        nb = self.indices[self.indptr[cur] + (rng.random(cur.size) * d).astype(np.int64)]
        accept = rng.random(cur.size) * self.q[nb] <= self.q[cur]
        return np.where(accept, nb, cur)

    def hit_counts(self, starts, record, rng: np.random.Generator, chunk: int = 1 << 20) -> dict[int, np.ndarray]:
        """Run one walk per entry of ``starts`` (1-based node ids).

        Returns, for each walk length in ``record``, the per-node count of
        walks residing there after that many hops.
        """
        starts = np.asarray(starts, dtype=np.int64) - 1
        record = sorted(set(int(x) for x in record))
        if starts.size and np.any(self.deg[starts] == 0):
            raise GraphError("walk started on an isolated node")
        counts = {l: np.zeros(self.n, dtype=np.int64) for l in record}
        for lo in range(0, starts.size, chunk):
            cur = starts[lo:lo + chunk].copy()
            done = 0
            for l in record:
                for _ in range(l - done):
                    cur = self.step(cur, rng)
                done = l
                counts[l] += np.bincount(cur, minlength=self.n)
        return counts
