"""Measurements: total variation distance, walk-length sweeps, degree statistics
and discrete power-law fitting."""

from __future__ import annotations

import logging
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize, special, stats

from .graph import Graph
from .stationary import TargetSpec, stationary_distribution
from .walk import WalkSnapshot, exact_distributions, transition_matrix_sparse

log = logging.getLogger(__name__)

# hit-count guard on the least likely node: warn below, refuse below the hard floor
R_WARN = 20
R_FLOOR = 5


def total_variation(p, q) -> float:
    """Half the L1 distance between two distributions on the same support."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"support mismatch: {p.shape} vs {q.shape}")
    for name, x in (("p", p), ("q", q)):
        if abs(x.sum() - 1.0) > 1e-9:
            raise ValueError(f"{name} sums to {x.sum()}, not 1")
    return 0.5 * float(np.abs(p - q).sum())


@dataclass
class EmpiricalDistribution:
    counts: np.ndarray
    R: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.R:
            raise ValueError("hit counts do not sum to R")

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.R


def _check_trials(spec: TargetSpec, R: int) -> None:
    expected = R * spec.pi_min
    if expected < R_FLOOR:
        raise ValueError(f"R={R} gives {expected:.2f} expected hits on the least likely node (need >= {R_FLOOR})")
    if expected < R_WARN:
        warnings.warn(f"R={R} gives only {expected:.1f} expected hits on the least likely node", stacklevel=3)


def _np_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def estimate_tvd(g: Graph, spec: TargetSpec, l: int, R: int, start_policy="uniform", rng=None,
                 snapshot: WalkSnapshot | None = None) -> tuple[float, EmpiricalDistribution]:
    """Run ``R`` independent walks of length ``l`` and compare hit frequencies with the target.

    ``start_policy`` is a node id (all walks start there) or ``"uniform"``
    (each walk starts at an independently drawn node).
    """
    _check_trials(spec, R)
    rng = _np_rng(rng)
    snap = snapshot or WalkSnapshot(g, spec)
    if start_policy == "uniform":
        starts = rng.integers(1, g.n + 1, size=R)
    else:
        starts = np.full(R, int(start_policy))
    counts = snap.hit_counts(starts, [l], rng)[l]
    emp = EmpiricalDistribution(counts, R)
    return total_variation(emp.frequencies, stationary_distribution(spec)), emp


# ----------------------------------------------------------------------
# walk-length sweeps


@dataclass
class SweepRow:
    l: int
    tvd_avg: float
    tvd_min: float
    tvd_max: float


def tvd_sweep(graphs: Graph | Sequence[Graph], gamma: float, l_grid: Sequence[int], R: int | None = None,
              n_starts: int = 5, rng=None, method: str = "sampled") -> list[SweepRow]:
    """Distance to the target after each walk length in ``l_grid``.

    For every graph, ``n_starts`` start nodes are drawn uniformly; the
    distance is averaged uniformly over all (graph, start) pairs.
    ``method="sampled"`` estimates each distance from ``R`` walks per
    start, ``method="exact"`` propagates the start distribution through the
    sparse transition matrix.
    """
    if isinstance(graphs, Graph):
        graphs = [graphs]
    if method not in ("sampled", "exact"):
        raise ValueError(f"unknown method {method!r}")
    if method == "sampled" and R is None:
        raise ValueError("sampled sweep needs R")
    rng = _np_rng(rng)
    grid = sorted(set(int(x) for x in l_grid))
    per_l: dict[int, list[float]] = {l: [] for l in grid}
    for g in graphs:
        spec = TargetSpec(gamma, g.n)
        pi = stationary_distribution(spec)
        starts = rng.integers(1, g.n + 1, size=n_starts)
        if method == "sampled":
            _check_trials(spec, R)
            snap = WalkSnapshot(g, spec)
            for s in starts:
                counts = snap.hit_counts(np.full(R, s), grid, rng)
                for l in grid:
                    per_l[l].append(0.5 * float(np.abs(counts[l] / R - pi).sum()))
        else:
            P = transition_matrix_sparse(g, spec)
            V = exact_distributions(P, starts, 0)
            done = 0
            for l in grid:
                V = _advance(P, V, l - done)
                done = l
                per_l[l].extend(0.5 * np.abs(V - pi).sum(axis=1))
    return [SweepRow(l, float(np.mean(v)), float(np.min(v)), float(np.max(v))) for l, v in per_l.items()]


def _advance(P, V: np.ndarray, steps: int) -> np.ndarray:
    PT = P.T.tocsr()
    for _ in range(steps):
        V = (PT @ V.T).T
    return V


def min_walk_length(graphs: Graph | Sequence[Graph], gamma: float, epsilon: float, l_grid: Sequence[int],
                    R: int | None = None, n_starts: int = 5, rng=None, method: str = "sampled") -> int | None:
    """Smallest grid length whose average distance falls to ``epsilon`` or below.

    Returns ``None`` when no grid length gets there.
    """
    rows = tvd_sweep(graphs, gamma, l_grid, R=R, n_starts=n_starts, rng=rng, method=method)
    for row in rows:
        if row.tvd_avg <= epsilon:
            return row.l
    return None


# ----------------------------------------------------------------------
# start degree vs. distance


@dataclass
class DegreeCorrelation:
    degrees: np.ndarray
    tvds: np.ndarray
    rho: float
    degenerate: bool
    mixed_regime: bool | None = None


def degree_tvd_correlation(g: Graph, spec: TargetSpec, l: int, R_per_node: int | None, rng=None,
                           mixed_threshold: float = 0.01, block: int = 1 << 20) -> DegreeCorrelation:
    """Per-start distance after ``l`` hops and its rank correlation with start degree.

    ``R_per_node=None`` uses the exact chain instead of sampled walks.
    ``mixed_regime`` is set when the exact distance from every start is
    below ``mixed_threshold`` (only evaluated for ``n <= 2000``).
    """
    rng = _np_rng(rng)
    pi = stationary_distribution(spec)
    deg = g.degrees()
    exact = None
    if R_per_node is None or g.n <= 2000:
        P = transition_matrix_sparse(g, spec)
        exact = 0.5 * np.abs(exact_distributions(P, np.arange(1, g.n + 1), l) - pi).sum(axis=1)
    if R_per_node is None:
        tvds = exact
    else:
        _check_trials(spec, R_per_node)
        snap = WalkSnapshot(g, spec)
        tvds = np.empty(g.n)
        per_block = max(1, block // R_per_node)
        for lo in range(0, g.n, per_block):
            nodes = np.arange(lo, min(lo + per_block, g.n))
            cur = np.repeat(nodes, R_per_node)
            for _ in range(l):
                cur = snap.step(cur, rng)
            owner = np.repeat(np.arange(nodes.size), R_per_node)
            hits = np.bincount(owner * g.n + cur, minlength=nodes.size * g.n).reshape(nodes.size, g.n)
            tvds[nodes] = 0.5 * np.abs(hits / R_per_node - pi).sum(axis=1)
    degenerate = bool(np.all(deg == deg[0])) or bool(np.all(tvds == tvds[0]))
    rho = 0.0 if degenerate else float(stats.spearmanr(deg, tvds)[0])
    mixed = None if exact is None else bool(exact.max() <= mixed_threshold)
    return DegreeCorrelation(deg, tvds, rho, degenerate, mixed)


# ----------------------------------------------------------------------
# degree statistics


@dataclass
class DegreeStats:
    histogram: dict[int, int]
    max_degree: int
    mean_degree: float


def degree_distribution(g: Graph) -> DegreeStats:
    deg = g.degrees()
    hist = dict(sorted(Counter(deg.tolist()).items()))
    return DegreeStats(hist, int(deg.max()), float(deg.mean()))


# ----------------------------------------------------------------------
# power-law fitting


class FitError(ValueError):
    pass


@dataclass
class FitResult:
    gamma_f: float
    d_min_fit: int
    ks_D: float
    n_tail: int


def _mle_approx(tail: np.ndarray, xmin: int) -> float:
    s = np.log(tail / (xmin - 0.5)).sum()
    return 1.0 + tail.size / s if s > 0 else math.inf


def _mle_exact(tail: np.ndarray, xmin: int, bounds: tuple[float, float]) -> float:
    sum_log = np.log(tail).sum()
    nll = lambda a: a * sum_log + tail.size * math.log(special.zeta(a, xmin))
    res = optimize.minimize_scalar(nll, bounds=bounds, method="bounded", options={"xatol": 1e-6})
    return float(res.x)


def _ks_discrete(tail: np.ndarray, xmin: int, gamma: float) -> float:
    xmax = int(tail.max())
    support = np.arange(xmin, xmax + 1)
    emp = np.cumsum(np.bincount(tail - xmin, minlength=support.size)) / tail.size
    fit = np.cumsum(support.astype(float) ** -gamma) / special.zeta(gamma, xmin)
    return float(np.abs(emp - fit).max())


def fit_power_law(degrees, min_tail: int = 50, method: str = "approx",
                  exponent_range: tuple[float, float] | None = None) -> FitResult:
    """Maximum-likelihood discrete power-law fit with KS-selected lower cutoff.

    Every observed value with at least ``min_tail`` samples at or above it
    is tried as cutoff; the exponent is estimated on that tail and the
    cutoff with the smallest Kolmogorov-Smirnov distance wins.

    ``method="approx"`` uses the closed form
    ``1 + n / sum(log(x / (xmin - 0.5)))``; ``method="exact"`` maximises the
    Hurwitz-zeta likelihood numerically. ``exponent_range`` restricts the
    exponent to a closed interval (the likelihood is unimodal, so clipping
    gives the restricted maximum).
    """
    x = np.asarray(degrees, dtype=np.int64)
    x = np.sort(x[x >= 1])
    if method not in ("approx", "exact"):
        raise ValueError(f"unknown method {method!r}")
    lo, hi = exponent_range if exponent_range is not None else (1.0 + 1e-6, 20.0)
    values = np.unique(x)
    # n_tail for each candidate cutoff
    n_tail = x.size - np.searchsorted(x, values, side="left")
    candidates = values[(n_tail >= min_tail) & (values < values[-1])]
    if candidates.size == 0:
        raise FitError(f"no cutoff leaves {min_tail} samples with more than one distinct value")
    best = None
    for xmin in candidates:
        tail = x[np.searchsorted(x, xmin, side="left"):]
        if method == "approx":
            gamma = min(max(_mle_approx(tail, int(xmin)), lo), hi)
        else:
            gamma = _mle_exact(tail, int(xmin), (lo, hi))
        D = _ks_discrete(tail, int(xmin), gamma)
        if best is None or D < best.ks_D:
            best = FitResult(float(gamma), int(xmin), D, int(tail.size))
    return best


def sample_discrete_power_law(gamma: float, xmin: int, size: int, rng=None, table_factor: int = 10_000) -> np.ndarray:
    """Draw from ``P(x) = x**-gamma / zeta(gamma, xmin)`` for ``x >= xmin`` by inverse CDF.

    The CDF is tabulated exactly up to ``xmin * table_factor``; the
    remaining tail mass is drawn from the continuous approximation.
    """
    if gamma <= 1 or xmin < 1:
        raise ValueError("need gamma > 1 and xmin >= 1")
    rng = _np_rng(rng)
    top = xmin * table_factor
    support = np.arange(xmin, top + 1)
    cdf = np.cumsum(support.astype(float) ** -gamma) / special.zeta(gamma, xmin)
    u = rng.random(size)
    idx = np.searchsorted(cdf, u, side="left")
    out = support[np.minimum(idx, support.size - 1)].copy()
    beyond = idx >= support.size
    if beyond.any():
        v = (u[beyond] - cdf[-1]) / (1.0 - cdf[-1])
        out[beyond] = np.floor((top + 0.5) * (1.0 - v) ** (-1.0 / (gamma - 1.0)) + 0.5).astype(np.int64)
    return out
