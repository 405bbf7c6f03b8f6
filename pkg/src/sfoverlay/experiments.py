"""Experiment drivers behind the command line.

Each ``run_*`` function takes validated manifest parameters and returns
plain rows; writing files is left to the caller. Repetitions get
independent seeds derived from the base seed and their position in the
grid, so results do not depend on worker count or completion order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import degree_distribution, degree_tvd_correlation, fit_power_law, min_walk_length, tvd_sweep
from .bounds import REPORT_FIELDS, bound_report
from .generators import GenSpec
from .graph import Graph
from .protocol import CycleResult, SimConfig, Simulator, TraceRecord
from .stationary import TargetSpec, stationary_distribution
from .walk import transition_matrix

log = logging.getLogger(__name__)

TRACE_FIELDS = ["time", "gamma_f", "ks_D", "d_min_fit", "max_degree", "component_count", "rewired_fraction",
                "messages"]


def child_seed(seed: int, *keys: int) -> int:
    """Independent 63-bit seed for the grid cell ``keys``."""
    ss = np.random.SeedSequence([seed & (2**64 - 1), *keys])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def ba_edge_count(n: int, m_per_node: int) -> int:
    """Edges of a preferential-attachment graph grown from an ``m_per_node + 1`` clique."""
    k = m_per_node
    return k * (k + 1) // 2 + k * (n - k - 1)


def build_graph(p: dict, seed: int, n: int | None = None) -> Graph:
    n = p["n"] if n is None else n
    if p["model"] == "BA":
        spec = GenSpec("BA", n, p["m_per_node"], seed, p["permute_ids"])
    else:
        edges = p["edges"] if p["edges"] is not None else ba_edge_count(n, p["m_per_node"])
        spec = GenSpec("ER", n, edges, seed, p["permute_ids"])
    return spec.build()


def _fan_out(fn, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def _config(p: dict, gamma: float, l: int, seed: int) -> SimConfig:
    fit = {"method": p["fit_method"], "exponent_range": p["exponent_range"]}
    return SimConfig(gamma=gamma, l=l, delay=p["delay"], snapshot_every=p["snapshot_every"], seed=seed,
                     max_time=p["max_time"], fit=fit)


# ----------------------------------------------------------------------
# generate


def run_generate(p: dict) -> list[tuple[Graph, dict]]:
    out = []
    for rep in range(p["repetitions"]):
        seed = child_seed(p["seed"], rep)
        g = build_graph(p, seed)
        out.append((g, {"model": p["model"], "n": g.n, "m": g.m, "seed": seed, "rep": rep}))
    return out


# ----------------------------------------------------------------------
# rewire


@dataclass
class RewireRun:
    gamma_t: float
    rep: int
    seed: int
    initial: object
    final: object
    result: CycleResult
    graph: Graph
    histogram: dict


def _rewire_one(task) -> RewireRun:
    p, gi, gamma, rep = task
    seed = child_seed(p["seed"], gi, rep)
    g = build_graph(p, seed)
    fit_kw = {"method": p["fit_method"], "exponent_range": p["exponent_range"]}
    initial = fit_power_law(g.degrees(), **fit_kw)
    sim = Simulator(g, seed)
    res = sim.run_cycle(_config(p, gamma, p["l"], seed))
    final = fit_power_law(g.degrees(), **fit_kw)
    return RewireRun(gamma, rep, seed, initial, final, res, g, degree_distribution(g).histogram)


def run_rewire(p: dict) -> list[RewireRun]:
    tasks = [(p, gi, gamma, rep) for gi, gamma in enumerate(p["gammas"]) for rep in range(p["repetitions"])]
    return _fan_out(_rewire_one, tasks, p["workers"])


def average_traces(traces: list[list[TraceRecord]], every: float) -> list[dict]:
    """Average several traces on the common snapshot grid.

    A run that ended before a grid time contributes its final record
    (the topology no longer changes once a cycle is over).
    """
    if not traces:
        return []
    t0 = min(tr[0].time for tr in traces)
    t_end = max(tr[-1].time for tr in traces)
    grid = [t0 + k * every for k in range(int(math.floor((t_end - t0) / every + 1e-9)) + 1)]
    if grid[-1] < t_end:
        grid.append(t_end)
    rows = []
    for t in grid:
        picked = []
        for tr in traces:
            times = [r.time for r in tr]
            k = int(np.searchsorted(times, t + 1e-9, side="right")) - 1
            picked.append(tr[max(k, 0)])
        row = {"time": t}
        for f in TRACE_FIELDS[1:]:
            vals = [getattr(r, f) for r in picked]
            row[f] = float(np.nanmean(vals)) if not all(math.isnan(v) for v in vals) else math.nan
        rows.append(row)
    return rows


def fit_table(runs: list[RewireRun]) -> list[dict]:
    """Average final fit per target exponent."""
    rows = []
    for gamma in dict.fromkeys(r.gamma_t for r in runs):
        sel = [r for r in runs if r.gamma_t == gamma]
        rows.append({
            "gamma_t": gamma,
            "gamma_f": float(np.mean([r.final.gamma_f for r in sel])),
            "ks_D": float(np.mean([r.final.ks_D for r in sel])),
            "dmin": float(np.mean([r.final.d_min_fit for r in sel])),
        })
    return rows


# ----------------------------------------------------------------------
# multi-cycle


@dataclass
class MultiCycleRun:
    rep: int
    seed: int
    results: list
    boundary_graphs: list


def _multi_one(task) -> MultiCycleRun:
    p, rep = task
    seed = child_seed(p["seed"], rep)
    g = build_graph(p, seed)
    ls = p["l"] if isinstance(p["l"], list) else [p["l"]] * len(p["gammas"])
    sim = Simulator(g, seed)
    results, graphs = [], [g.copy()]
    for k, (gamma, l) in enumerate(zip(p["gammas"], ls)):
        results.append(sim.run_cycle(_config(p, gamma, l, seed), cycle=k))
        graphs.append(g.copy())
    return MultiCycleRun(rep, seed, results, graphs)


def run_multi_cycle(p: dict) -> list[MultiCycleRun]:
    if not p["gammas"]:
        log.warning("empty cycle list, nothing to run")
        return []
    return _fan_out(_multi_one, [(p, rep) for rep in range(p["repetitions"])], p["workers"])


# ----------------------------------------------------------------------
# walk-length experiments


def _graphs(p: dict, n: int, key: int) -> list[Graph]:
    return [build_graph(p, child_seed(p["seed"], key, rep), n=n) for rep in range(p["repetitions"])]


def run_tvd_sweep(p: dict) -> list[dict]:
    graphs = _graphs(p, p["n"], 0)
    rows = tvd_sweep(graphs, p["gamma"], p["l_grid"], R=p["R"], n_starts=p["n_starts"],
                     rng=child_seed(p["seed"], 1), method=p["method"])
    return [{"l": r.l, "tvd_avg": r.tvd_avg, "tvd_min": r.tvd_min, "tvd_max": r.tvd_max} for r in rows]


def _lmin_one(task) -> dict:
    p, ni, n, gi, gamma = task
    graphs = _graphs(p, n, ni)
    l = min_walk_length(graphs, gamma, p["epsilon"], p["l_grid"], R=p["R"], n_starts=p["n_starts"],
                        rng=child_seed(p["seed"], ni, gi, 1), method=p["method"])
    return {"n": n, "gamma": gamma, "l_min": math.nan if l is None else l}


def run_min_walk_length(p: dict) -> list[dict]:
    tasks = [(p, ni, n, gi, gamma) for ni, n in enumerate(p["n"]) for gi, gamma in enumerate(p["gammas"])]
    return _fan_out(_lmin_one, tasks, p["workers"])


def run_degree_correlation(p: dict) -> tuple[list[dict], list[dict]]:
    scatter, summary = [], []
    for rep, g in enumerate(_graphs(p, p["n"], 0)):
        res = degree_tvd_correlation(g, TargetSpec(p["gamma"], g.n), p["l"], p["R_per_node"],
                                     rng=child_seed(p["seed"], 1, rep), mixed_threshold=p["mixed_threshold"])
        for v in range(g.n):
            scatter.append({"realization": rep, "node": v + 1, "degree": int(res.degrees[v]), "tvd": float(res.tvds[v])})
        summary.append({"realization": rep, "rho": res.rho, "degenerate": int(res.degenerate),
                        "mixed_regime": "" if res.mixed_regime is None else int(res.mixed_regime)})
    return scatter, summary


# ----------------------------------------------------------------------
# fit and bounds


def run_fit(p: dict, graph: Graph | None = None) -> list[dict]:
    graphs = [graph] if graph is not None else _graphs(p, p["n"], 0)
    rows = []
    for rep, g in enumerate(graphs):
        fr = fit_power_law(g.degrees(), min_tail=p["min_tail"], method=p["fit_method"],
                           exponent_range=p["exponent_range"])
        rows.append({"realization": rep, "gamma_f": fr.gamma_f, "ks_D": fr.ks_D, "dmin": fr.d_min_fit,
                     "n_tail": fr.n_tail})
    return rows


def exact_lmin(P: np.ndarray, pi: np.ndarray, s: int, epsilon: float, l_max: int) -> int | None:
    """Smallest ``l`` with ``TVD(e_s P^l, pi) <= epsilon``, by exact propagation."""
    v = np.zeros(P.shape[0])
    v[s - 1] = 1.0
    for l in range(0, l_max + 1):
        if 0.5 * np.abs(v - pi).sum() <= epsilon:
            return l
        v = v @ P
    return None


BOUND_FIELDS = REPORT_FIELDS + ["l_exact"]


def run_bounds(p: dict) -> list[dict]:
    rows = []
    for rep, g in enumerate(_graphs(p, p["n"], 0)):
        for gamma in p["gammas"]:
            spec = TargetSpec(gamma, g.n)
            P = transition_matrix(g, spec) if g.n <= 2000 else None
            pi = stationary_distribution(spec)
            for eps in p["epsilons"]:
                for s in p["starts"]:
                    row = bound_report(g, spec, s, eps, gamma_i=p["gamma_i"]).as_row()
                    l = exact_lmin(P, pi, s, eps, p["l_max"]) if P is not None else None
                    row["l_exact"] = math.nan if l is None else l
                    rows.append(row)
    return rows
