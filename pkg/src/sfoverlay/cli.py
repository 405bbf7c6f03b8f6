"""Command-line experiment runner.

Usage::

    sfoverlay <kind> --manifest run.yaml --out results/ [--seed S] [--reps N] [--force]
    sfoverlay plot --csv results/trace.csv --kind trace --out trace.svg

Exit status is 0 on success, 2 for manifest errors and 3 when a runtime
guard (graph, fit, bound or output checks) stops the run.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import experiments as ex
from .analysis import FitError
from .bounds import BoundError
from .graph import GraphError, read_edgelist, write_edgelist
from .manifest import KINDS, ManifestError, load_manifest
from .plotting import SchemaError, plot_csv
from .protocol import TRACE_HEADER

EXIT_OK, EXIT_MANIFEST, EXIT_GUARD = 0, 2, 3

log = logging.getLogger("sfoverlay")


class OutputExists(RuntimeError):
    pass


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".12g")
    return str(v)


class Writer:
    """Writes artifacts into one directory with a provenance header."""

    def __init__(self, out: Path, manifest, seed: int, force: bool):
        self.out = out
        self.manifest = manifest
        self.seed = seed
        self.force = force
        self.written: list[Path] = []

    def prepare(self) -> None:
        if self.out.exists() and not self.out.is_dir():
            raise OutputExists(f"{self.out} exists and is not a directory")
        if self.out.is_dir() and any(self.out.iterdir()) and not self.force:
            raise OutputExists(f"output directory {self.out} is not empty (use --force to overwrite)")
        self.out.mkdir(parents=True, exist_ok=True)

    def header(self) -> list[str]:
        return [f"manifest_sha256={self.manifest.sha256}", f"seed={self.seed}", f"kind={self.manifest.kind}"]

    def csv(self, name: str, fields: list[str], rows: list[dict], comments: list[str] = (),
            columns: list[str] | None = None) -> Path:
        """Write ``rows``; ``columns`` renames ``fields`` in the header line."""
        path = self.out / name
        with open(path, "w") as fh:
            for line in self.header() + list(comments):
                fh.write(f"# {line}\n")
            fh.write(",".join(columns or fields) + "\n")
            for row in rows:
                if isinstance(row, str):
                    fh.write(f"# {row}\n")
                else:
                    fh.write(",".join(_fmt(row[f]) for f in fields) + "\n")
        self.written.append(path)
        return path

    def graph(self, name: str, g, meta: dict) -> Path:
        path = self.out / name
        meta = {"manifest_sha256": self.manifest.sha256, "seed": self.seed, **meta}
        write_edgelist(g, path, meta)
        self.written.append(path)
        return path


TRACE_COLUMNS = TRACE_HEADER.split(",")


def _trace_rows(trace) -> list[dict]:
    return [{f: getattr(r, f) for f in ex.TRACE_FIELDS} for r in trace]


def _g(gamma: float) -> str:
    return f"{gamma:g}"


# ----------------------------------------------------------------------
# subcommands


def cmd_generate(p, w: Writer) -> None:
    for g, meta in ex.run_generate(p):
        w.graph(f"graph_rep{meta['rep']}.edges", g, meta)


def cmd_rewire(p, w: Writer) -> None:
    runs = ex.run_rewire(p)
    for gamma in p["gammas"]:
        sel = [r for r in runs if r.gamma_t == gamma]
        for r in sel:
            res = r.result
            w.csv(f"trace_g{_g(gamma)}_rep{r.rep}.csv", ex.TRACE_FIELDS, _trace_rows(res.trace),
                  [f"gamma_t={gamma} rep={r.rep} run_seed={r.seed} completed={int(res.completed)} "
                   f"stuck_edges={res.stuck_edges}"], TRACE_COLUMNS)
            w.graph(f"final_g{_g(gamma)}_rep{r.rep}.edges", r.graph, {"gamma_t": gamma, "rep": r.rep})
        avg = ex.average_traces([r.result.trace for r in sel], p["snapshot_every"])
        w.csv(f"trace_g{_g(gamma)}_avg.csv", ex.TRACE_FIELDS, avg, [f"gamma_t={gamma} runs={len(sel)}"],
              TRACE_COLUMNS)
        pooled: dict[int, int] = {}
        for r in sel:
            for d, c in r.histogram.items():
                pooled[d] = pooled.get(d, 0) + c
        w.csv(f"degrees_g{_g(gamma)}.csv", ["degree", "count"],
              [{"degree": d, "count": c} for d, c in sorted(pooled.items())], [f"gamma_t={gamma} runs={len(sel)}"])
    w.csv("fit_table.csv", ["gamma_t", "gamma_f", "ks_D", "dmin"], ex.fit_table(runs))
    run_fields = ["gamma_t", "rep", "initial_gamma_f", "initial_ks_D", "gamma_f", "ks_D", "dmin", "completed",
                  "stuck_edges", "rewirings", "messages", "end_time"]
    w.csv("fit_runs.csv", run_fields, [{
        "gamma_t": r.gamma_t, "rep": r.rep, "initial_gamma_f": r.initial.gamma_f, "initial_ks_D": r.initial.ks_D,
        "gamma_f": r.final.gamma_f, "ks_D": r.final.ks_D, "dmin": r.final.d_min_fit,
        "completed": r.result.completed, "stuck_edges": r.result.stuck_edges,
        "rewirings": r.result.counters.rewirings, "messages": r.result.counters.messages,
        "end_time": r.result.end_time,
    } for r in runs])


def cmd_multi_cycle(p, w: Writer) -> None:
    runs = ex.run_multi_cycle(p)
    ls = p["l"] if isinstance(p["l"], list) else [p["l"]] * len(p["gammas"])
    summary = []
    for run in runs:
        rows: list = []
        for k, res in enumerate(run.results):
            rows.append(f"cycle={k} start={_fmt(res.start_time)} gamma_t={p['gammas'][k]} l={ls[k]}")
            rows.extend(_trace_rows(res.trace))
            last = res.trace[-1]
            summary.append({"rep": run.rep, "cycle": k, "gamma_t": p["gammas"][k], "l": ls[k],
                            "start": res.start_time, "end": res.end_time, "gamma_f": last.gamma_f,
                            "ks_D": last.ks_D, "dmin": last.d_min_fit, "max_degree": last.max_degree,
                            "completed": res.completed})
        w.csv(f"trace_rep{run.rep}.csv", ex.TRACE_FIELDS, rows, [f"rep={run.rep} run_seed={run.seed}"], TRACE_COLUMNS)
        for c, g in enumerate(run.boundary_graphs):
            w.graph(f"graph_rep{run.rep}_cycle{c}.edges", g, {"rep": run.rep, "boundary": c})
    w.csv("cycles.csv", ["rep", "cycle", "gamma_t", "l", "start", "end", "gamma_f", "ks_D", "dmin", "max_degree",
                         "completed"], summary)


def cmd_tvd_sweep(p, w: Writer) -> None:
    w.csv("sweep.csv", ["l", "tvd_avg", "tvd_min", "tvd_max"], ex.run_tvd_sweep(p),
          [f"model={p['model']} n={p['n']} gamma={p['gamma']} method={p['method']} R={p['R']}"])


def cmd_min_walk_length(p, w: Writer) -> None:
    w.csv("lmin.csv", ["n", "gamma", "l_min"], ex.run_min_walk_length(p),
          [f"model={p['model']} epsilon={p['epsilon']} method={p['method']} R={p['R']}"])


def cmd_degree_correlation(p, w: Writer) -> None:
    scatter, summary = ex.run_degree_correlation(p)
    w.csv("scatter.csv", ["realization", "node", "degree", "tvd"], scatter)
    rhos = [s["rho"] for s in summary]
    w.csv("correlation.csv", ["realization", "rho", "degenerate", "mixed_regime"], summary,
          [f"mean_rho={_fmt(sum(rhos) / len(rhos))}"])


def cmd_fit(p, w: Writer) -> None:
    graph = None
    if p["input"] is not None:
        graph, _ = read_edgelist(p["input"])
    w.csv("fit.csv", ["realization", "gamma_f", "ks_D", "dmin", "n_tail"], ex.run_fit(p, graph))


def cmd_bounds(p, w: Writer) -> None:
    w.csv("bounds.csv", ex.BOUND_FIELDS, ex.run_bounds(p), ["l_asymptotic is an order estimate (constant 1)"])


COMMANDS = {
    "generate": cmd_generate,
    "rewire": cmd_rewire,
    "multi-cycle": cmd_multi_cycle,
    "tvd-sweep": cmd_tvd_sweep,
    "min-walk-length": cmd_min_walk_length,
    "degree-correlation": cmd_degree_correlation,
    "fit": cmd_fit,
    "bounds": cmd_bounds,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", required=True, help="YAML or JSON run manifest")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--seed", type=int, help="override the manifest seed")
    common.add_argument("--reps", type=int, help="override the number of repetitions")
    common.add_argument("--force", action="store_true", help="allow writing into a non-empty directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sfoverlay", description="Scale-free overlay rewiring experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sub.add_parser(kind, parents=[common])
    pl = sub.add_parser("plot", help="render an experiment CSV as SVG")
    pl.add_argument("--csv", required=True)
    pl.add_argument("--kind", required=True, choices=["trace", "degree", "sweep"])
    pl.add_argument("--out", required=True, help="output SVG path")
    pl.add_argument("--force", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "plot":
            out = Path(args.out)
            if out.exists() and not args.force:
                raise OutputExists(f"{out} exists (use --force to overwrite)")
            plot_csv(args.csv, args.kind, out)
            return EXIT_OK
        manifest = load_manifest(args.manifest, args.command)
        p = manifest.params
        if args.seed is not None:
            if args.seed < 0:
                raise ManifestError("--seed must be non-negative")
            p["seed"] = args.seed
        if args.reps is not None:
            if args.reps < 1:
                raise ManifestError("--reps must be >= 1")
            p["repetitions"] = args.reps
        w = Writer(Path(args.out), manifest, p["seed"], args.force)
        w.prepare()
        COMMANDS[args.command](p, w)
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    except (GraphError, FitError, BoundError, SchemaError, OutputExists, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
