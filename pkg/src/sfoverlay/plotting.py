"""Vector plots of experiment CSVs."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .protocol import TRACE_HEADER  # noqa: E402

SCHEMAS = {
    "trace": TRACE_HEADER.split(","),
    "degree": ["degree", "count"],
    "sweep": ["l", "tvd_avg", "tvd_min", "tvd_max"],
}


class SchemaError(ValueError):
    pass


def read_csv(path: str | Path) -> tuple[list[str], list[dict], list[str]]:
    """Return (header, rows, comment lines) of a ``#``-commented CSV."""
    comments, lines = [], []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            elif line.strip():
                lines.append(line)
    if not lines:
        raise SchemaError(f"{path}: no header or data rows")
    reader = csv.DictReader(lines)
    rows = list(reader)
    return list(reader.fieldnames or []), rows, comments


def _cycle_starts(comments: list[str]) -> list[float]:
    starts = []
    for c in comments:
        if c.startswith("cycle="):
            kv = dict(tok.split("=", 1) for tok in c.split())
            starts.append(float(kv["start"]))
    return starts


def plot_csv(path: str | Path, kind: str, out: str | Path) -> Path:
    if kind not in SCHEMAS:
        raise SchemaError(f"unknown plot kind {kind!r}, expected one of {sorted(SCHEMAS)}")
    header, rows, comments = read_csv(path)
    expected = SCHEMAS[kind]
    if header != expected:
        raise SchemaError(f"{path}: header {','.join(header)} does not match expected {','.join(expected)}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    col = {k: [float(r[k]) for r in rows] for k in expected}
    plt.rcParams["svg.hashsalt"] = "sfoverlay"
    if kind == "trace":
        fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
        for ax, key, label in zip(axes, ("gamma_f", "ks_D", "max_degree"),
                                  ("fitted exponent", "KS statistic", "max degree")):
            ax.plot(col["time"], col[key], lw=1)
            for t in _cycle_starts(comments):
                ax.axvline(t, color="grey", ls="--", lw=0.8)
            ax.set_xlabel("time")
            ax.set_ylabel(label)
    elif kind == "degree":
        fig, ax = plt.subplots(figsize=(5, 4))
        pts = [(d, c) for d, c in zip(col["degree"], col["count"]) if d > 0 and c > 0]
        total = sum(c for _, c in pts)
        ax.loglog([d for d, _ in pts], [c / total for _, c in pts], "o", ms=3)
        ax.set_xlabel("degree k")
        ax.set_ylabel("P(k)")
    else:
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(col["l"], col["tvd_avg"], "-o", ms=3)
        ax.fill_between(col["l"], col["tvd_min"], col["tvd_max"], alpha=0.3)
        if all(v > 0 and not math.isnan(v) for v in col["tvd_avg"]):
            ax.set_yscale("log")
        ax.set_xlabel("walk length l")
        ax.set_ylabel("total variation distance")
    fig.tight_layout()
    out = Path(out)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out
