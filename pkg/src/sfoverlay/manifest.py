"""Declarative run manifests.

A manifest is a YAML (or JSON) mapping. Every experiment kind declares the
fields it accepts; unknown or missing fields and wrongly typed values are
reported before anything runs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import yaml

KINDS = ("generate", "rewire", "multi-cycle", "tvd-sweep", "min-walk-length", "degree-correlation", "fit", "bounds")


class ManifestError(ValueError):
    pass


# field -> (type checker name, default); REQUIRED marks mandatory fields
REQUIRED = object()

_COMMON = {
    "kind": ("str", None),
    "seed": ("int", 0),
    "repetitions": ("int", 1),
    "workers": ("int", 1),
}
_GRAPH = {
    "model": ("model", REQUIRED),
    "n": ("int", REQUIRED),
    "m_per_node": ("int", 5),
    "edges": ("int?", None),
    "permute_ids": ("bool", False),
}
_CYCLE = {
    "l": ("int", 20),
    "delay": ("float?", None),
    "snapshot_every": ("float", 200.0),
    "max_time": ("float?", None),
    "fit_method": ("method", "exact"),
    "exponent_range": ("range?", [1.5, 3.5]),
}

SCHEMAS: dict[str, dict] = {
    "generate": {**_GRAPH},
    "rewire": {**_GRAPH, **_CYCLE, "gammas": ("floats", REQUIRED)},
    "multi-cycle": {**_GRAPH, **_CYCLE, "gammas": ("floats", REQUIRED), "l": ("ints_or_int", 20)},
    "tvd-sweep": {**_GRAPH, "gamma": ("float", REQUIRED), "l_grid": ("ints", REQUIRED), "R": ("int?", None),
                  "n_starts": ("int", 5), "method": ("walk_method", "sampled")},
    "min-walk-length": {**_GRAPH, "n": ("ints", REQUIRED), "gammas": ("floats", REQUIRED),
                        "l_grid": ("ints", REQUIRED), "epsilon": ("float", 0.05), "R": ("int?", None),
                        "n_starts": ("int", 5), "method": ("walk_method", "sampled")},
    "degree-correlation": {**_GRAPH, "gamma": ("float", REQUIRED), "l": ("int", REQUIRED),
                           "R_per_node": ("int?", None), "mixed_threshold": ("float", 0.01)},
    "fit": {"input": ("str?", None), **{k: (t, None if d is REQUIRED else d) for k, (t, d) in _GRAPH.items()},
            "fit_method": ("method", "approx"), "exponent_range": ("range?", None), "min_tail": ("int", 50)},
    "bounds": {**_GRAPH, "gammas": ("floats", REQUIRED), "epsilons": ("floats", [0.05]),
               "starts": ("ints", [1]), "gamma_i": ("float", 2.9), "l_max": ("int", 100_000)},
}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return (isinstance(v, (int, float))) and not isinstance(v, bool)


def _coerce(name: str, kind: str, value):
    bad = ManifestError(f"field '{name}': expected {kind.rstrip('?')}, got {value!r}")
    if kind.endswith("?"):
        if value is None:
            return None
        kind = kind[:-1]
    if kind == "int":
        if not _is_int(value):
            raise bad
        return value
    if kind == "float":
        if not _is_num(value):
            raise bad
        return float(value)
    if kind == "bool":
        if not isinstance(value, bool):
            raise bad
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise bad
        return value
    if kind == "model":
        if value not in ("BA", "ER"):
            raise ManifestError(f"field '{name}': expected 'BA' or 'ER', got {value!r}")
        return value
    if kind == "method":
        if value not in ("approx", "exact"):
            raise ManifestError(f"field '{name}': expected 'approx' or 'exact', got {value!r}")
        return value
    if kind == "walk_method":
        if value not in ("sampled", "exact"):
            raise ManifestError(f"field '{name}': expected 'sampled' or 'exact', got {value!r}")
        return value
    if kind in ("ints", "floats"):
        if not isinstance(value, list):
            value = [value]
        check = _is_int if kind == "ints" else _is_num
        if not all(check(v) for v in value):
            raise bad
        return [int(v) for v in value] if kind == "ints" else [float(v) for v in value]
    if kind == "ints_or_int":
        if _is_int(value):
            return value
        return _coerce(name, "ints", value)
    if kind == "range":
        if not (isinstance(value, list) and len(value) == 2 and all(_is_num(v) for v in value) and value[0] < value[1]):
            raise ManifestError(f"field '{name}': expected [low, high] with low < high, got {value!r}")
        return (float(value[0]), float(value[1]))
    raise AssertionError(kind)


@dataclass
class Manifest:
    kind: str
    params: dict
    sha256: str
    path: str | None = None
    raw: dict = field(default_factory=dict, repr=False)

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        return self.params.get(key, default)


def parse_manifest(data: dict, kind: str, sha256: str = "", path: str | None = None) -> Manifest:
    """Validate ``data`` against the schema for ``kind`` and fill defaults."""
    if kind not in SCHEMAS:
        raise ManifestError(f"unknown experiment kind {kind!r}")
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a mapping")
    declared = data.get("kind")
    if declared is not None and declared != kind:
        raise ManifestError(f"manifest is for kind {declared!r}, not {kind!r}")
    schema = {**_COMMON, **SCHEMAS[kind]}
    unknown = sorted(set(data) - set(schema))
    if unknown:
        raise ManifestError(f"unknown field(s) for {kind}: {', '.join(unknown)}")
    params = {}
    for name, (typ, default) in schema.items():
        if name not in data:
            if default is REQUIRED:
                raise ManifestError(f"missing required field '{name}'")
            params[name] = _coerce(name, typ, default) if default is not None else None
            continue
        params[name] = _coerce(name, typ, data[name])
    if params["repetitions"] < 1:
        raise ManifestError("field 'repetitions': must be >= 1")
    if params["workers"] < 1:
        raise ManifestError("field 'workers': must be >= 1")
    _check_ranges(kind, params)
    params["kind"] = kind
    return Manifest(kind, params, sha256, path, dict(data))


def _check_ranges(kind: str, p: dict) -> None:
    ns = p.get("n")
    for n in ns if isinstance(ns, list) else [ns]:
        if n is not None and n < 2:
            raise ManifestError(f"field 'n': must be >= 2, got {n}")
    for g in p.get("gammas") or []:
        if g <= 2:
            raise ManifestError(f"field 'gammas': exponents must exceed 2, got {g}")
    if p.get("gamma") is not None and p["gamma"] <= 2:
        raise ManifestError(f"field 'gamma': must exceed 2, got {p['gamma']}")
    if kind in ("tvd-sweep", "min-walk-length") and p["method"] == "sampled" and p["R"] is None:
        raise ManifestError("field 'R': required when method is 'sampled'")
    if kind == "fit" and p["input"] is None and (p["model"] is None or p["n"] is None):
        raise ManifestError("missing required field 'input' (or 'model' and 'n' to generate a graph)")
    if kind == "multi-cycle" and isinstance(p["l"], list) and len(p["l"]) != len(p["gammas"]):
        raise ManifestError("field 'l': needs one walk length per cycle")
    if kind == "min-walk-length" and not 0 < p["epsilon"] < 1:
        raise ManifestError("field 'epsilon': must lie in (0, 1)")


def load_manifest(path: str | Path, kind: str) -> Manifest:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        data = yaml.safe_load(blob.decode("utf-8"))
    except (yaml.YAMLError, UnicodeDecodeError) as exc:
        raise ManifestError(f"cannot parse manifest {path}: {exc}") from exc
    if data is None:
        raise ManifestError(f"manifest {path} is empty")
    return parse_manifest(data, kind, hashlib.sha256(blob).hexdigest(), str(path))
