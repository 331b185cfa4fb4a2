"""JSON object files and CSV matrices.

Object files look like::

    {"version": "fgwkit/1", "n": 3, "d": 1,
     "features": [[0.0], [1.0], [0.0]],
     "structure": {"kind": "graph", "edges": [[0, 1, 1.0], [1, 2, 1.0]]},
     "weights": "uniform"}

``structure.kind`` is ``"matrix"`` (with a ``"matrix"`` entry) or
``"graph"`` (with ``"edges"``, turned into shortest-path distances).
Floats are written with ``repr`` so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Histogram, StructuredObject
from .exceptions import FGWError
from .toolkit.graph import GraphSpec, shortest_path_structure

VERSION = "fgwkit/1"


class ObjectFileError(FGWError, ValueError):
    """Malformed object file."""


def _matrix(x, name, shape=None):
    try:
        a = np.array(x, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ObjectFileError(f"{name}: not a numeric array ({exc})") from None
    if shape is not None and a.shape != shape:
        raise ObjectFileError(f"{name}: expected shape {shape}, got {a.shape}")
    return a


def object_from_dict(doc: dict) -> StructuredObject:
    """Build a :class:`StructuredObject` from a parsed object file."""
    if not isinstance(doc, dict):
        raise ObjectFileError("object file must contain a JSON object")
    version = doc.get("version", VERSION)
    if version != VERSION:
        raise ObjectFileError(f"unsupported version {version!r}")
    try:
        n, d = int(doc["n"]), int(doc["d"])
        struct = doc["structure"]
        kind = struct["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ObjectFileError(f"missing or invalid field: {exc}") from None
    if "features" not in doc:
        raise ObjectFileError("missing field 'features'")
    F = _matrix(doc["features"], "features")
    if F.size == n * d:
        F = F.reshape(n, d)
    if F.shape != (n, d):
        raise ObjectFileError(f"features: expected shape {(n, d)}, got {F.shape}")
    w = doc.get("weights", "uniform")
    weights = None if w == "uniform" else Histogram(_matrix(w, "weights", (n,))).weights
    if kind == "matrix":
        C = _matrix(struct.get("matrix"), "structure.matrix", (n, n))
        return StructuredObject(C, F, weights)
    if kind == "graph":
        edges = struct.get("edges", [])
        return shortest_path_structure(GraphSpec(n, edges, F, weights))
    raise ObjectFileError(f"unknown structure kind {kind!r}")


def object_to_dict(obj: StructuredObject) -> dict:
    """Serialise as a ``"matrix"`` object file; uniform weights are written as ``"uniform"``."""
    uniform = np.array_equal(obj.weights, np.full(obj.n, 1.0 / obj.n))
    return {
        "version": VERSION,
        "n": obj.n,
        "d": obj.d,
        "features": obj.features.tolist(),
        "structure": {"kind": "matrix", "matrix": obj.structure.tolist()},
        "weights": "uniform" if uniform else obj.weights.tolist(),
    }


def read_object(path) -> StructuredObject:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ObjectFileError(f"{path}: invalid JSON ({exc})") from None
    return object_from_dict(doc)


def write_object(obj: StructuredObject, path) -> None:
    Path(path).write_text(json.dumps(object_to_dict(obj)) + "\n")


def write_csv(path, M, header=None) -> None:
    """Write a 1D or 2D array as comma-separated ``%.17g`` values."""
    M = np.asarray(M)
    fmt = "%d" if np.issubdtype(M.dtype, np.integer) else "%.17g"
    np.savetxt(path, np.atleast_1d(M), fmt=fmt, delimiter=",",
               header="" if header is None else ",".join(header), comments="")


def read_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def read_object_list(path) -> list:
    """Read a text file listing one object path per line (relative to the list file)."""
    base = Path(path).parent
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            p = Path(line)
            out.append(read_object(p if p.is_absolute() else base / p))
    return out
