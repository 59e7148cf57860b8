"""Matrix file format.

A JSON document::

    {"n": 3, "mode": "rational", "entries": ["1", "20", "1/2", ...]}

``entries`` is row-major and flat (a nested list of rows is also accepted on
read). In rational mode every entry is a string ``"p/q"`` (or ``"p"``), so a
write/read cycle is bit-exact; in float mode entries are JSON numbers.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .linalg_core import RationalMatrix


def _flatten(entries):
    if entries and isinstance(entries[0], list):
        return [x for row in entries for x in row]
    return list(entries)


def matrix_to_dict(M) -> dict:
    if isinstance(M, RationalMatrix):
        return {"n": M.n, "mode": "rational", "entries": [str(x) for x in M.entries()]}
    A = np.asarray(M, dtype=float)
    return {"n": int(A.shape[0]), "mode": "float", "entries": [float(x) for x in A.ravel()]}


def matrix_from_dict(doc: dict):
    """Returns a RationalMatrix in rational mode, a float ndarray otherwise."""
    n = int(doc["n"])
    mode = doc.get("mode", "float")
    flat = _flatten(doc["entries"])
    if len(flat) != n * n:
        raise ValueError(f"expected {n * n} entries for n={n}, got {len(flat)}")
    if mode == "rational":
        vals = [Fraction(str(x)) for x in flat]
        return RationalMatrix(tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n)))
    if mode == "float":
        return np.array(flat, dtype=float).reshape(n, n)
    raise ValueError(f"unknown matrix mode {mode!r}")


def read_matrix(path):
    return matrix_from_dict(json.loads(Path(path).read_text()))


def write_matrix(path, M) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(M), indent=1) + "\n")
