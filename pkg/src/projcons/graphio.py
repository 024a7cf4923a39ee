"""Graph files and report serialization.

Two graph formats are accepted, both with 1-based vertices:

* edge-list text, one ``i j w`` arc per line, ``#`` starts a comment, and an
  optional ``n <count>`` line declares the vertex count (needed only when
  the highest-numbered vertices have no arcs);
* a JSON document ``{"n": 7, "edges": [[1, 3, 3], ...]}``.

Weights may be integers, decimals or ``p/q`` fractions and are read exactly.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .digraph import WeightedDigraph
from .exceptions import GraphFormatError
from .matrix_kernel import as_fraction, is_exact

__all__ = [
    "format_scalar",
    "matrix_from_json",
    "matrix_to_json",
    "parse_graph",
    "parse_vector",
    "read_graph",
    "vector_to_json",
]


def _weight(token, lineno=None):
    try:
        w = as_fraction(token)
    except (ValueError, ZeroDivisionError, TypeError):
        raise GraphFormatError(f"bad weight {token!r}", lineno) from None
    if w <= 0:
        raise GraphFormatError(f"weight must be positive, got {token}", lineno)
    return w


def _vertex(token, lineno=None):
    try:
        v = int(token)
    except (ValueError, TypeError):
        raise GraphFormatError(f"bad vertex {token!r}", lineno) from None
    if v < 1:
        raise GraphFormatError(f"vertices are 1-based, got {v}", lineno)
    return v


def _build(n, edges, lineno_of=None):
    if n is None:
        n = max((max(i, j) for i, j, _ in edges), default=0)
    if n < 1:
        raise GraphFormatError("graph has no vertices; add an 'n <count>' line")
    arcs, seen = [], set()
    for k, (i, j, w) in enumerate(edges):
        ln = lineno_of[k] if lineno_of else None
        if i > n or j > n:
            raise GraphFormatError(f"vertex out of range 1..{n}", ln)
        if i == j:
            raise GraphFormatError(f"self-loop at vertex {i}", ln)
        if (i, j) in seen:
            raise GraphFormatError(f"duplicate arc {i} -> {j}", ln)
        seen.add((i, j))
        arcs.append((i - 1, j - 1, w))
    return WeightedDigraph(n, tuple(arcs))


def _parse_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or "edges" not in doc:
        raise GraphFormatError("JSON graph needs an 'edges' array")
    n = doc.get("n")
    if n is not None and (not isinstance(n, int) or n < 1):
        raise GraphFormatError(f"'n' must be a positive integer, got {n!r}")
    edges = []
    for k, e in enumerate(doc["edges"]):
        if not isinstance(e, (list, tuple)) or len(e) != 3:
            raise GraphFormatError(f"edge #{k + 1} must be [i, j, w]")
        i, j, w = e
        if isinstance(w, float):
            w = repr(w)
        edges.append((_vertex(i), _vertex(j), _weight(str(w))))
    return _build(n, edges)


def _parse_edge_list(text):
    n = None
    edges, linenos = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].lower() == "n":
            if len(parts) != 2:
                raise GraphFormatError("expected 'n <count>'", lineno)
            n = _vertex(parts[1], lineno)
            continue
        if len(parts) != 3:
            raise GraphFormatError(f"expected 'i j w', got {line!r}", lineno)
        edges.append((_vertex(parts[0], lineno), _vertex(parts[1], lineno),
                      _weight(parts[2], lineno)))
        linenos.append(lineno)
    return _build(n, edges, linenos)


def parse_graph(text: str) -> WeightedDigraph:
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    return _parse_edge_list(text)


def read_graph(path) -> WeightedDigraph:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_graph(text)


def parse_vector(text: str, n=None) -> np.ndarray:
    """Comma-separated rationals as an exact vector."""
    try:
        vals = [as_fraction(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse vector {text!r}") from None
    if n is not None and len(vals) != n:
        raise ValueError(f"vector has {len(vals)} entries, expected {n}")
    return np.array(vals, dtype=object)


def format_scalar(x):
    """Fractions become ``"p/q"`` strings; reals keep 12 significant digits."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [format_scalar(float(x.real)), format_scalar(float(x.imag))]
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        return str(x)
    v = float(f"{x:.12g}")
    return 0.0 if v == 0 else v


def vector_to_json(v):
    return [format_scalar(x) for x in np.asarray(v).ravel()]


def matrix_to_json(M) -> dict:
    M = np.asarray(M)
    return {
        "backend": "exact" if is_exact(M) else "float",
        "rows": [[format_scalar(x) for x in row] for row in M],
    }


def matrix_from_json(doc) -> np.ndarray:
    rows = doc["rows"]
    if doc.get("backend") == "exact":
        return np.array([[Fraction(x) for x in row] for row in rows], dtype=object)
    return np.array(rows, dtype=float)
