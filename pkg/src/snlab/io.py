"""File formats and deterministic report serialization.

Graphs arrive as JSON ({"type": "weighted_graph", ...}) or as plain edge
lists ("u v w" per line); finite metrics as {"type": "finite_metric", ...}.
Weights and distances may be exact rational strings.  All emitted JSON is
canonical: sorted keys, rationals as "p/q" strings, no wall-clock content,
so identical inputs produce byte-identical outputs.
"""
from __future__ import annotations

import csv
import dataclasses
import io as _io
import json
from fractions import Fraction
from pathlib import Path

from .errors import FileFormatError
from .exact import as_exact, format_number
from .metric_graph import WeightedGraph, induced_metric, validate_metric_graph
from .zoo import FiniteMetricSpace


# -- loading ------------------------------------------------------------------


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FileFormatError(path, f"cannot read file: {exc}") from exc


def load_weighted_graph(path) -> WeightedGraph:
    """Read a weighted graph from JSON or an edge-list text file."""
    path = Path(path)
    text = _read_text(path)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FileFormatError(path, f"invalid JSON: {exc}", exc.lineno) from exc
        if payload.get("type") != "weighted_graph":
            raise FileFormatError(path, "expected \"type\": \"weighted_graph\"")
        edges = []
        for i, edge in enumerate(payload.get("edges", [])):
            if len(edge) == 2:
                u, v = edge
                w = 1
            elif len(edge) == 3:
                u, v, w = edge
            else:
                raise FileFormatError(path, f"edge #{i} must be [u, v] or [u, v, w]")
            try:
                edges.append((str(u), str(v), as_exact(w)))
            except ValueError as exc:
                raise FileFormatError(path, f"edge #{i}: {exc}") from exc
        extra = [str(v) for v in payload.get("vertices", [])]
        return WeightedGraph(edges, id=path.stem, extra_vertices=extra)

    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) not in (2, 3):
            raise FileFormatError(path, "expected 'u v [w]'", lineno)
        w = parts[2] if len(parts) == 3 else 1
        try:
            edges.append((parts[0], parts[1], as_exact(w)))
        except ValueError as exc:
            raise FileFormatError(path, str(exc), lineno) from exc
    if not edges:
        raise FileFormatError(path, "no edges found")
    return WeightedGraph(edges, id=path.stem)


def load_finite_metric(path, level_tolerance: float = 1e-9) -> FiniteMetricSpace:
    """Read an explicit finite metric; rational strings keep exact mode."""
    path = Path(path)
    try:
        payload = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise FileFormatError(path, f"invalid JSON: {exc}", exc.lineno) from exc
    if payload.get("type") != "finite_metric":
        raise FileFormatError(path, "expected \"type\": \"finite_metric\"")
    points = [str(p) for p in payload.get("points", [])]
    rows = payload.get("distances")
    if not points or not isinstance(rows, list):
        raise FileFormatError(path, "need \"points\" and a \"distances\" matrix")
    any_float = False
    matrix = []
    for i, row in enumerate(rows):
        if len(row) != len(points):
            raise FileFormatError(path, f"distance row #{i} has wrong length")
        converted = []
        for x in row:
            if isinstance(x, float) and not x.is_integer():
                any_float = True
                converted.append(x)
            else:
                try:
                    converted.append(as_exact(x))
                except ValueError as exc:
                    raise FileFormatError(path, f"row #{i}: {exc}") from exc
        matrix.append(converted)
    arithmetic = "float" if any_float else "exact"
    return FiniteMetricSpace(points, matrix, id=path.stem, arithmetic=arithmetic,
                             level_tolerance=level_tolerance, check=True)


def load_space(path):
    """Load a user space: a validated weighted graph or a finite metric."""
    path = Path(path)
    text = path.read_text().lstrip()
    if text.startswith("{"):
        kind = json.loads(path.read_text()).get("type")
        if kind == "finite_metric":
            return load_finite_metric(path)
        if kind == "weighted_graph":
            graph = load_weighted_graph(path)
            validate_metric_graph(graph)
            return induced_metric(graph)
        raise FileFormatError(path, f"unknown file type {kind!r}")
    graph = load_weighted_graph(path)
    validate_metric_graph(graph)
    return induced_metric(graph)


# -- serialization --------------------------------------------------------------


def jsonable(value):
    """Recursively convert library objects to canonical JSON-ready values."""
    if isinstance(value, Fraction):
        return format_number(value)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        out = {}
        for f in dataclasses.fields(value):
            if not f.repr:
                continue  # point sets etc. are carried by their label fields
            out[f.name] = jsonable(getattr(value, f.name))
        return out
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(str(v) for v in value)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def dump_json(payload) -> str:
    return json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"


def dump_csv(rows, fieldnames) -> str:
    """Rows of dicts to CSV text with a fixed column order and LF endings."""
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row.get(k)) for k in fieldnames})
    return buf.getvalue()


def _csv_cell(value):
    if isinstance(value, Fraction):
        return format_number(value)
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    return value
