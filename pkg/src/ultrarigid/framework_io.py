"""JSON framework files.

A file looks like::

    {
      "dim": 2,
      "vertices": [{"id": "a", "p": ["0", "1/2"]}],
      "lattice": [["1", "0"], ["0", "1"]],
      "edges": [{"tail": "a", "head": "a", "gamma": [1, 0]}],
      "model": "flexible"
    }

Coordinates are exact rationals written as ``"num/den"`` strings or
integers.  ``lattice`` is given row by row; its columns are the images of
the standard basis vectors.  Floating point values are rejected.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core_model import ColoredGraph, Edge, Framework, GraphError, validate

__all__ = ["FrameworkFileError", "parse_framework", "load_framework", "dump_framework", "framework_to_dict"]

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_MODELS = ("flexible", "fixed-lattice", "fixed-volume")


class FrameworkFileError(GraphError):
    """The framework file is malformed."""


def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise FrameworkFileError(f"{where}: {value!r} is not an exact rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value.strip()):
        num, _, den = value.strip().partition("/")
        if den and int(den) == 0:
            raise FrameworkFileError(f"{where}: zero denominator in {value!r}")
        return Fraction(int(num), int(den) if den else 1)
    raise FrameworkFileError(f"{where}: {value!r} is not an exact rational")


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FrameworkFileError(f"{where}: {value!r} is not an integer")
    return value


def _require(data: dict, key: str, kind: type) -> Any:
    if key not in data:
        raise FrameworkFileError(f"missing field {key!r}")
    if not isinstance(data[key], kind):
        raise FrameworkFileError(f"field {key!r} has the wrong type")
    return data[key]


def parse_framework(data: dict | str) -> Framework:
    """Build a :class:`Framework` from a decoded (or raw JSON) document."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise FrameworkFileError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FrameworkFileError("a framework file must hold a JSON object")
    dim = _integer(_require(data, "dim", int), "dim")
    if dim < 1:
        raise FrameworkFileError("dim must be positive")
    vertices = _require(data, "vertices", list)
    ids: dict[str, int] = {}
    labels, positions = [], []
    for i, v in enumerate(vertices):
        if not isinstance(v, dict) or "id" not in v or "p" not in v:
            raise FrameworkFileError(f"vertex {i}: needs 'id' and 'p'")
        key = str(v["id"])
        if key in ids:
            raise FrameworkFileError(f"duplicate vertex id {key!r}")
        ids[key] = i
        labels.append(key)
        p = v["p"]
        if not isinstance(p, list) or len(p) != dim:
            raise FrameworkFileError(f"vertex {key}: position must have {dim} coordinates")
        positions.append(tuple(_rational(x, f"vertex {key}") for x in p))
    lattice = _require(data, "lattice", list)
    if len(lattice) != dim or any(not isinstance(r, list) or len(r) != dim for r in lattice):
        raise FrameworkFileError(f"lattice must be a {dim}x{dim} array")
    lat = tuple(tuple(_rational(x, "lattice") for x in row) for row in lattice)
    edges = []
    for i, e in enumerate(_require(data, "edges", list)):
        if not isinstance(e, dict) or not {"tail", "head", "gamma"} <= e.keys():
            raise FrameworkFileError(f"edge {i}: needs 'tail', 'head' and 'gamma'")
        tail, head = str(e["tail"]), str(e["head"])
        for end in (tail, head):
            if end not in ids:
                raise FrameworkFileError(f"edge {i}: unknown vertex {end!r}")
        gamma = e["gamma"]
        if not isinstance(gamma, list) or len(gamma) != dim:
            raise FrameworkFileError(f"edge {i}: gamma must have {dim} integer entries")
        edges.append(Edge(ids[tail], ids[head], tuple(_integer(c, f"edge {i}") for c in gamma)))
    model = data.get("model")
    if model is not None and model not in _MODELS:
        raise FrameworkFileError(f"unknown model {model!r}")
    graph = ColoredGraph(dim, len(vertices), tuple(edges), tuple(labels))
    problems = validate(graph)
    if problems:
        raise FrameworkFileError(problems[0])
    return Framework(graph, tuple(positions), lat, model)


def load_framework(path: str | Path) -> Framework:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FrameworkFileError(f"cannot read {path}: {exc}") from exc
    return parse_framework(text)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def framework_to_dict(fw: Framework) -> dict:
    g = fw.graph
    out = {
        "dim": g.dim,
        "vertices": [{"id": g.label(i), "p": [_fmt(x) for x in fw.positions[i]]} for i in range(g.n_vertices)],
        "lattice": [[_fmt(x) for x in row] for row in fw.lattice],
        "edges": [{"tail": g.label(e.tail), "head": g.label(e.head), "gamma": list(e.color)} for e in g.edges],
    }
    if fw.model is not None:
        out["model"] = fw.model
    return out


def dump_framework(fw: Framework) -> str:
    return json.dumps(framework_to_dict(fw), indent=2) + "\n"
