"""Canonical JSON helpers and step-function/weight file I/O.

Output determinism contract: same inputs produce byte-identical files.  That
means sorted keys, fixed separators, eager conversion of numpy scalars and
arrays to plain Python, shortest-round-trip float repr (json's default), no
timestamps, and non-finite floats mapped to null.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grid import DyadicGrid, StepFunction
from .weights import Weight

__all__ = [
    "to_jsonable",
    "dumps_canonical",
    "write_json",
    "read_json",
    "save_step_function",
    "load_step_function",
    "load_weight",
]


def to_jsonable(obj):
    """Recursively convert to plain JSON-serializable Python values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":")) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(dumps_canonical(obj), encoding="utf-8")


def read_json(path: str | Path):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {p}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p} is not valid JSON: {e}") from e


def save_step_function(path: str | Path, f: StepFunction, role: str, spec: dict | None = None) -> None:
    """Write a leaf-value file.  role is "weight" or "symbol" (documentation of
    intent; load_weight enforces positivity regardless)."""
    doc = {
        "type": role,
        "depth": f.grid.depth,
        "values": f.values,
    }
    if spec is not None:
        doc["spec"] = spec
    write_json(path, doc)


def _parse_leaf_file(path: str | Path) -> tuple[str, StepFunction]:
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected an object with depth and values")
    for key in ("depth", "values"):
        if key not in doc:
            raise ConfigError(f"{path}: missing field {key!r}")
    try:
        depth = int(doc["depth"])
        grid = DyadicGrid(depth)
        f = StepFunction(grid, doc["values"])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path}: {e}") from e
    return str(doc.get("type", "")), f


def load_step_function(path: str | Path) -> StepFunction:
    _, f = _parse_leaf_file(path)
    return f


def load_weight(path: str | Path) -> Weight:
    _, f = _parse_leaf_file(path)
    try:
        return Weight(f)
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e
