"""JSON serialization for paths and shortest-path trees."""
from __future__ import annotations

import json
import math

import numpy as np

SCHEMA_VERSION = 1


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _dump(obj, indent, level):
    """Minimal JSON writer that prints floats with 17 significant digits."""
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = "," + nl if indent else ", "
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + nl + sep.join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_dump(v, indent, level + 1)}" for v in obj]
        return "[" + nl + sep.join(items) + nl + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return json.dumps(str(obj))


def dumps(obj, indent=2):
    return _dump(obj, indent, 0) + "\n"


def _point_obj(coords, on):
    return {"x": coords.x, "y": coords.y, "z": coords.z, "on": on}


def path_to_dict(path, source=None, target=None, epsilon=None, scheme=None, algo=None):
    first = path.points[0]
    last = path.points[-1]
    return {
        "schema_version": SCHEMA_VERSION,
        "source": source if source is not None else _point_obj(first.coords, first.on),
        "target": target if target is not None else _point_obj(last.coords, last.on),
        "epsilon": epsilon,
        "scheme": scheme,
        "algo": algo,
        "length": path.length,
        "nodes": [_point_obj(p.coords, p.on) for p in path.points],
    }


def export_path_json(path, source=None, target=None, epsilon=None, scheme=None, algo=None, indent=2):
    return dumps(path_to_dict(path, source, target, epsilon, scheme, algo), indent)


def load_path_json(text):
    data = json.loads(text)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
    return data


def path_length_from_json(data):
    xyz = np.array([[p["x"], p["y"], p["z"]] for p in data["nodes"]], dtype=np.float64)
    if len(xyz) < 2:
        return 0.0
    d = np.diff(xyz, axis=0)
    return float(np.sqrt((d * d).sum(axis=1)).sum())


def tree_to_dict(tree):
    nodes = []
    for v in np.nonzero(np.isfinite(tree.dist))[0]:
        p = int(tree.parent[v])
        nodes.append({"id": int(v), "dist": float(tree.dist[v]), "parent": None if p < 0 else p})
    return {"schema_version": SCHEMA_VERSION, "source": int(tree.source), "algo": tree.algo, "nodes": nodes}


def export_tree_json(tree, indent=None):
    return dumps(tree_to_dict(tree), indent)
