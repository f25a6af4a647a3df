"""Benchmark harness producing one CSV row per configuration."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass

import numpy as np

from .discretize import scheme_bound
from .errors import PointOffTerrain, UnreachableTarget
from .oracle import gen_random_terrain, gen_star_pyramid
from .pipeline import SDPSolver
from .terrain import TerrainMesh, geometry_params, load_terrain, locate

COLUMNS = [
    "terrain", "n", "L_over_h", "theta_deg", "eps", "scheme", "algo", "nodes_total",
    "max_nodes_per_edge", "bound_per_edge", "preprocess_ms", "query_ms_avg", "path_len",
]


@dataclass
class CorpusEntry:
    name: str
    mesh: TerrainMesh


def parse_terrain_spec(spec) -> CorpusEntry:
    """``random:n=10:seed=1[:levels=5]``, ``star:k=5`` or a path to a TER file."""
    kind, _, rest = spec.partition(":")
    opts = {}
    for part in filter(None, rest.split(":")):
        key, _, val = part.partition("=")
        opts[key] = val
    if kind == "random":
        levels = opts.get("levels", "5")
        mesh = gen_random_terrain(
            int(opts.get("n", 10)),
            int(opts.get("seed", 0)),
            levels=None if levels in ("none", "0") else int(levels),
        )
        return CorpusEntry(spec, mesh)
    if kind == "star":
        sp = gen_star_pyramid(int(opts.get("k", 5)))
        return CorpusEntry(spec, sp.mesh)
    with open(spec, encoding="utf-8") as fh:
        return CorpusEntry(spec, load_terrain(fh.read()))


def query_points(mesh, count, seed):
    """Deterministic sample of ``count`` points on the terrain."""
    rng = np.random.default_rng(seed)
    lo = mesh.vertices[:, :2].min(axis=0)
    hi = mesh.vertices[:, :2].max(axis=0)
    out = []
    for _ in range(100 * count):
        if len(out) == count:
            break
        x, y = rng.uniform(lo, hi)
        try:
            locate(mesh, x, y)
        except PointOffTerrain:
            continue
        out.append((float(x), float(y)))
    return out


def bench_rows(corpus, eps_list, schemes, algos, n_queries=5, seed=0):
    for entry in corpus:
        mesh = entry.mesh
        gp = geometry_params(mesh)
        source = int(np.argmax(mesh.vertices[:, 2]))
        targets = query_points(mesh, n_queries, seed)
        for eps in eps_list:
            for scheme in schemes:
                for algo in algos:
                    t0 = time.perf_counter()
                    solver = SDPSolver(mesh, source, eps, scheme, algo)
                    t1 = time.perf_counter()
                    lengths = []
                    for xy in targets:
                        try:
                            lengths.append(solver.query(xy).length)
                        except UnreachableTarget:
                            pass
                    t2 = time.perf_counter()
                    counts = solver.disc.edge_counts()
                    yield {
                        "terrain": entry.name,
                        "n": gp.n,
                        "L_over_h": gp.Xprime,
                        "theta_deg": math.degrees(gp.theta),
                        "eps": eps,
                        "scheme": solver.scheme,
                        "algo": algo,
                        "nodes_total": solver.disc.n_nodes,
                        "max_nodes_per_edge": int(counts.max()),
                        "bound_per_edge": scheme_bound(solver.scheme, solver.params, eps),
                        "preprocess_ms": 1000.0 * (t1 - t0),
                        "query_ms_avg": 1000.0 * (t2 - t1) / max(1, len(targets)),
                        "path_len": float(np.mean(lengths)) if lengths else float("nan"),
                    }


def run_bench(corpus, eps_list, schemes, algos, n_queries=5, seed=0, out=None):
    """Write the CSV to ``out`` (a text stream) or return it as a string."""
    buf = out if out is not None else io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in bench_rows(corpus, eps_list, schemes, algos, n_queries, seed):
        writer.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in row.items()})
    if out is None:
        return buf.getvalue()
    return None
