"""End-to-end solver: insert the source, discretize, search, answer queries."""
from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .discretize import MERGE_REL, discretize, hybrid_select
from .graph import DescentGraph
from .query import Path, query_node, query_point
from .sssp import solve
from .terrain import (
    SurfacePoint,
    TerrainMesh,
    geometry_params,
    insert_source,
    locate,
    vertex_point,
)


def as_surface_point(mesh, where):
    """Accept a vertex index, an ``(x, y)`` pair or a SurfacePoint."""
    if isinstance(where, SurfacePoint):
        return where
    if isinstance(where, (int, np.integer)):
        return vertex_point(mesh, int(where))
    x, y = where
    return locate(mesh, x, y)


class SDPSolver:
    """Preprocess one source at one epsilon; answer queries to any point.

    The solver works on a copy of the terrain in which the source is a
    vertex. Original vertex indices are kept; labels of edges refer to that
    copy.
    """

    def __init__(self, mesh: TerrainMesh, source, epsilon, scheme="hybrid", algo="bushwhack"):
        t0 = time.perf_counter()
        self.original = mesh
        src = as_surface_point(mesh, source)
        self.source_point = src
        self.mesh, self.source = insert_source(mesh, src)
        self.params = geometry_params(self.mesh)
        self.requested_scheme = scheme
        if scheme == "hybrid":
            self.choice = hybrid_select(self.params, epsilon)
            scheme = self.choice.scheme
        else:
            self.choice = None
        self.scheme = scheme
        self.epsilon = float(epsilon)
        self.algo = algo
        self.disc = discretize(self.mesh, epsilon, scheme, self.params)
        self.graph = DescentGraph(self.disc)
        t1 = time.perf_counter()
        self.tree = solve(self.graph, self.source, algo)
        t2 = time.perf_counter()
        self.timings = {"discretize_s": t1 - t0, "search_s": t2 - t1}

    def node_at(self, sp: SurfacePoint):
        """Node id coinciding with ``sp`` (on the solver mesh), or -1."""
        if sp.kind == "vertex":
            return sp.index
        if sp.kind != "edge":
            return -1
        nodes = self.disc.edge_nodes(sp.index)
        ts = self.disc.node_t[nodes[1:-1]]
        k = int(np.searchsorted(ts, sp.param))
        length = float(self.mesh.edge_lengths()[sp.index])
        tol = MERGE_REL * self.params.L
        for j in (k - 1, k):
            if 0 <= j < len(ts) and abs(ts[j] - sp.param) * length <= tol:
                return int(nodes[1 + j])
        return -1

    def locate(self, where) -> SurfacePoint:
        """Locate ``where`` on the solver mesh (vertex indices refer to the input).

        A SurfacePoint keeps its own coordinates when it lands in the same
        kind of carrier, so exact heights given by the caller survive.
        """
        if isinstance(where, (int, np.integer)):
            return vertex_point(self.mesh, int(where))
        if isinstance(where, SurfacePoint):
            sp = locate(self.mesh, where.coords.x, where.coords.y)
            if sp.kind == where.kind and sp.kind != "vertex":
                return replace(sp, coords=where.coords)
            return sp
        return locate(self.mesh, *where)

    def query(self, where) -> Path:
        sp = self.locate(where)
        node = self.node_at(sp)
        if node >= 0:
            return query_node(self.tree, self.disc, node)
        return query_point(self.tree, self.disc, sp)

    def summary(self):
        counts = self.disc.edge_counts()
        return {
            "scheme": self.scheme,
            "epsilon": self.epsilon,
            "algo": self.algo,
            "nodes_total": int(self.disc.n_nodes),
            "max_nodes_per_edge": int(counts.max()) if len(counts) else 0,
        }
