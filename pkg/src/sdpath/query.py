"""Path queries against a shortest-path tree."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretize import Discretization
from .errors import UnreachableTarget
from .sssp import ShortestPathTree
from .terrain import Point3, SurfacePoint, faces_containing


@dataclass
class PathPoint:
    coords: Point3
    on: str
    node: int = -1  # -1 for a query point that is not a node


@dataclass
class Path:
    points: list
    length: float

    @property
    def heights(self):
        return [p.coords.z for p in self.points]

    @property
    def nodes(self):
        return [p.node for p in self.points]

    def __len__(self):
        return len(self.points)

    def segment_lengths(self):
        xyz = np.array([[p.coords.x, p.coords.y, p.coords.z] for p in self.points])
        d = np.diff(xyz, axis=0)
        return np.sqrt((d * d).sum(axis=1))


def _node_point(disc, node):
    x, y, z = disc.xyz[node]
    return PathPoint(Point3(float(x), float(y), float(z)), disc.node_label(node), int(node))


def query_node(t: ShortestPathTree, disc: Discretization, v) -> Path:
    v = int(v)
    nodes = t.path_nodes(v)
    return Path([_node_point(disc, u) for u in nodes], float(t.dist[v]))


def candidate_nodes(disc: Discretization, v: SurfacePoint):
    """Nodes sharing a face with ``v`` that are not lower than it.

    For a point inside an edge the nodes of that edge are included too.
    """
    mesh = disc.mesh
    edges = set()
    for f in faces_containing(mesh, v):
        edges.update(int(e) for e in mesh.face_edges[f])
    if not edges:
        return np.zeros(0, dtype=np.int64)
    cand = np.unique(np.concatenate([disc.edge_nodes(e) for e in sorted(edges)]))
    return cand[disc.heights[cand] >= v.coords.z]


def query_point(t: ShortestPathTree, disc: Discretization, v: SurfacePoint) -> Path:
    cand = candidate_nodes(disc, v)
    cand = cand[np.isfinite(t.dist[cand])]
    if len(cand) == 0:
        raise UnreachableTarget(f"no descending path to {v.label()} found at this epsilon")
    p = v.coords
    d = disc.xyz[cand] - np.array([p.x, p.y, p.z])
    cost = t.dist[cand] + np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2])
    # cand is sorted, so argmin already returns the smallest id among ties
    k = int(np.argmin(cost))
    u = int(cand[k])
    head = query_node(t, disc, u)
    if math.dist(disc.xyz[u], (p.x, p.y, p.z)) == 0.0:
        return head
    last = PathPoint(p, v.label(), -1)
    return Path(head.points + [last], float(cost[k]))
