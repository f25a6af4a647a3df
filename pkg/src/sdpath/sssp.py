"""Single-source shortest paths over a :class:`DescentGraph`."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnreachableTarget
from .graph import DescentGraph
from .kernels import bushwhack_kernel, dijkstra_kernel


@dataclass
class ShortestPathTree:
    source: int
    dist: np.ndarray  # inf where unreachable
    parent: np.ndarray  # -1 for the source and unreachable nodes
    algo: str = "dijkstra"
    stats: dict = field(default_factory=dict)

    def reachable(self, v):
        return bool(np.isfinite(self.dist[v]))

    def path_nodes(self, v):
        v = int(v)
        if not self.reachable(v):
            raise UnreachableTarget(f"node {v} is not reachable from node {self.source}")
        out = [v]
        while out[-1] != self.source:
            out.append(int(self.parent[out[-1]]))
            if len(out) > len(self.dist):
                raise RuntimeError("parent chain does not reach the source")
        out.reverse()
        return out


@dataclass
class NodePath:
    nodes: list
    length: float


def dijkstra(g: DescentGraph, s) -> ShortestPathTree:
    dist, parent, stats = dijkstra_kernel(int(s), *g.topology_args())
    return ShortestPathTree(int(s), dist, parent, "dijkstra", {"pops": int(stats[0]), "pushes": int(stats[1])})


def bushwhack(g: DescentGraph, s, check=False) -> ShortestPathTree:
    """Interval-based search; ``check`` verifies every claim by brute force."""
    dist, parent, stats = bushwhack_kernel(int(s), *g.interval_args(), bool(check))
    names = ("pops", "pushes", "claims", "runs_touched", "iterators", "claim_violations")
    return ShortestPathTree(int(s), dist, parent, "bushwhack", {k: int(v) for k, v in zip(names, stats)})


def solve(g: DescentGraph, s, algo="bushwhack") -> ShortestPathTree:
    if algo == "dijkstra":
        return dijkstra(g, s)
    if algo == "bushwhack":
        return bushwhack(g, s)
    raise ValueError(f"unknown algorithm {algo!r}")


def extract_path(t: ShortestPathTree, v) -> NodePath:
    nodes = t.path_nodes(v)
    return NodePath(nodes, float(t.dist[int(v)]))
