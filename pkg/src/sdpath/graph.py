"""Implicit descending-link graph over vertices and Steiner points."""
from __future__ import annotations

import numpy as np

from .discretize import Discretization
from .kernels import enumerate_successors, seg_len


class DescentGraph:
    """Links join two nodes on a common face when the first is not lower.

    Two nodes on one edge are linked only when both are vertices. Links are
    never stored; they are enumerated per node.
    """

    def __init__(self, disc: Discretization):
        self.disc = disc
        self.mesh = disc.mesh
        mesh = self.mesh
        self.n_nodes = disc.n_nodes
        self.xyz = disc.xyz
        self.heights = disc.xyz[:, 2]
        # position of every node inside its edge chain (vertices: 0)
        pos = np.zeros(self.n_nodes, dtype=np.int64)
        counts = disc.edge_counts()
        inner = np.concatenate([np.arange(1, c - 1) for c in counts]) if len(counts) else np.zeros(0, np.int64)
        pos[mesh.n_vertices :] = inner
        self.node_pos = pos
        self._build_pairs()
        self._buf = np.empty(max(self.n_nodes, 1), dtype=np.int64)

    def _build_pairs(self):
        mesh = self.mesh
        F = mesh.n_faces
        src = np.empty(6 * F, dtype=np.int64)
        dst = np.empty(6 * F, dtype=np.int64)
        k = 0
        for i in range(3):
            for j in range(3):
                if i != j:
                    src[k::6] = mesh.face_edges[:, i]
                    dst[k::6] = mesh.face_edges[:, j]
                    k += 1
        E = mesh.edges
        ea, eb = E[src, 0], E[src, 1]
        da, db = E[dst, 0], E[dst, 1]
        common = np.where((ea == da) | (ea == db), ea, eb)
        self.pair_src = src
        self.pair_dst = dst
        self.pair_common = common
        self.pair_src_flip = (E[src, 1] == common).astype(np.int64)
        self.pair_dst_flip = (E[dst, 1] == common).astype(np.int64)
        counts = self.disc.edge_counts()
        src_len = counts[src]
        self.pair_soff = _offsets(src_len)
        w0 = (src_len + 63) // 64
        w1 = (w0 + 63) // 64
        w2 = (w1 + 63) // 64
        self.pair_b0 = _offsets(w0)
        self.pair_b1 = _offsets(w1)
        self.pair_b2 = _offsets(w2)
        edge_pairs = np.full((mesh.n_edges, 4), -1, dtype=np.int64)
        fill = np.zeros(mesh.n_edges, dtype=np.int64)
        for p, e in enumerate(src):
            edge_pairs[e, fill[e]] = p
            fill[e] += 1
        self.edge_pairs = edge_pairs

    # kernel argument bundles -------------------------------------------------

    def topology_args(self):
        d, m = self.disc, self.mesh
        return (
            d.xyz, m.n_vertices, d.node_edge, d.chain_ptr, d.chain_nodes, m.edges, m.faces,
            m.edge_faces, m.face_edges, m.vertex_faces_ptr, m.vertex_faces,
            m.vertex_edges_ptr, m.vertex_edges,
        )

    def interval_args(self):
        d, m = self.disc, self.mesh
        return (
            d.xyz, m.n_vertices, d.node_edge, self.node_pos, d.chain_ptr, d.chain_nodes,
            m.edges, m.faces, m.edge_faces, m.face_edges, m.vertex_faces_ptr, m.vertex_faces,
            m.vertex_edges_ptr, m.vertex_edges, self.pair_src, self.pair_dst,
            self.pair_src_flip, self.pair_dst_flip, self.pair_soff, self.pair_b0, self.pair_b1,
            self.pair_b2, self.edge_pairs,
        )

    # node carriers -----------------------------------------------------------

    def node_faces(self, x):
        m = self.mesh
        if x < m.n_vertices:
            return sorted(int(f) for f in m.faces_of_vertex(x))
        return sorted(int(f) for f in m.faces_of_edge(int(self.disc.node_edge[x])))

    def node_edges(self, x):
        m = self.mesh
        if x < m.n_vertices:
            return {int(e) for e in m.edges_of_vertex(x)}
        return {int(self.disc.node_edge[x])}

    def weight(self, x, y):
        return float(seg_len(self.xyz, int(x), int(y)))

    def link_allowed(self, x, y):
        x, y = int(x), int(y)
        if x == y:
            return False
        if not set(self.node_faces(x)) & set(self.node_faces(y)):
            return False
        if self.heights[x] < self.heights[y]:
            return False
        nv = self.mesh.n_vertices
        if (x >= nv or y >= nv) and self.node_edges(x) & self.node_edges(y):
            return False
        return True

    def successor_ids(self, x):
        """Successor ids in kernel order (fast, unordered contract)."""
        n = enumerate_successors(int(x), *self.topology_args(), self._buf)
        return self._buf[:n].copy()

    def successors(self, x):
        """``(node, weight)`` pairs ordered by face, then face edge, then chain position."""
        x = int(x)
        d = self.disc
        m = self.mesh
        nv = m.n_vertices
        cand = []
        for f in self.node_faces(x):
            for e in m.face_edges[f]:
                cand.append(d.edge_nodes(e))
        if not cand:
            return []
        cand = np.concatenate(cand)
        _, first = np.unique(cand, return_index=True)
        cand = cand[np.sort(first)]
        keep = (cand != x) & (self.heights[cand] <= self.heights[x])
        own = self.node_edges(x)
        if x >= nv:
            (ex,) = own
            on_edge = (d.node_edge[cand] == ex) | np.isin(cand, m.edges[ex])
        else:
            on_edge = np.isin(d.node_edge[cand], list(own)) & (cand >= nv)
        cand = cand[keep & ~on_edge]
        return [(int(y), self.weight(x, y)) for y in cand]

    def links(self):
        """Every link as ``(x, y, w)`` arrays (small graphs only)."""
        xs, ys = [], []
        for x in range(self.n_nodes):
            ids = self.successor_ids(x)
            xs.append(np.full(len(ids), x, dtype=np.int64))
            ys.append(ids)
        xs = np.concatenate(xs)
        ys = np.concatenate(ys)
        dv = self.xyz[ys] - self.xyz[xs]
        w = np.sqrt(dv[:, 0] * dv[:, 0] + dv[:, 1] * dv[:, 1] + dv[:, 2] * dv[:, 2])
        return xs, ys, w


def _offsets(sizes):
    off = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=off[1:])
    return off
