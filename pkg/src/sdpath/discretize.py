"""Steiner-point placement along terrain edges.

Two placement rules are provided:

* ``uniform``: horizontal planes at every positive multiple of a height step
  plus the planes through every vertex, and evenly spaced points on level
  edges.
* ``geometric``: points at geometrically growing distances from both ends of
  every edge, transferred to every other edge at equal height.

Node numbering is fixed: vertices keep their indices ``0..n-1``; Steiner
points follow edge by edge (edges in index order), each edge's points in
increasing ``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidEpsilon
from .terrain import GeometryParams, TerrainMesh, geometry_params

MERGE_REL = 1e-12
MAX_EDGE_NODES = 50_000_000  # refuse builds that cannot fit in memory
_INT_MAX = int(np.iinfo(np.int64).max)

# origin codes; on a merge the smallest code supplies the kept position
VERTEX_PLANE = 0
ISO_VERTEX = 1
PLANE = 2
ISO_PRIMARY = 3
PRIMARY = 4
LEVEL_SPACING = 5
_CODE_NAMES = {
    VERTEX_PLANE: "vertex_plane",
    ISO_VERTEX: "isohypse",
    PLANE: "plane",
    ISO_PRIMARY: "isohypse",
    PRIMARY: "primary",
    LEVEL_SPACING: "level_spacing",
}


def origin_tag(code, ref):
    """Readable origin tuple for a code and its reference triple."""
    a, b, c = (int(r) for r in ref)
    if code == VERTEX_PLANE:
        return ("vertex_plane", a)
    if code == PLANE:
        return ("plane", a)
    if code == LEVEL_SPACING:
        return ("level_spacing", a)
    if code == PRIMARY:
        return ("primary", a, b)
    if code == ISO_VERTEX:
        return ("isohypse", ("vertex", a))
    if code == ISO_PRIMARY:
        return ("isohypse", ("primary", a, b, c))
    raise ValueError(code)


def origin_label(code, ref):
    tag = origin_tag(code, ref)
    if tag[0] == "isohypse":
        return "isohypse:" + ":".join(str(x) for x in tag[1])
    return ":".join(str(x) for x in tag)


@dataclass(frozen=True)
class SteinerPoint:
    edge: int
    t: float
    height: float
    origin: tuple
    node: int
    extra_origins: tuple = ()


@dataclass(frozen=True)
class VertexVicinity:
    vertex: int
    radius: float


@dataclass
class Discretization:
    scheme: str
    epsilon: float
    params: GeometryParams
    mesh: TerrainMesh
    steps: dict
    xyz: np.ndarray  # (N, 3) node coordinates; column 2 is the stored height
    node_edge: np.ndarray  # edge of each Steiner node, -1 for vertices
    node_t: np.ndarray  # position along node_edge (0 for vertices)
    chain_ptr: np.ndarray  # (E+1,) CSR offsets into chain_nodes
    chain_nodes: np.ndarray  # per-edge node ids sorted by t, endpoints included
    origin_code: np.ndarray  # -1 for vertices
    origin_ref: np.ndarray  # (N, 3)
    extra_origins: dict = field(default_factory=dict)

    @property
    def n_nodes(self):
        return len(self.xyz)

    @property
    def heights(self):
        return self.xyz[:, 2]

    @property
    def n_steiner(self):
        return self.n_nodes - self.mesh.n_vertices

    def edge_nodes(self, e):
        return self.chain_nodes[self.chain_ptr[e] : self.chain_ptr[e + 1]]

    def edge_counts(self):
        """Nodes on each edge, endpoints included."""
        return np.diff(self.chain_ptr)

    def is_vertex(self, node):
        return node < self.mesh.n_vertices

    def steiner_points(self, e):
        out = []
        for node in self.edge_nodes(e)[1:-1]:
            node = int(node)
            extra = tuple(origin_tag(c, r) for c, r in self.extra_origins.get(node, ()))
            out.append(
                SteinerPoint(
                    edge=int(e),
                    t=float(self.node_t[node]),
                    height=float(self.xyz[node, 2]),
                    origin=origin_tag(self.origin_code[node], self.origin_ref[node]),
                    node=node,
                    extra_origins=extra,
                )
            )
        return out

    def vicinities(self):
        if self.scheme != "geometric":
            return []
        r = self.steps["delta1"]
        return [VertexVicinity(v, r) for v in range(self.mesh.n_vertices)]

    def node_label(self, node):
        node = int(node)
        if node < self.mesh.n_vertices:
            return f"vertex:{node}"
        return f"edge:{int(self.node_edge[node])}@{float(self.node_t[node]):.12g}"

    def write_steiner_csv(self, fh):
        fh.write("edge_index,t,x,y,z,origin\n")
        nv = self.mesh.n_vertices
        for node in range(nv, self.n_nodes):
            x, y, z = (float(c) for c in self.xyz[node])
            lab = origin_label(self.origin_code[node], self.origin_ref[node])
            extra = [origin_label(c, r) for c, r in self.extra_origins.get(node, ())]
            if extra:
                lab = "|".join([lab] + extra)
            fh.write(f"{int(self.node_edge[node])},{float(self.node_t[node])!r},{x!r},{y!r},{z!r},{lab}\n")


# --------------------------------------------------------------------------
# step sizes and bounds


def check_epsilon(epsilon):
    eps = float(epsilon)
    if not (0.0 < eps <= 1.0) or not math.isfinite(eps):
        raise InvalidEpsilon(f"epsilon must lie in (0, 1], got {epsilon!r}")
    return eps


def uniform_step(params: GeometryParams, epsilon):
    return epsilon * params.h * params.cos_theta / (4 * params.n)


def geometric_steps(params: GeometryParams, epsilon):
    return epsilon * params.h / (6 * params.n), epsilon * params.h / (6 * params.L)


def dyadic_split(epsilon):
    """Write ``epsilon = r * 2**-k`` with ``r`` in (1/2, 1]."""
    m, e = math.frexp(epsilon)
    if m == 0.5:
        return 1.0, 1 - e
    return m, -e


def level_parts(length, params, epsilon):
    """Number of equal parts a level edge is cut into under the uniform rule.

    The part count is a power-of-two multiple of the count at the dyadic
    representative of ``epsilon``, so halving epsilon exactly refines the
    previous split.
    """
    r, k = dyadic_split(epsilon)
    spacing = uniform_step(params, r) / params.cos_theta
    return (2**k) * max(1, math.ceil(length / spacing))


def uniform_bound(params, epsilon):
    return 5 * params.n * params.X / epsilon


def geometric_bound(params, epsilon):
    q = params.n * params.L / (epsilon * params.h)
    return 51 * q * math.log2(6 * q)


@dataclass(frozen=True)
class HybridChoice:
    scheme: str
    uniform_bound: float
    geometric_bound: float


def hybrid_select(params: GeometryParams, epsilon) -> HybridChoice:
    bu = uniform_bound(params, epsilon)
    bg = geometric_bound(params, epsilon)
    return HybridChoice("uniform" if bu <= bg else "geometric", bu, bg)


def scheme_bound(scheme, params, epsilon):
    return uniform_bound(params, epsilon) if scheme == "uniform" else geometric_bound(params, epsilon)


# --------------------------------------------------------------------------
# assembly


def _edge_frame(mesh):
    a = mesh.vertices[mesh.edges[:, 0]]
    b = mesh.vertices[mesh.edges[:, 1]]
    d = b - a
    length = np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2])
    return a, b, length


def _merge_edge(t, code, ref, length, tol):
    """Sort candidates by ``t``, merge near-coincident ones, drop endpoint hits.

    Returns kept indices (in ``t`` order) and, for merged groups, the list of
    dropped indices per kept index.
    """
    if len(t) == 0:
        return np.zeros(0, dtype=np.int64), {}
    order = np.lexsort((code, t))
    ts = t[order]
    pos = ts * length
    inside = (pos > tol) & ((1.0 - ts) * length > tol)
    order = order[inside]
    if len(order) == 0:
        return order, {}
    ts = t[order]
    newgrp = np.empty(len(order), dtype=bool)
    newgrp[0] = True
    newgrp[1:] = np.diff(ts) * length > tol
    gid = np.cumsum(newgrp) - 1
    if newgrp.all():
        return order, {}
    by_code = np.lexsort((code[order], gid))
    first = np.empty(len(order), dtype=bool)
    first[0] = True
    first[1:] = gid[by_code][1:] != gid[by_code][:-1]
    keep = order[by_code[first]]
    sizes = np.bincount(gid)
    merged = {}
    if (sizes > 1).any():
        members = order[by_code]
        starts = np.nonzero(first)[0]
        for g in np.nonzero(sizes > 1)[0]:
            s = starts[g]
            merged[int(keep[g])] = members[s + 1 : s + sizes[g]].tolist()
    return keep, merged


def _assemble(mesh, params, scheme, epsilon, steps, per_edge):
    """Number nodes and build the per-edge chains.

    ``per_edge[e]`` is ``(t, z, code, ref)``; ``z`` is ``None`` on level edges
    (height is the shared endpoint height).
    """
    nv = mesh.n_vertices
    ne = mesh.n_edges
    a, b, length = _edge_frame(mesh)
    tol = MERGE_REL * params.L

    kept = []
    extras = {}
    counts = np.zeros(ne, dtype=np.int64)
    for e in range(ne):
        t, z, code, ref = per_edge[e]
        idx, merged = _merge_edge(t, code, ref, length[e], tol)
        kept.append((idx, merged))
        counts[e] = len(idx)

    total = nv + int(counts.sum())
    xyz = np.empty((total, 3))
    xyz[:nv] = mesh.vertices
    node_edge = np.full(total, -1, dtype=np.int64)
    node_t = np.zeros(total)
    origin_code = np.full(total, -1, dtype=np.int8)
    origin_ref = np.full((total, 3), -1, dtype=np.int64)
    chain_ptr = np.zeros(ne + 1, dtype=np.int64)
    np.cumsum(counts + 2, out=chain_ptr[1:])
    chain_nodes = np.empty(chain_ptr[-1], dtype=np.int64)

    nxt = nv
    for e in range(ne):
        idx, merged = kept[e]
        t, z, code, ref = per_edge[e]
        k = len(idx)
        ids = np.arange(nxt, nxt + k)
        te = t[idx]
        node_t[ids] = te
        node_edge[ids] = e
        xyz[ids, 0] = a[e, 0] + te * (b[e, 0] - a[e, 0])
        xyz[ids, 1] = a[e, 1] + te * (b[e, 1] - a[e, 1])
        xyz[ids, 2] = a[e, 2] if z is None else z[idx]
        origin_code[ids] = code[idx]
        origin_ref[ids] = ref[idx]
        if merged:
            where = {int(v): p for p, v in enumerate(idx)}
        for keep_i, others in merged.items():
            pos = where[keep_i]
            extras[nxt + pos] = [(int(code[o]), tuple(int(r) for r in ref[o])) for o in others]
        p = chain_ptr[e]
        chain_nodes[p] = mesh.edges[e, 0]
        chain_nodes[p + 1 : p + 1 + k] = ids
        chain_nodes[p + 1 + k] = mesh.edges[e, 1]
        nxt += k

    return Discretization(
        scheme=scheme,
        epsilon=epsilon,
        params=params,
        mesh=mesh,
        steps=steps,
        xyz=xyz,
        node_edge=node_edge,
        node_t=node_t,
        chain_ptr=chain_ptr,
        chain_nodes=chain_nodes,
        origin_code=origin_code,
        origin_ref=origin_ref,
        extra_origins=extras,
    )


def _t_from_height(z, za, zb):
    return (z - za) / (zb - za)


def _ref(n, a=-1, b=-1, c=-1):
    ref = np.empty((n, 3), dtype=np.int64)
    ref[:, 0] = a
    ref[:, 1] = b
    ref[:, 2] = c
    return ref


# --------------------------------------------------------------------------
# uniform rule


def _plane_bounds(zlo, zhi, delta):
    return max(1, math.floor(zlo / delta)), math.ceil(zhi / delta)


def _plane_count(zlo, zhi, delta):
    """Number of planes inside (zlo, zhi) without listing them."""
    jlo, jhi = _plane_bounds(zlo, zhi, delta)
    if jhi - jlo <= 4:
        return len(_plane_range(zlo, zhi, delta)[0])
    n = 0
    for j in (jlo, jlo + 1):
        n += int(bool(zlo < j * delta < zhi))
    for j in (jhi - 1, jhi):
        n += int(bool(zlo < j * delta < zhi))
    return n + (jhi - jlo - 3)


def _check_size(count, what):
    if count > MAX_EDGE_NODES:
        raise ValueError(
            f"{what} would need about {count:.3g} nodes on one edge (limit {MAX_EDGE_NODES}); "
            "the terrain has a nearly level edge, try the geometric scheme or a larger epsilon"
        )


def _plane_range(zlo, zhi, delta):
    """Positive integers j with zlo < j*delta < zhi (exact products)."""
    jlo, jhi = _plane_bounds(zlo, zhi, delta)
    _check_size(jhi - jlo, "the uniform rule")
    j = np.arange(jlo, jhi + 1, dtype=np.int64)
    z = j * delta
    keep = (z > zlo) & (z < zhi)
    return j[keep], z[keep]


def uniform_discretize(mesh: TerrainMesh, params: GeometryParams | None = None, epsilon=1.0) -> Discretization:
    eps = check_epsilon(epsilon)
    params = params or geometry_params(mesh)
    delta = uniform_step(params, eps)
    vz = mesh.vertices[:, 2]
    order = np.argsort(vz, kind="stable")
    vz_sorted = vz[order]
    _, _, length = _edge_frame(mesh)

    per_edge = []
    for e, (i, j) in enumerate(mesh.edges):
        za, zb = float(vz[i]), float(vz[j])
        if za == zb:
            parts = level_parts(float(length[e]), params, eps)
            _check_size(parts, "the uniform rule")
            k = np.arange(1, parts, dtype=np.int64)
            t = k / parts
            per_edge.append((t, None, np.full(len(k), LEVEL_SPACING, dtype=np.int8), _ref(len(k), k)))
            continue
        zlo, zhi = min(za, zb), max(za, zb)
        jj, zp = _plane_range(zlo, zhi, delta)
        lo = np.searchsorted(vz_sorted, zlo, side="right")
        hi = np.searchsorted(vz_sorted, zhi, side="left")
        vids = order[lo:hi]
        zv = vz[vids]
        z = np.concatenate([zv, zp])
        code = np.concatenate(
            [np.full(len(zv), VERTEX_PLANE, dtype=np.int8), np.full(len(zp), PLANE, dtype=np.int8)]
        )
        ref = np.concatenate([_ref(len(zv), vids), _ref(len(zp), jj)])
        per_edge.append((_t_from_height(z, za, zb), z, code, ref))
    return _assemble(mesh, params, "uniform", eps, {"delta": delta}, per_edge)


# --------------------------------------------------------------------------
# geometric rule


def primary_distances(length, delta1, delta2):
    """Distances ``delta1 * (1 + delta2)**i`` below ``length``, i = 0, 1, ..."""
    if delta1 >= length:
        return np.zeros(0)
    imax = int(math.log(length / delta1) / math.log1p(delta2)) + 2
    d = delta1 * (1.0 + delta2) ** np.arange(imax + 1, dtype=np.float64)
    return d[d < length]


def _primaries(mesh, length, delta1, delta2):
    """Per edge: t, anchor vertex and exponent of every primary point."""
    out = []
    for e, (i, j) in enumerate(mesh.edges):
        d = primary_distances(float(length[e]), delta1, delta2)
        k = np.arange(len(d), dtype=np.int64)
        t = np.concatenate([d / length[e], 1.0 - d / length[e]])
        anchor = np.concatenate([np.full(len(d), i), np.full(len(d), j)])
        out.append((t, anchor, np.concatenate([k, k])))
    return out


def geometric_discretize(mesh: TerrainMesh, params: GeometryParams | None = None, epsilon=1.0) -> Discretization:
    eps = check_epsilon(epsilon)
    params = params or geometry_params(mesh)
    delta1, delta2 = geometric_steps(params, eps)
    a, b, length = _edge_frame(mesh)
    prim = _primaries(mesh, length, delta1, delta2)

    # every height that gets transferred: primaries first, then vertices
    hz, hcode, href = [], [], []
    for e, (t, anchor, k) in enumerate(prim):
        hz.append(a[e, 2] + t * (b[e, 2] - a[e, 2]))
        hcode.append(np.full(len(t), ISO_PRIMARY, dtype=np.int8))
        href.append(np.stack([np.full(len(t), e), anchor, k], axis=1))
    nv = mesh.n_vertices
    hz.append(mesh.vertices[:, 2])
    hcode.append(np.full(nv, ISO_VERTEX, dtype=np.int8))
    href.append(_ref(nv, np.arange(nv)))
    hz = np.concatenate(hz)
    hcode = np.concatenate(hcode)
    href = np.concatenate(href).astype(np.int64)
    order = np.argsort(hz, kind="stable")
    hz, hcode, href = hz[order], hcode[order], href[order]

    per_edge = []
    for e in range(mesh.n_edges):
        za, zb = float(a[e, 2]), float(b[e, 2])
        t, anchor, k = prim[e]
        if za == zb:
            per_edge.append((t, None, np.full(len(t), PRIMARY, dtype=np.int8), _ref(len(t), anchor, k)))
            continue
        lo = np.searchsorted(hz, min(za, zb), side="right")
        hi = np.searchsorted(hz, max(za, zb), side="left")
        z = hz[lo:hi]
        code = hcode[lo:hi].copy()
        ref = href[lo:hi].copy()
        # heights transferred from this edge's own primaries are the primaries
        own = (code == ISO_PRIMARY) & (ref[:, 0] == e)
        code[own] = PRIMARY
        ref[own, 0] = ref[own, 1]
        ref[own, 1] = ref[own, 2]
        ref[own, 2] = -1
        per_edge.append((_t_from_height(z, za, zb), z, code, ref))
    return _assemble(
        mesh, params, "geometric", eps, {"delta1": delta1, "delta2": delta2}, per_edge
    )


# --------------------------------------------------------------------------
# dispatch and counting


def discretize(mesh, epsilon, scheme="hybrid", params=None) -> Discretization:
    params = params or geometry_params(mesh)
    eps = check_epsilon(epsilon)
    if scheme == "hybrid":
        scheme = hybrid_select(params, eps).scheme
    if scheme == "uniform":
        return uniform_discretize(mesh, params, eps)
    if scheme == "geometric":
        return geometric_discretize(mesh, params, eps)
    raise ValueError(f"unknown scheme {scheme!r}")


def count_edge_nodes(mesh, epsilon, scheme, params=None):
    """Per-edge node counts (endpoints included) without building the nodes.

    Exact duplicates are collapsed; the tolerance merge of the full build is
    not applied, so each count is an upper bound on the built count (equal
    unless two distinct placements land within the merge tolerance).
    Counts past the int64 range saturate at its maximum.
    """
    params = params or geometry_params(mesh)
    eps = check_epsilon(epsilon)
    if scheme == "hybrid":
        scheme = hybrid_select(params, eps).scheme
    a, b, length = _edge_frame(mesh)
    counts = np.zeros(mesh.n_edges, dtype=np.int64)
    if scheme == "uniform":
        delta = uniform_step(params, eps)
        vz = np.unique(mesh.vertices[:, 2])
        on_plane = np.zeros(len(vz), dtype=bool)
        jv = np.round(vz / delta)
        on_plane = (jv >= 1) & (jv * delta == vz)
        vz_off = vz[~on_plane]
        for e in range(mesh.n_edges):
            za, zb = a[e, 2], b[e, 2]
            if za == zb:
                counts[e] = min(level_parts(float(length[e]), params, eps) + 1, _INT_MAX)
                continue
            zlo, zhi = min(za, zb), max(za, zb)
            nj = _plane_count(zlo, zhi, delta)
            nvx = np.searchsorted(vz_off, zhi, "left") - np.searchsorted(vz_off, zlo, "right")
            counts[e] = min(nj + int(nvx) + 2, _INT_MAX)
        return counts
    delta1, delta2 = geometric_steps(params, eps)
    prim = _primaries(mesh, length, delta1, delta2)
    hz = [mesh.vertices[:, 2]]
    for e, (t, _, _) in enumerate(prim):
        hz.append(a[e, 2] + t * (b[e, 2] - a[e, 2]))
    hz = np.unique(np.concatenate(hz))
    for e in range(mesh.n_edges):
        za, zb = a[e, 2], b[e, 2]
        if za == zb:
            counts[e] = len(np.unique(prim[e][0])) + 2
            continue
        zlo, zhi = min(za, zb), max(za, zb)
        counts[e] = np.searchsorted(hz, zhi, "left") - np.searchsorted(hz, zlo, "right") + 2
    return counts
