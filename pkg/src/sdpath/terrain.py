"""Triangulated terrain: storage, validation, shape parameters, point location.

Vertices are stored as an ``(n, 3)`` float array and faces as an ``(F, 3)``
index array. Edges are derived (sorted by their vertex pair) together with
edge/face and vertex/face incidence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyMesh, NonTerrainMesh, ParseError, PointOffTerrain

SNAP_TOL = 1e-9
DEGENERATE_AREA_REL = 1e-12


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinate in {self!r}")

    def as_array(self):
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class SurfacePoint:
    """A point on the terrain.

    ``kind`` is ``"vertex"``, ``"edge"`` or ``"face"``; ``index`` is the
    vertex/edge/face index. For edges ``param`` is the position ``t`` in
    (0, 1) measured from the lower-index endpoint; for faces it is the
    barycentric triple in the face's vertex order.
    """

    kind: str
    index: int
    param: float | tuple[float, float, float] | None
    coords: Point3

    @property
    def z(self):
        return self.coords.z

    def label(self):
        if self.kind == "vertex":
            return f"vertex:{self.index}"
        if self.kind == "edge":
            return f"edge:{self.index}@{self.param:.12g}"
        return f"face:{self.index}"


@dataclass
class ValidationReport:
    degenerate_faces: list[int] = field(default_factory=list)
    overlapping_pairs: list[tuple[int, int]] = field(default_factory=list)
    nonmanifold_edges: list[tuple[int, int]] = field(default_factory=list)
    bad_faces: list[int] = field(default_factory=list)
    count_violations: list[str] = field(default_factory=list)

    @property
    def ok(self):
        return not (
            self.degenerate_faces
            or self.overlapping_pairs
            or self.nonmanifold_edges
            or self.bad_faces
            or self.count_violations
        )

    def summary(self):
        if self.ok:
            return "terrain ok"
        parts = []
        if self.bad_faces:
            parts.append(f"faces with repeated/out-of-range vertices: {self.bad_faces}")
        if self.degenerate_faces:
            parts.append(f"degenerate projected faces: {self.degenerate_faces}")
        if self.overlapping_pairs:
            parts.append(f"overlapping projected face pairs: {self.overlapping_pairs}")
        if self.nonmanifold_edges:
            parts.append(f"edges with more than two faces: {self.nonmanifold_edges}")
        parts.extend(self.count_violations)
        return "; ".join(parts)


class TerrainMesh:
    """Indexed triangle mesh with derived edge and incidence tables.

    Instances are treated as immutable once built.
    """

    def __init__(self, vertices, faces):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64).reshape(-1, 3)
        self.vertices.setflags(write=False)
        self.faces.setflags(write=False)
        self._build_topology()

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def n_edges(self):
        return len(self.edges)

    def _build_topology(self):
        n = self.n_vertices
        faces = self.faces
        nf = len(faces)
        if nf == 0:
            self.edges = np.zeros((0, 2), dtype=np.int64)
            self.face_edges = np.zeros((0, 3), dtype=np.int64)
            self.edge_faces = np.zeros((0, 2), dtype=np.int64)
            self.edge_face_count = np.zeros(0, dtype=np.int64)
            self.vertex_faces_ptr = np.zeros(n + 1, dtype=np.int64)
            self.vertex_faces = np.zeros(0, dtype=np.int64)
            self.vertex_edges_ptr = np.zeros(n + 1, dtype=np.int64)
            self.vertex_edges = np.zeros(0, dtype=np.int64)
            return
        # local edge k of a face joins corners k and (k+1) % 3
        a = faces
        b = np.roll(faces, -1, axis=1)
        pairs = np.stack([np.minimum(a, b), np.maximum(a, b)], axis=-1).reshape(-1, 2)
        edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        self.edges = edges
        self.face_edges = inverse.reshape(nf, 3)

        counts = np.bincount(inverse, minlength=len(edges))
        self.edge_face_count = counts
        edge_faces = np.full((len(edges), 2), -1, dtype=np.int64)
        order = np.argsort(inverse, kind="stable")
        face_of_slot = order // 3
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        edge_faces[:, 0] = face_of_slot[starts]
        two = counts >= 2
        edge_faces[two, 1] = face_of_slot[starts[two] + 1]
        self.edge_faces = edge_faces

        self.vertex_faces_ptr, self.vertex_faces = _csr(
            faces.reshape(-1), np.repeat(np.arange(nf), 3), n
        )
        self.vertex_edges_ptr, self.vertex_edges = _csr(
            edges.reshape(-1), np.repeat(np.arange(len(edges)), 2), n
        )

    def faces_of_vertex(self, v):
        return self.vertex_faces[self.vertex_faces_ptr[v] : self.vertex_faces_ptr[v + 1]]

    def edges_of_vertex(self, v):
        return self.vertex_edges[self.vertex_edges_ptr[v] : self.vertex_edges_ptr[v + 1]]

    def faces_of_edge(self, e):
        return [f for f in self.edge_faces[e] if f >= 0]

    def edge_index(self, i, j):
        """Index of the edge joining vertices ``i`` and ``j`` (KeyError if none)."""
        lo, hi = min(i, j), max(i, j)
        for e in self.edges_of_vertex(lo):
            if self.edges[e, 1] == hi and self.edges[e, 0] == lo:
                return int(e)
        raise KeyError((i, j))

    def edge_lengths(self):
        d = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
        return np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2])

    def projected_areas(self):
        """Signed projected (xy) area of every face."""
        p = self.vertices[self.faces][:, :, :2]
        u = p[:, 1] - p[:, 0]
        w = p[:, 2] - p[:, 0]
        return 0.5 * (u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0])

    def point(self, sp: SurfacePoint):
        return sp.coords.as_array()

    def __repr__(self):
        return f"TerrainMesh(n={self.n_vertices}, edges={self.n_edges}, faces={self.n_faces})"


def _csr(keys, values, nkeys):
    order = np.argsort(keys, kind="stable")
    counts = np.bincount(keys, minlength=nkeys)
    ptr = np.zeros(nkeys + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, np.ascontiguousarray(values[order], dtype=np.int64)


# --------------------------------------------------------------------------
# TER text format


def parse_terrain(text):
    """Parse TER text into vertex and face arrays without validating them."""
    verts, faces = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "v":
            if faces:
                raise ParseError("vertex after the first face", lineno)
            if len(tok) != 4:
                raise ParseError(f"expected 'v x y z', got {raw.strip()!r}", lineno)
            try:
                xyz = [float(t) for t in tok[1:]]
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if not all(math.isfinite(c) for c in xyz):
                raise ParseError("non-finite coordinate", lineno)
            verts.append(xyz)
        elif kind == "f":
            if len(tok) != 4:
                raise ParseError(f"expected 'f i j k', got {raw.strip()!r}", lineno)
            try:
                ijk = [int(t) for t in tok[1:]]
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            for i in ijk:
                if not 0 <= i < len(verts):
                    raise ParseError(f"vertex index {i} out of range", lineno)
            if len(set(ijk)) != 3:
                raise ParseError(f"face repeats a vertex: {ijk}", lineno)
            faces.append(ijk)
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)
    return np.array(verts, dtype=np.float64).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3)


def load_terrain(text) -> TerrainMesh:
    verts, faces = parse_terrain(text)
    mesh = TerrainMesh(verts, faces)
    report = validate_terrain(mesh)
    if not report.ok:
        raise NonTerrainMesh(report)
    return mesh


def dump_terrain(mesh, comment=None):
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    for x, y, z in mesh.vertices:
        lines.append(f"v {float(x)!r} {float(y)!r} {float(z)!r}")
    for i, j, k in mesh.faces:
        lines.append(f"f {i} {j} {k}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# validation


def validate_terrain(mesh: TerrainMesh) -> ValidationReport:
    report = ValidationReport()
    n = mesh.n_vertices
    faces = mesh.faces
    if len(faces) == 0:
        return report
    bad = (faces < 0) | (faces >= n)
    rep = (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])
    report.bad_faces = [int(f) for f in np.nonzero(bad.any(axis=1) | rep)[0]]
    if report.bad_faces:
        return report

    L = float(mesh.edge_lengths().max())
    area = np.abs(mesh.projected_areas())
    report.degenerate_faces = [int(f) for f in np.nonzero(area < DEGENERATE_AREA_REL * L * L)[0]]
    report.nonmanifold_edges = [
        (int(mesh.edges[e, 0]), int(mesh.edges[e, 1])) for e in np.nonzero(mesh.edge_face_count > 2)[0]
    ]
    skip = set(report.degenerate_faces)
    report.overlapping_pairs = _overlapping_faces(mesh, skip, L)
    if mesh.n_edges > 3 * n:
        report.count_violations.append(f"{mesh.n_edges} edges exceed 3n = {3 * n}")
    if mesh.n_faces > 2 * n:
        report.count_violations.append(f"{mesh.n_faces} faces exceed 2n = {2 * n}")
    return report


def _overlapping_faces(mesh, skip, L):
    tri = mesh.vertices[mesh.faces][:, :, :2]
    lo = tri.min(axis=1)
    hi = tri.max(axis=1)
    tol = 1e-12 * L
    order = np.argsort(lo[:, 0], kind="stable")
    sorted_lo = lo[order, 0]
    cand_i, cand_j = [], []
    # sweep along x: only faces whose x-ranges overlap can collide
    for rank, f in enumerate(order):
        stop = np.searchsorted(sorted_lo, hi[f, 0] - tol, side="left")
        if stop <= rank + 1:
            continue
        others = order[rank + 1 : stop]
        keep = (lo[others, 1] < hi[f, 1] - tol) & (hi[others, 1] > lo[f, 1] + tol)
        others = others[keep]
        cand_i.extend([f] * len(others))
        cand_j.extend(others.tolist())
    if not cand_i:
        return []
    ci = np.array(cand_i)
    cj = np.array(cand_j)
    hit = _interiors_intersect(tri[ci], tri[cj], tol)
    pairs = []
    for i, j in zip(ci[hit], cj[hit]):
        i, j = int(i), int(j)
        if i in skip or j in skip:
            continue
        pairs.append((min(i, j), max(i, j)))
    return sorted(set(pairs))


def _interiors_intersect(A, B, tol):
    """Separating-axis test on batches of 2D triangles (``(k, 3, 2)`` each).

    Touching along an edge or at a vertex does not count as overlap.
    """
    separated = np.zeros(len(A), dtype=bool)
    for T in (A, B):
        for k in range(3):
            d = T[:, (k + 1) % 3] - T[:, k]
            axis = np.stack([-d[:, 1], d[:, 0]], axis=1)
            norm = np.sqrt((axis * axis).sum(axis=1))
            norm[norm == 0] = 1.0
            axis = axis / norm[:, None]
            pa = np.einsum("kij,kj->ki", A, axis)
            pb = np.einsum("kij,kj->ki", B, axis)
            separated |= pa.max(axis=1) <= pb.min(axis=1) + tol
            separated |= pb.max(axis=1) <= pa.min(axis=1) + tol
    return ~separated


# --------------------------------------------------------------------------
# shape parameters


@dataclass(frozen=True)
class GeometryParams:
    n: int
    L: float
    h: float
    theta: float
    cos_theta: float
    X: float
    Xprime: float

    @property
    def sec_theta(self):
        return 1.0 / self.cos_theta


def geometry_params(mesh: TerrainMesh) -> GeometryParams:
    """Longest edge, smallest in-face altitude and steepness parameters.

    ``theta`` is the largest angle between a non-level edge and the vertical;
    it is 0 when every edge is level. ``cos_theta`` is kept separately because
    it is computed directly from edge rises, which is more accurate than
    ``cos(arccos(.))``.
    """
    if mesh.n_faces == 0:
        raise EmptyMesh("terrain has no faces")
    lengths = mesh.edge_lengths()
    L = float(lengths.max())

    p = mesh.vertices[mesh.faces]
    cr = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    twice_area = np.sqrt((cr * cr).sum(axis=1))
    opposite = lengths[mesh.face_edges]  # edge k is opposite corner (k + 2) % 3
    h = float((twice_area[:, None] / opposite).min())

    dz = np.abs(mesh.vertices[mesh.edges[:, 1], 2] - mesh.vertices[mesh.edges[:, 0], 2])
    sloped = dz != 0.0
    if sloped.any():
        cos_theta = float((dz[sloped] / lengths[sloped]).min())
        cos_theta = min(cos_theta, 1.0)
        theta = math.acos(cos_theta)
    else:
        cos_theta, theta = 1.0, 0.0
    Xprime = L / h
    return GeometryParams(
        n=mesh.n_vertices, L=L, h=h, theta=theta, cos_theta=cos_theta, X=Xprime / cos_theta, Xprime=Xprime
    )


# --------------------------------------------------------------------------
# point location


def _barycentric(mesh, faces, x, y):
    tri = mesh.vertices[mesh.faces[faces]][:, :, :2]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    den = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    la = ((b[:, 0] - x) * (c[:, 1] - y) - (b[:, 1] - y) * (c[:, 0] - x)) / den
    lb = ((c[:, 0] - x) * (a[:, 1] - y) - (c[:, 1] - y) * (a[:, 0] - x)) / den
    lc = 1.0 - la - lb
    return np.stack([la, lb, lc], axis=1)


def locate(mesh: TerrainMesh, x, y) -> SurfacePoint:
    """Find the surface point above ``(x, y)``.

    Barycentric coordinates within ``SNAP_TOL`` of 0 snap the point onto an
    edge or vertex.
    """
    x = float(x)
    y = float(y)
    allf = np.arange(mesh.n_faces)
    bary = _barycentric(mesh, allf, x, y)
    inside = np.nonzero((bary >= -SNAP_TOL).all(axis=1))[0]
    if len(inside) == 0:
        raise PointOffTerrain(f"({x}, {y}) is outside the terrain")
    f = int(inside[0])
    lam = bary[f].copy()
    lam[np.abs(lam) <= SNAP_TOL] = 0.0
    lam = np.clip(lam, 0.0, None)
    lam /= lam.sum()
    corners = mesh.faces[f]
    nz = np.nonzero(lam > 0.0)[0]
    if len(nz) == 1:
        v = int(corners[nz[0]])
        return vertex_point(mesh, v)
    if len(nz) == 2:
        i, j = int(corners[nz[0]]), int(corners[nz[1]])
        li, lj = lam[nz[0]], lam[nz[1]]
        e = mesh.edge_index(i, j)
        lo, hi = mesh.edges[e]
        t = float(lj / (li + lj)) if hi == j else float(li / (li + lj))
        return edge_point(mesh, e, t)
    P = mesh.vertices[corners]
    z = float(lam[0] * P[0, 2] + lam[1] * P[1, 2] + lam[2] * P[2, 2])
    return SurfacePoint("face", f, (float(lam[0]), float(lam[1]), float(lam[2])), Point3(x, y, z))


def vertex_point(mesh, v) -> SurfacePoint:
    x, y, z = mesh.vertices[v]
    return SurfacePoint("vertex", int(v), None, Point3(float(x), float(y), float(z)))


def edge_point(mesh, e, t) -> SurfacePoint:
    a, b = mesh.vertices[mesh.edges[e]]
    p = a + t * (b - a)
    return SurfacePoint("edge", int(e), float(t), Point3(float(p[0]), float(p[1]), float(p[2])))


def faces_containing(mesh, sp: SurfacePoint):
    if sp.kind == "vertex":
        return [int(f) for f in mesh.faces_of_vertex(sp.index)]
    if sp.kind == "edge":
        return [int(f) for f in mesh.faces_of_edge(sp.index)]
    return [sp.index]


# --------------------------------------------------------------------------
# source insertion


def insert_source(mesh: TerrainMesh, p: SurfacePoint) -> tuple[TerrainMesh, int]:
    """Make ``p`` a vertex, returning the new mesh and the vertex index.

    The split face keeps its index (reused by the first new triangle); extra
    triangles are appended, so untouched faces keep their indices.
    """
    if p.kind == "vertex":
        return mesh, p.index
    s = mesh.n_vertices
    verts = np.vstack([mesh.vertices, p.coords.as_array()[None, :]])
    faces = mesh.faces.copy()
    extra = []
    if p.kind == "face":
        a, b, c = faces[p.index]
        faces[p.index] = (a, b, s)
        extra += [(b, c, s), (c, a, s)]
    else:
        i, j = mesh.edges[p.index]
        for f in mesh.faces_of_edge(p.index):
            tri = list(faces[f])
            # keep the face's orientation: replace j by s, then i by s
            k = tri.index(j)
            first = tri.copy()
            first[k] = s
            second = tri.copy()
            second[tri.index(i)] = s
            faces[f] = first
            extra.append(tuple(second))
    if extra:
        faces = np.vstack([faces, np.array(extra, dtype=np.int64)])
    return TerrainMesh(verts, faces), s
