"""Independent reference answers and test-terrain generators."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .graph import DescentGraph
from .terrain import (
    Point3,
    SurfacePoint,
    TerrainMesh,
    faces_containing,
    geometry_params,
    locate,
    validate_terrain,
)

NAIVE_NODE_CAP = 1000


@dataclass
class DescentCheck:
    ok: bool
    index: int = -1  # first point that is higher than its predecessor

    def __bool__(self):
        return self.ok


def check_descending(path) -> DescentCheck:
    """Exact check that heights never increase along a path.

    Accepts a :class:`~sdpath.query.Path` or any sequence of heights.
    """
    z = path.heights if hasattr(path, "heights") else list(path)
    for i in range(1, len(z)):
        if z[i] > z[i - 1]:
            return DescentCheck(False, i)
    return DescentCheck(True)


def _xyz(p):
    if isinstance(p, SurfacePoint):
        return p.coords.as_array()
    return np.asarray(p, dtype=np.float64)


def exact_single_face(mesh, s: SurfacePoint, v: SurfacePoint):
    """Length of the straight segment when it is a descending path inside one face."""
    if not set(faces_containing(mesh, s)) & set(faces_containing(mesh, v)):
        raise ValueError("points do not share a face")
    if s.coords.z < v.coords.z:
        return None
    return float(np.linalg.norm(_xyz(v) - _xyz(s)))


def _unfold(a, u, normal_side, p):
    """Planar coordinates of ``p``: along ``u`` from ``a``, then signed offset."""
    d = p - a
    x = float(d @ u)
    y = float(np.linalg.norm(d - x * u))
    return x, normal_side * y


def exact_two_face_unfold(mesh, s: SurfacePoint, v: SurfacePoint):
    """Length of the unfolded straight path across a shared edge, if descending.

    Defined for ``s`` and ``v`` interior to two faces sharing an edge. The value
    is the true shortest descending length when those two faces make up the
    whole terrain (no detour through other faces is possible).
    """
    if s.kind != "face" or v.kind != "face" or s.index == v.index:
        raise ValueError("s and v must lie inside two distinct faces")
    f1, f2 = s.index, v.index
    shared = set(mesh.face_edges[f1].tolist()) & set(mesh.face_edges[f2].tolist())
    if not shared:
        raise ValueError("faces are not adjacent")
    (e,) = shared
    ia, ib = mesh.edges[e]
    a = mesh.vertices[ia]
    b = mesh.vertices[ib]
    ab = b - a
    length = float(np.linalg.norm(ab))
    u = ab / length
    ps = _xyz(s)
    pv = _xyz(v)
    xs, ys = _unfold(a, u, 1.0, ps)
    xv, yv = _unfold(a, u, -1.0, pv)
    if ys <= 0.0 or yv >= 0.0:
        return None
    lam = ys / (ys - yv)
    xc = xs + lam * (xv - xs)
    if not (0.0 < xc < length):
        return None
    cross = a + xc * u
    if not (ps[2] >= cross[2] >= pv[2]):
        return None
    return float(math.hypot(xv - xs, yv - ys))


def naive_sssp(g: DescentGraph, s):
    """Bellman-Ford over every explicit link; exact reference distances."""
    if g.n_nodes > NAIVE_NODE_CAP:
        raise ValueError(f"naive search is limited to {NAIVE_NODE_CAP} nodes, got {g.n_nodes}")
    xs, ys, w = g.links()
    dist = np.full(g.n_nodes, np.inf)
    dist[int(s)] = 0.0
    for _ in range(g.n_nodes):
        cand = dist[xs] + w
        new = dist.copy()
        np.minimum.at(new, ys, cand)
        if np.array_equal(new, dist):
            break
        dist = new
    return dist


def reference_solution(mesh, s, v, eps_ref, scheme="hybrid", algo="bushwhack"):
    from .pipeline import SDPSolver

    return SDPSolver(mesh, s, eps_ref, scheme, algo).query(v).length


# --------------------------------------------------------------------------
# generators


@dataclass
class StarPyramid:
    mesh: TerrainMesh
    s: SurfacePoint
    t: SurfacePoint
    k: int
    contour_length: float  # exact length of the level route from s to t


def gen_star_pyramid(k=5, r_out=4.0, r_in=1.5, H=2.0) -> StarPyramid:
    """Apex over a star-shaped base with ``k`` spikes.

    ``s`` and ``t`` sit at half height in the middle of two faces on opposite
    sides of the apex, ``k`` faces apart. The only descending routes between
    them follow the half-height contour.
    """
    if k < 3 or not (r_out > r_in > 0) or H <= 0:
        raise ValueError("need k >= 3, r_out > r_in > 0, H > 0")
    m = 2 * k
    ang = np.pi * np.arange(m) / k
    rad = np.where(np.arange(m) % 2 == 0, r_out, r_in)
    base = np.stack([rad * np.cos(ang), rad * np.sin(ang), np.zeros(m)], axis=1)
    verts = np.vstack([[0.0, 0.0, H], base])
    faces = np.array([[0, 1 + i, 1 + (i + 1) % m] for i in range(m)], dtype=np.int64)
    mesh = TerrainMesh(verts, faces)

    def mid_face(i):
        # halfway between the apex and the base edge midpoint: z is H/2 exactly
        b0 = base[i]
        b1 = base[(i + 1) % m]
        x = 0.25 * (b0[0] + b1[0])
        y = 0.25 * (b0[1] + b1[1])
        return SurfacePoint("face", i, (0.5, 0.25, 0.25), Point3(float(x), float(y), 0.5 * H))

    s = mid_face(0)
    t = mid_face(k)
    seg = 0.5 * float(np.linalg.norm(base[1] - base[0]))
    return StarPyramid(mesh, s, t, k, k * seg)


def _lattice_points(n, size, rng):
    if n == 3:
        return np.array([[0.0, 0.0], [size, 0.0], [0.0, size]])
    cols = max(2, math.ceil(math.sqrt(n)))
    rows = max(2, math.ceil(n / cols))
    sx = size / (cols - 1)
    sy = size / (rows - 1)
    gx, gy = np.meshgrid(np.arange(cols) * sx, np.arange(rows) * sy)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    ix, iy = np.meshgrid(np.arange(cols), np.arange(rows))
    ix, iy = ix.ravel(), iy.ravel()
    on_x = (ix == 0) | (ix == cols - 1)
    on_y = (iy == 0) | (iy == rows - 1)
    corner = on_x & on_y
    jit = rng.uniform(-0.2, 0.2, size=pts.shape) * np.array([sx, sy])
    # boundary points slide along their side only; corners stay put
    jit[on_x, 0] = 0.0
    jit[on_y, 1] = 0.0
    pts = pts + jit
    extra = len(pts) - n
    if extra > 0:
        drop = rng.choice(np.nonzero(~corner)[0], size=extra, replace=False)
        pts = np.delete(pts, drop, axis=0)
    return pts


def _min_projected_altitude(xy, tri):
    p = xy[tri]
    u = p[:, 1] - p[:, 0]
    w = p[:, 2] - p[:, 0]
    area2 = np.abs(u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0])
    sides = np.stack(
        [np.linalg.norm(p[:, (k + 1) % 3] - p[:, k], axis=1) for k in range(3)], axis=1
    )
    return float((area2[:, None] / sides).min())


def gen_random_terrain(n, seed=0, height_range=(0.0, 2.0), size=10.0, levels=5, max_aspect=50.0):
    """Jittered-lattice Delaunay terrain with smoothed, quantized heights.

    Heights are drawn uniformly, smoothed once toward the neighbour mean and
    snapped to ``levels`` equally spaced values (``levels=None`` keeps them
    continuous). Snapping bounds how close to level a sloped edge can be.
    Draws are repeated until the projected triangles are not too thin and
    ``L/h`` stays within ``max_aspect``.
    """
    if n < 3:
        raise ValueError("need at least 3 vertices")
    rng = np.random.default_rng(seed)
    lo, hi = map(float, height_range)
    for _ in range(1000):
        xy = _lattice_points(n, size, rng)
        tri = np.array([[0, 1, 2]]) if n == 3 else Delaunay(xy).simplices.astype(np.int64)
        if _min_projected_altitude(xy, tri) < 0.05 * size:
            continue
        z = rng.uniform(lo, hi, size=n)
        nb_sum = np.zeros(n)
        nb_cnt = np.zeros(n)
        for i in range(3):
            for j in range(3):
                if i != j:
                    np.add.at(nb_sum, tri[:, i], z[tri[:, j]])
                    np.add.at(nb_cnt, tri[:, i], 1.0)
        z = 0.5 * z + 0.5 * nb_sum / nb_cnt
        if levels:
            step = (hi - lo) / (levels - 1)
            z = lo + np.round((z - lo) / step) * step
        # orient faces counter-clockwise in projection
        p = xy[tri]
        cross = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (p[:, 1, 1] - p[:, 0, 1]) * (
            p[:, 2, 0] - p[:, 0, 0]
        )
        tri = np.where((cross < 0)[:, None], tri[:, [0, 2, 1]], tri)
        mesh = TerrainMesh(np.column_stack([xy, z]), tri)
        if not validate_terrain(mesh).ok:
            continue
        gp = geometry_params(mesh)
        if gp.L / gp.h <= max_aspect:
            return mesh
    raise RuntimeError("could not generate a terrain satisfying the shape guards")
