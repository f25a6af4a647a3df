from __future__ import annotations

import io
import math

import numpy as np
import pytest

from sdpath.discretize import (
    LEVEL_SPACING,
    PLANE,
    PRIMARY,
    count_edge_nodes,
    discretize,
    dyadic_split,
    geometric_discretize,
    geometric_steps,
    hybrid_select,
    level_parts,
    primary_distances,
    uniform_discretize,
    uniform_step,
)
from sdpath.errors import InvalidEpsilon
from sdpath.oracle import gen_random_terrain, gen_star_pyramid
from sdpath.terrain import GeometryParams, TerrainMesh, geometry_params

from .conftest import one_face


def test_t1_uniform_step():
    gp = geometry_params(one_face())
    delta = uniform_step(gp, 1.0)
    # h cos(theta) / 12 = sqrt(8.5) * 2/sqrt(13) / 12
    assert delta == pytest.approx(math.sqrt(8.5) * 2 / math.sqrt(13) / 12, rel=1e-14)
    assert delta == pytest.approx(0.134768, abs=1e-6)


def test_t1_uniform_sloped_edge():
    mesh = one_face()
    d = uniform_discretize(mesh, epsilon=1.0)
    delta = d.steps["delta"]
    e = mesh.edge_index(0, 1)
    pts = d.steiner_points(e)
    assert len(pts) == 15
    # brute-force scan of j*delta strictly inside (2, 4)
    js = [j for j in range(1, 100) if 2 < j * delta < 4]
    assert js == list(range(15, 30))
    assert sorted(p.height for p in pts) == [j * delta for j in js]
    assert all(p.origin[0] == "plane" for p in pts)
    # t runs from the z=4 corner, so the highest plane comes first
    assert pts[0].origin == ("plane", 29) and pts[-1].origin == ("plane", 15)
    assert pts[-1].height == pytest.approx(2.0215189, abs=1e-7)
    assert pts[0].height == pytest.approx(3.9082698, abs=1e-7)
    # t agrees with height (t measured from vertex 0 at z=4)
    for p in pts:
        assert p.t == pytest.approx((4 - p.height) / 2, rel=1e-12)


def test_t1_uniform_level_edge():
    mesh = one_face()
    gp = geometry_params(mesh)
    d = uniform_discretize(mesh, gp, 1.0)
    e = mesh.edge_index(1, 2)
    spacing = uniform_step(gp, 1.0) * gp.sec_theta
    assert spacing == pytest.approx(0.2429563, abs=1e-7)
    assert math.ceil(math.sqrt(18) / spacing) == 18
    pts = d.steiner_points(e)
    assert len(pts) == 17
    assert all(p.origin[0] == "level_spacing" for p in pts)
    assert np.allclose([p.t for p in pts], np.arange(1, 18) / 18)
    assert all(p.height == 2.0 for p in pts)
    assert list(d.edge_counts()) == [17, 17, 19]


def test_uniform_empty_edge():
    # only positive multiples of the step are planes; the third vertex is
    # outside the edge's height range
    mesh = TerrainMesh(np.array([[0, 0, -2.0], [1, 0, -1.0], [0, 1, -3.0]]), [[0, 1, 2]])
    d = uniform_discretize(mesh, epsilon=1.0)
    assert len(d.steiner_points(mesh.edge_index(0, 1))) == 0
    assert len(d.steiner_points(mesh.edge_index(0, 2))) == 0
    # the (-1, -3) edge still takes the -2 vertex plane
    assert [p.origin for p in d.steiner_points(mesh.edge_index(1, 2))] == [("vertex_plane", 0)]


def test_uniform_vertex_heights_transferred():
    mesh = gen_random_terrain(10, seed=2, levels=None)
    d = uniform_discretize(mesh, epsilon=0.5)
    vz = mesh.vertices[:, 2]
    delta = d.steps["delta"]
    for e, (i, j) in enumerate(mesh.edges):
        za, zb = vz[i], vz[j]
        if za == zb:
            continue
        z = np.sort(d.heights[d.edge_nodes(e)])
        inside = vz[(vz > min(za, zb)) & (vz < max(za, zb))]
        assert np.isin(inside, z).all()
        assert np.diff(z).max() <= delta * (1 + 1e-9)


def test_heights_stored_exactly_and_positions_consistent():
    mesh = gen_random_terrain(10, seed=5, levels=None)
    for scheme in ("uniform", "geometric"):
        d = discretize(mesh, 1.0, scheme)
        for e in range(mesh.n_edges):
            i, j = mesh.edges[e]
            za, zb = mesh.vertices[i, 2], mesh.vertices[j, 2]
            nodes = d.edge_nodes(e)
            t = d.node_t[nodes[1:-1]]
            assert np.all(np.diff(t) > 0) and np.all((t > 0) & (t < 1))
            if za != zb:
                zt = za + t * (zb - za)
                assert np.allclose(zt, d.heights[nodes[1:-1]], rtol=1e-12, atol=1e-12)
            L = geometry_params(mesh).L
            gaps = np.diff(np.concatenate([[0.0], t, [1.0]])) * np.linalg.norm(
                mesh.vertices[j] - mesh.vertices[i]
            )
            assert gaps.min() > 1e-12 * L


def test_t1_geometric_steps_and_primaries():
    mesh = one_face()
    gp = geometry_params(mesh)
    d1, d2 = geometric_steps(gp, 1.0)
    assert d1 == pytest.approx(0.161971, abs=1e-6)
    assert d2 == pytest.approx(0.114531, abs=1e-6)
    ab = math.sqrt(13)
    dist = primary_distances(ab, d1, d2)
    assert dist[:3] == pytest.approx([0.16197089, 0.18052153, 0.20119679], abs=1e-8)
    assert np.array_equal(dist[:3], d1 * (1 + d2) ** np.arange(3.0))
    assert len(dist) == 29
    assert d1 * (1 + d2) ** 28 < ab <= d1 * (1 + d2) ** 29
    d = geometric_discretize(mesh, gp, 1.0)
    e = mesh.edge_index(0, 1)
    anchors = {}
    for p in d.steiner_points(e):
        for o in (p.origin,) + p.extra_origins:
            if o[0] == "primary":
                anchors.setdefault(o[1], set()).add(o[2])
    assert anchors == {0: set(range(29)), 1: set(range(29))}


def test_geometric_level_edge_has_primaries_only():
    mesh = one_face()
    d = geometric_discretize(mesh, epsilon=1.0)
    e = mesh.edge_index(1, 2)
    assert {p.origin[0] for p in d.steiner_points(e)} == {"primary"}
    assert int(d.origin_code[d.edge_nodes(e)[1:-1]].max()) == PRIMARY


def test_geometric_isohypse_from_vertices_and_primaries():
    mesh = gen_random_terrain(8, seed=3, levels=None)
    d = geometric_discretize(mesh, epsilon=1.0)
    vz = mesh.vertices[:, 2]
    a = mesh.vertices[mesh.edges[:, 0], 2]
    b = mesh.vertices[mesh.edges[:, 1], 2]
    # a primary height of edge 0 shows up on every non-level edge spanning it
    src = d.steiner_points(0)
    prim = [p for p in src if p.origin[0] == "primary"]
    probe = prim[len(prim) // 2].height
    for e in range(mesh.n_edges):
        if a[e] != b[e] and min(a[e], b[e]) < probe < max(a[e], b[e]):
            assert probe in d.heights[d.edge_nodes(e)]
    for v in range(mesh.n_vertices):
        for e in range(mesh.n_edges):
            if min(a[e], b[e]) < vz[v] < max(a[e], b[e]):
                assert vz[v] in d.heights[d.edge_nodes(e)]


def test_vicinity_radius():
    mesh = gen_random_terrain(10, seed=1)
    gp = geometry_params(mesh)
    d = geometric_discretize(mesh, gp, 1.0)
    vic = d.vicinities()
    assert len(vic) == mesh.n_vertices
    assert all(v.radius == pytest.approx(gp.h / 60) and v.radius < gp.h / 2 for v in vic)


@pytest.mark.parametrize("eps", [0.0, -1.0, 1.5, float("nan")])
def test_invalid_epsilon(eps):
    with pytest.raises(InvalidEpsilon):
        discretize(one_face(), eps, "uniform")


def test_hybrid_t1():
    ch = hybrid_select(geometry_params(one_face()), 1.0)
    assert ch.scheme == "uniform"
    assert ch.uniform_bound == pytest.approx(39.351, abs=1e-3)
    assert ch.geometric_bound == pytest.approx(1048.9, abs=0.1)


def test_hybrid_steep_and_level():
    c = math.cos(math.radians(89.9))
    gp = GeometryParams(n=10, L=2.0, h=1.0, theta=math.radians(89.9), cos_theta=c, X=2 / c, Xprime=2.0)
    ch = hybrid_select(gp, 1.0)
    assert ch.scheme == "geometric"
    assert ch.uniform_bound == pytest.approx(57296, rel=1e-4)
    assert ch.geometric_bound == pytest.approx(1020 * math.log2(120), rel=1e-12)
    assert ch.geometric_bound == pytest.approx(7045, abs=1)
    flat = GeometryParams(n=10, L=2.0, h=1.0, theta=0.0, cos_theta=1.0, X=2.0, Xprime=2.0)
    assert hybrid_select(flat, 0.3).scheme == "uniform"


def test_dyadic_split():
    for eps in (1.0, 0.5, 0.1, 0.3, 0.01):
        r, k = dyadic_split(eps)
        assert 0.5 < r <= 1 and r * 2.0**-k == eps
    gp = geometry_params(one_face())
    assert level_parts(3.0, gp, 0.05) == 2 * level_parts(3.0, gp, 0.1)


@pytest.mark.parametrize("eps", [1.0, 0.5, 0.1])
def test_uniform_nesting(eps):
    mesh = gen_random_terrain(10, seed=6)
    gp = geometry_params(mesh)
    coarse = uniform_discretize(mesh, gp, eps)
    fine = uniform_discretize(mesh, gp, eps / 2)
    for e in range(mesh.n_edges):
        zc = coarse.heights[coarse.edge_nodes(e)]
        if zc[0] != zc[-1]:
            assert np.isin(zc, fine.heights[fine.edge_nodes(e)]).all()
        else:
            assert np.isin(coarse.node_t[coarse.edge_nodes(e)[1:-1]], fine.node_t[fine.edge_nodes(e)]).all()


@pytest.mark.parametrize("scheme", ["uniform", "geometric"])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_counts_only_matches_build(scheme, seed):
    mesh = gen_random_terrain(10, seed=seed, levels=None)
    d = discretize(mesh, 1.0, scheme)
    counts = count_edge_nodes(mesh, 1.0, scheme)
    assert np.all(d.edge_counts() <= counts)
    assert np.all(counts - d.edge_counts() <= 2)


def test_star_uniform_counts():
    sp = gen_star_pyramid(5)
    d = discretize(sp.mesh, 1.0, "uniform")
    assert d.n_nodes == sp.mesh.n_vertices + d.n_steiner
    assert d.n_steiner == int((d.edge_counts() - 2).sum())


def test_steiner_csv_roundtrip():
    mesh = one_face()
    d = uniform_discretize(mesh, epsilon=1.0)
    buf = io.StringIO()
    d.write_steiner_csv(buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "edge_index,t,x,y,z,origin"
    assert len(rows) == 1 + d.n_steiner
    e, t, x, y, z, origin = rows[1].split(",")
    node = mesh.n_vertices
    assert float(t) == d.node_t[node] and float(z) == d.xyz[node, 2]
    assert origin.split(":")[0] in {"plane", "vertex_plane", "level_spacing"}


def test_origin_codes_present():
    d = uniform_discretize(one_face(), epsilon=1.0)
    codes = set(d.origin_code[3:].tolist())
    assert codes == {PLANE, LEVEL_SPACING}


def test_counts_only_plane_count_exact():
    from sdpath.discretize import _plane_count, _plane_range

    rng = np.random.default_rng(1)
    for _ in range(200):
        zlo, zhi = np.sort(rng.uniform(-1, 3, 2))
        delta = rng.uniform(0.001, 0.5)
        assert _plane_count(zlo, zhi, delta) == len(_plane_range(zlo, zhi, delta)[0])


def test_nearly_level_edge_refused():
    mesh = TerrainMesh(np.array([[0, 0, 0.0], [1, 0, 1e-200], [0, 1, 1.0]]), [[0, 1, 2]])
    with pytest.raises(ValueError):
        uniform_discretize(mesh, epsilon=1.0)
    assert count_edge_nodes(mesh, 1.0, "uniform").max() == np.iinfo(np.int64).max
    assert geometric_discretize(mesh, epsilon=1.0).n_nodes < 10_000
