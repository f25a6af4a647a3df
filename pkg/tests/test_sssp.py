from __future__ import annotations

import math

import numpy as np
import pytest

from sdpath.discretize import discretize, uniform_discretize
from sdpath.errors import UnreachableTarget
from sdpath.graph import DescentGraph
from sdpath.oracle import gen_random_terrain, gen_star_pyramid, naive_sssp
from sdpath.sssp import bushwhack, dijkstra, extract_path, solve
from sdpath.terrain import TerrainMesh

from .conftest import one_face

SMALL = [
    (one_face(), 1.0, "uniform"),
    (one_face(), 1.0, "geometric"),
    (gen_random_terrain(5, seed=1), 1.0, "uniform"),
    (gen_random_terrain(6, seed=2), 1.0, "uniform"),
    (gen_random_terrain(6, seed=3), 1.0, "uniform"),
    (gen_star_pyramid(3).mesh, 1.0, "uniform"),
]


@pytest.fixture
def t1_graph():
    return DescentGraph(uniform_discretize(one_face(), epsilon=1.0))


def test_t1_dist_to_b(t1_graph):
    for algo in ("dijkstra", "bushwhack"):
        t = solve(t1_graph, 0, algo)
        assert t.dist[1] == math.sqrt(13)
        p = extract_path(t, 1)
        assert p.nodes == [0, 1] and p.length == math.sqrt(13)
    assert naive_sssp(t1_graph, 0)[1] == math.sqrt(13)


def test_source_path(t1_graph):
    t = dijkstra(t1_graph, 0)
    p = extract_path(t, 0)
    assert p.nodes == [0] and p.length == 0.0


def test_isolated_source():
    # the lowest vertex has no equal-height neighbour
    mesh = TerrainMesh(np.array([[0, 0, 0.0], [1, 0, 1.0], [0, 1, 2.0]]), [[0, 1, 2]])
    g = DescentGraph(uniform_discretize(mesh, epsilon=1.0))
    for algo in ("dijkstra", "bushwhack"):
        t = solve(g, 0, algo)
        assert np.isfinite(t.dist).sum() == 1 and t.dist[0] == 0.0
        with pytest.raises(UnreachableTarget):
            extract_path(t, 1)


def test_unknown_algorithm(t1_graph):
    with pytest.raises(ValueError):
        solve(t1_graph, 0, "astar")


@pytest.mark.parametrize("mesh, eps, scheme", SMALL)
def test_three_way_equivalence(mesh, eps, scheme):
    g = DescentGraph(discretize(mesh, eps, scheme))
    assert g.n_nodes <= 1000
    for s in range(mesh.n_vertices):
        a = dijkstra(g, s)
        b = bushwhack(g, s, check=True)
        c = naive_sssp(g, s)
        assert b.stats["claim_violations"] == 0
        assert np.array_equal(a.dist, c)
        assert np.array_equal(np.isfinite(a.dist), np.isfinite(b.dist))
        fin = np.isfinite(a.dist)
        assert np.allclose(b.dist[fin], a.dist[fin], rtol=1e-9, atol=0)


@pytest.mark.parametrize("seed", [1, 2])
def test_tree_invariants(seed):
    mesh = gen_random_terrain(10, seed=seed)
    g = DescentGraph(discretize(mesh, 1.0, "uniform"))
    s = int(np.argmax(mesh.vertices[:, 2]))
    for algo in ("dijkstra", "bushwhack"):
        t = solve(g, s, algo)
        fin = np.nonzero(np.isfinite(t.dist))[0]
        assert t.dist[s] == 0 and t.parent[s] == -1
        for v in fin:
            if v == s:
                continue
            u = t.parent[v]
            assert g.link_allowed(u, v)
            assert t.dist[v] == pytest.approx(t.dist[u] + g.weight(u, v), rel=1e-9)
        straight = np.linalg.norm(g.xyz[fin] - g.xyz[s], axis=1)
        assert np.all(t.dist[fin] >= straight * (1 - 1e-12))
        for v in fin[:: max(1, len(fin) // 50)]:
            nodes = t.path_nodes(v)
            z = g.heights[nodes]
            assert nodes[0] == s and np.all(np.diff(z) <= 0)


def test_bushwhack_matches_dijkstra_larger():
    mesh = gen_random_terrain(50, seed=7)
    g = DescentGraph(discretize(mesh, 0.5, "uniform"))
    s = int(np.argmax(mesh.vertices[:, 2]))
    a = dijkstra(g, s)
    b = bushwhack(g, s)
    fin = np.isfinite(a.dist)
    assert np.array_equal(fin, np.isfinite(b.dist))
    assert np.all(np.abs(a.dist[fin] - b.dist[fin]) <= 1e-9 * (1 + a.dist[fin]))


def test_bushwhack_geometric_continuous():
    mesh = gen_random_terrain(10, seed=3, levels=None)
    g = DescentGraph(discretize(mesh, 1.0, "geometric"))
    s = int(np.argmax(mesh.vertices[:, 2]))
    assert np.array_equal(dijkstra(g, s).dist, bushwhack(g, s).dist)


def test_dijkstra_ties_prefer_small_parent():
    # square split in two level faces: every route ties somewhere
    V = np.array([[0, 0, 1.0], [1, 0, 1.0], [0, 1, 1.0], [1, 1, 1.0]])
    g = DescentGraph(uniform_discretize(TerrainMesh(V, [[0, 1, 2], [1, 3, 2]]), epsilon=1.0))
    t1 = dijkstra(g, 0)
    t2 = dijkstra(g, 0)
    assert np.array_equal(t1.parent, t2.parent)


def test_python_fallback_matches_compiled():
    # the backend is picked at import time, so the fallback runs in a child
    import json
    import os
    import subprocess
    import sys

    code = (
        "import json, numpy as np\n"
        "from sdpath._accel import USE_NUMBA\n"
        "from sdpath.discretize import discretize\n"
        "from sdpath.graph import DescentGraph\n"
        "from sdpath.oracle import gen_random_terrain\n"
        "from sdpath.sssp import solve\n"
        "g = DescentGraph(discretize(gen_random_terrain(8, seed=2), 1.0, 'uniform'))\n"
        "out = {a: solve(g, 0, a).dist.tolist() for a in ('dijkstra', 'bushwhack')}\n"
        "print(json.dumps([USE_NUMBA, out]))\n"
    )
    env = dict(os.environ, SDPATH_DISABLE_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    used_numba, out = json.loads(res.stdout)
    assert not used_numba
    g = DescentGraph(discretize(gen_random_terrain(8, seed=2), 1.0, "uniform"))
    for algo, dist in out.items():
        ref = solve(g, 0, algo).dist
        assert np.array_equal(np.array(dist, dtype=float), ref)
