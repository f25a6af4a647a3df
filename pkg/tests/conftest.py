from __future__ import annotations

import numpy as np
import pytest

from sdpath.oracle import exact_two_face_unfold
from sdpath.terrain import TerrainMesh, locate, validate_terrain

T1_TEXT = """# one face
v 0 0 4
v 3 0 2
v 0 3 2
f 0 1 2
"""


def one_face():
    return TerrainMesh(np.array([[0, 0, 4.0], [3, 0, 2.0], [0, 3, 2.0]]), [[0, 1, 2]])


def two_face_case(seed, centred=True):
    """Random convex quad split along (1,2), with s in face 0 and v in face 1.

    Retries until the unfolded straight route is descending, so the exact
    length is known. Returns (mesh, s_xy, v_xy, exact_length).
    """
    rng = np.random.default_rng(seed)
    square = np.array([[0, 0], [4, 0], [0, 4], [4, 4]], dtype=float)
    while True:
        xy = square + rng.uniform(-0.5, 0.5, (4, 2))
        z = rng.uniform(0.0, 3.0, 4)
        mesh = TerrainMesh(np.column_stack([xy, z]), [[0, 1, 2], [1, 3, 2]])
        if not validate_terrain(mesh).ok:
            continue
        for _ in range(50):
            if centred:
                a = np.full(3, 1 / 3) + rng.uniform(-0.05, 0.05, 3)
                a /= a.sum()
            else:
                a = rng.dirichlet([2, 2, 2])
            b = rng.dirichlet([2, 2, 2])
            ps = a @ xy[[0, 1, 2]]
            pv = b @ xy[[1, 3, 2]]
            s = locate(mesh, *ps)
            v = locate(mesh, *pv)
            if s.kind != "face" or v.kind != "face":
                continue
            ex = exact_two_face_unfold(mesh, s, v)
            if ex is not None:
                return mesh, (float(ps[0]), float(ps[1])), (float(pv[0]), float(pv[1])), ex


@pytest.fixture
def t1():
    return one_face()
