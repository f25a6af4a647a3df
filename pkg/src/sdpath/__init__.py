"""Approximate shortest descending paths on triangulated terrains."""
from __future__ import annotations

from .discretize import (
    Discretization,
    SteinerPoint,
    count_edge_nodes,
    discretize,
    geometric_discretize,
    hybrid_select,
    uniform_discretize,
)
from .errors import (
    EmptyMesh,
    InvalidEpsilon,
    NonTerrainMesh,
    ParseError,
    PointOffTerrain,
    SDPError,
    UnreachableTarget,
)
from .graph import DescentGraph
from .pipeline import SDPSolver
from .query import Path, query_node, query_point
from .sssp import ShortestPathTree, bushwhack, dijkstra, extract_path
from .terrain import (
    GeometryParams,
    Point3,
    SurfacePoint,
    TerrainMesh,
    geometry_params,
    insert_source,
    load_terrain,
    locate,
    validate_terrain,
)

__version__ = "0.1.0"
