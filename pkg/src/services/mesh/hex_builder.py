from __future__ import annotations

import logging
from dataclasses import replace
from typing import Optional

import numpy as np

from src.services.errors import MeshSizingError
from src.services.mesh.mesh import Mesh
from src.services.mesh.perp_weights import compute_perp_weights

logger = logging.getLogger(__name__)

SQRT3 = np.sqrt(3.0)
MIN_CELLS_PER_DIRECTION = 4


def _neighbours(nx: int, ny: int):
    """Index arrays (E, W, NE, NW, SW, SE) for the offset-row layout, periodic both ways."""
    j, i = np.divmod(np.arange(nx * ny), nx)
    odd = j % 2

    def cell(ii, jj):
        return (jj % ny) * nx + (ii % nx)

    east = cell(i + 1, j)
    west = cell(i - 1, j)
    ne = cell(i + odd, j + 1)
    nw = cell(i - 1 + odd, j + 1)
    sw = cell(i - 1 + odd, j - 1)
    se = cell(i + odd, j - 1)
    return east, west, ne, nw, sw, se


def build_periodic_hex_mesh(
    nx: int,
    ny: int,
    dc: float,
    *,
    coriolis: float = 0.0,
    resting_depth: float = 1.0,
    bottom_elevation: Optional[np.ndarray] = None,
    depth: Optional[np.ndarray] = None,
) -> Mesh:
    """
    Doubly periodic regular hexagonal mesh with a triangular dual.

    Cell (i, j) sits at x = (i + (j % 2)/2) dc, y = j dc sqrt(3)/2. Every cell
    owns three edges (normals at 0, 60 and 120 degrees) and two vertices
    (its 30 and 90 degree corners), so nEdges = 3 nCells and nVertices = 2 nCells.
    """
    if nx < MIN_CELLS_PER_DIRECTION or ny < MIN_CELLS_PER_DIRECTION:
        raise MeshSizingError(
            f"periodic hex mesh needs nx, ny >= {MIN_CELLS_PER_DIRECTION}, got {nx}x{ny}"
        )
    if ny % 2:
        raise MeshSizingError(f"ny must be even for the periodic row offset, got {ny}")
    if not dc > 0:
        raise MeshSizingError(f"cell spacing must be positive, got {dc}")

    n_cells = nx * ny
    cells = np.arange(n_cells)
    east, west, ne, nw, sw, se = _neighbours(nx, ny)
    x_period = nx * dc
    y_period = ny * dc * SQRT3 / 2

    j, i = np.divmod(cells, nx)
    x_cell = (i + 0.5 * (j % 2)) * dc
    y_cell = j * dc * SQRT3 / 2

    # edges 3c, 3c+1, 3c+2 are the east, north-east and north-west edges of cell c
    e_east, e_ne, e_nw = 3 * cells, 3 * cells + 1, 3 * cells + 2
    cells_on_edge = np.empty((3 * n_cells, 2), dtype=np.int64)
    cells_on_edge[e_east] = np.column_stack([cells, east])
    cells_on_edge[e_ne] = np.column_stack([cells, ne])
    cells_on_edge[e_nw] = np.column_stack([cells, nw])

    # vertices 2c and 2c+1 are the 30 and 90 degree corners of cell c
    va, vb = 2 * cells, 2 * cells + 1

    # counterclockwise, slot k has outward normal at 60k degrees and
    # runs from the corner at 60k-30 to the corner at 60k+30
    edges_on_cell = np.column_stack(
        [e_east, e_ne, e_nw, 3 * west, 3 * sw + 1, 3 * se + 2]
    )
    vertices_on_cell = np.column_stack(
        [2 * se + 1, va, vb, 2 * west, 2 * sw + 1, 2 * sw]
    )

    vertices_on_edge = np.empty((3 * n_cells, 2), dtype=np.int64)
    for k, e in enumerate((e_east, e_ne, e_nw)):
        vertices_on_edge[e] = np.column_stack([vertices_on_cell[:, k], vertices_on_cell[:, k + 1]])
    # start corner lies in -t_e, end corner in +t_e (t_e = k x n_e)
    t_sign = np.tile(np.array([-1, 1], dtype=np.int64), (3 * n_cells, 1))
    n_sign = np.tile(np.array([1, -1], dtype=np.int64), (3 * n_cells, 1))

    n_vertices = 2 * n_cells
    cells_on_vertex = np.empty((n_vertices, 3), dtype=np.int64)
    cells_on_vertex[va] = np.column_stack([cells, east, ne])
    cells_on_vertex[vb] = np.column_stack([cells, ne, nw])
    # edge j sits between cellsOnVertex[j] and cellsOnVertex[j+1]
    edges_on_vertex = np.empty((n_vertices, 3), dtype=np.int64)
    edges_on_vertex[va] = np.column_stack([e_east, 3 * east + 2, e_ne])
    edges_on_vertex[vb] = np.column_stack([e_ne, 3 * nw, e_nw])

    x_vertex = np.empty(n_vertices)
    y_vertex = np.empty(n_vertices)
    x_vertex[va] = np.mod(x_cell + dc / 2, x_period)
    y_vertex[va] = np.mod(y_cell + dc / (2 * SQRT3), y_period)
    x_vertex[vb] = x_cell
    y_vertex[vb] = np.mod(y_cell + dc / SQRT3, y_period)

    angles = np.deg2rad([0.0, 60.0, 120.0])
    x_edge = np.empty(3 * n_cells)
    y_edge = np.empty(3 * n_cells)
    for e, theta in zip((e_east, e_ne, e_nw), angles):
        x_edge[e] = np.mod(x_cell + 0.5 * dc * np.cos(theta), x_period)
        y_edge[e] = np.mod(y_cell + 0.5 * dc * np.sin(theta), y_period)

    area_cell = np.full(n_cells, SQRT3 / 2 * dc**2)
    area_dual = np.full(n_vertices, SQRT3 / 4 * dc**2)
    kite_area = np.full((n_vertices, 3), SQRT3 / 12 * dc**2)

    resting = np.full(n_cells, float(resting_depth)) if depth is None else np.asarray(depth, float).copy()
    bottom = np.zeros(n_cells) if bottom_elevation is None else np.asarray(bottom_elevation, float).copy()

    mesh = Mesh(
        nCells=n_cells,
        nEdges=3 * n_cells,
        nVertices=n_vertices,
        cellsOnEdge=cells_on_edge,
        nEdgesOnCell=np.full(n_cells, 6, dtype=np.int64),
        edgesOnCell=edges_on_cell.astype(np.int64),
        verticesOnCell=vertices_on_cell.astype(np.int64),
        verticesOnEdge=vertices_on_edge,
        edgesOnVertex=edges_on_vertex,
        cellsOnVertex=cells_on_vertex,
        areaCell=area_cell,
        areaDual=area_dual,
        kiteArea=kite_area,
        lEdge=np.full(3 * n_cells, dc / SQRT3),
        dEdge=np.full(3 * n_cells, float(dc)),
        nSign=n_sign,
        tSign=t_sign,
        bottomElevation=bottom,
        restingDepth=resting,
        coriolisVertex=np.full(n_vertices, float(coriolis)),
        xCell=x_cell,
        yCell=y_cell,
        xVertex=x_vertex,
        yVertex=y_vertex,
        xEdge=x_edge,
        yEdge=y_edge,
        xPeriod=float(x_period),
        yPeriod=float(y_period),
    )
    n_edges_on_edge, edges_on_edge, weights = compute_perp_weights(mesh)
    logger.debug("built %dx%d periodic hex mesh, dc=%g m", nx, ny, dc)
    return replace(
        mesh,
        nEdgesOnEdge=n_edges_on_edge,
        edgesOnEdge=edges_on_edge,
        perpWeights=weights,
    )


def with_fields(mesh: Mesh, **overrides) -> Mesh:
    """Copy of `mesh` with some per-cell/per-vertex fields replaced (depth, bottom, f)."""
    return replace(mesh, **{k: np.asarray(v, float).copy() for k, v in overrides.items()})
