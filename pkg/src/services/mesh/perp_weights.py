from __future__ import annotations

from typing import TYPE_CHECKING, Tuple

import numpy as np
from scipy.sparse import coo_matrix

from src.services.errors import UnsupportedTopologyError

if TYPE_CHECKING:
    from src.services.mesh.mesh import Mesh


def _slot_sign(pairs: np.ndarray, signs: np.ndarray, rows: np.ndarray, members: np.ndarray) -> np.ndarray:
    """signs[row, s] where pairs[row, s] == member."""
    first = pairs[rows, 0] == members
    return np.where(first, signs[rows, 0], signs[rows, 1])


def _kite_fraction(mesh: "Mesh", vertices: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """kiteArea(v, i) / areaCell(i) for matching arrays of vertices and cells."""
    cov = mesh.cellsOnVertex[vertices]
    slot = np.argmax(cov == cells[..., None], axis=-1)
    return np.take_along_axis(mesh.kiteArea[vertices], slot[..., None], axis=-1)[..., 0] / mesh.areaCell[cells]


def compute_perp_weights(mesh: "Mesh") -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    TRiSK flux-mapping weights, F_perp[e] = sum_k w[e, k] F[edgesOnEdge[e, k]].

    Kite-fraction construction: walking counterclockwise round cell i from the
    source edge e', the weight onto edge e is

        t(e, v) n(e', i) (1/2 - sum of kite fractions passed) l(e') / d(e)

    with v the corner where the walk enters e. Cells are processed in groups of
    equal degree; shared pairs are summed by the COO->CSR conversion.

    Returns (nEdgesOnEdge, edgesOnEdge padded with -1, weights padded with 0).
    """
    valid = mesh.cellsOnVertex >= 0
    bad = np.flatnonzero(valid.sum(axis=1) != 3)
    if bad.size or mesh.cellsOnVertex.shape[1] != 3:
        v = int(bad[0]) if bad.size else 0
        raise UnsupportedTopologyError(f"vertex {v} does not join exactly 3 cells")

    rows, cols, vals = [], [], []
    active = mesh.nEdgesOnCell > 0
    for m in np.unique(mesh.nEdgesOnCell[active]):
        group = np.flatnonzero(mesh.nEdgesOnCell == m)
        edges = mesh.edgesOnCell[group, :m]
        verts = mesh.verticesOnCell[group, :m]
        cells = np.repeat(group[:, None], m, axis=1)
        kite = _kite_fraction(mesh, verts, cells)
        for j1 in range(m):
            source = edges[:, j1]
            n_src = _slot_sign(mesh.cellsOnEdge, mesh.nSign, source, group)
            acc = np.full(group.size, 0.5)
            for s in range(1, m):
                j = (j1 + s) % m
                target = edges[:, j]
                acc = acc - kite[:, j]
                t_tgt = _slot_sign(mesh.verticesOnEdge, mesh.tSign, target, verts[:, j])
                rows.append(target)
                cols.append(source)
                vals.append(t_tgt * n_src * acc * mesh.lEdge[source] / mesh.dEdge[target])

    W = coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mesh.nEdges, mesh.nEdges),
    ).tocsr()
    W.sum_duplicates()
    W.sort_indices()

    counts = np.diff(W.indptr)
    width = int(counts.max()) if counts.size else 0
    edges_on_edge = np.full((mesh.nEdges, width), -1, dtype=np.int64)
    weights = np.zeros((mesh.nEdges, width))
    slot = np.arange(W.nnz) - np.repeat(W.indptr[:-1], counts)
    owner = np.repeat(np.arange(mesh.nEdges), counts)
    edges_on_edge[owner, slot] = W.indices
    weights[owner, slot] = W.data
    return counts.astype(np.int64), edges_on_edge, weights
