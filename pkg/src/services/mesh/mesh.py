from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix

# Field names follow the mesh file schema (camelCase on purpose).
INDEX_FIELDS = (
    "cellsOnEdge",
    "edgesOnCell",
    "verticesOnCell",
    "verticesOnEdge",
    "edgesOnVertex",
    "cellsOnVertex",
    "edgesOnEdge",
)


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Static TRiSK staggered mesh: thickness at cells, normal velocity at edges,
    vorticity at vertices (dual cells).

    Ragged per-cell lists are padded with -1 and come with an `nEdgesOnCell`
    count. `kiteArea[v, j]` is aligned with `cellsOnVertex[v, j]`, `nSign[e, s]`
    with `cellsOnEdge[e, s]` and `tSign[e, s]` with `verticesOnEdge[e, s]`.
    `perpWeights[e, k]` multiplies the flux on `edgesOnEdge[e, k]`.
    """

    nCells: int
    nEdges: int
    nVertices: int
    cellsOnEdge: np.ndarray
    nEdgesOnCell: np.ndarray
    edgesOnCell: np.ndarray
    verticesOnCell: np.ndarray
    verticesOnEdge: np.ndarray
    edgesOnVertex: np.ndarray
    cellsOnVertex: np.ndarray
    areaCell: np.ndarray
    areaDual: np.ndarray
    kiteArea: np.ndarray
    lEdge: np.ndarray
    dEdge: np.ndarray
    nSign: np.ndarray
    tSign: np.ndarray
    bottomElevation: np.ndarray
    restingDepth: np.ndarray
    coriolisVertex: np.ndarray
    xCell: np.ndarray
    yCell: np.ndarray
    xVertex: np.ndarray
    yVertex: np.ndarray
    xEdge: np.ndarray
    yEdge: np.ndarray
    xPeriod: float = 0.0
    yPeriod: float = 0.0
    nEdgesOnEdge: Optional[np.ndarray] = None
    edgesOnEdge: Optional[np.ndarray] = None
    perpWeights: Optional[np.ndarray] = None
    _cache: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_cache", {})
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, np.ndarray):
                value.setflags(write=False)

    @property
    def is_periodic(self) -> bool:
        return self.xPeriod > 0 and self.yPeriod > 0

    @property
    def has_perp_weights(self) -> bool:
        return self.perpWeights is not None

    def array_fields(self) -> dict[str, np.ndarray]:
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if isinstance(getattr(self, f.name), np.ndarray)
        }

    def equals(self, other: "Mesh") -> bool:
        """Field-for-field, bit-for-bit comparison."""
        for f in fields(self):
            if f.name == "_cache":
                continue
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if a is None or b is None or a.shape != b.shape or a.dtype.kind != b.dtype.kind:
                    return False
                if not np.array_equal(a, b):
                    return False
            elif a != b:
                return False
        return True

    def perp_matrix(self) -> csr_matrix:
        """Sparse W with F_perp = W @ F."""
        if "perp" not in self._cache:
            if self.perpWeights is None:
                raise ValueError("mesh has no perp weights")
            mask = np.arange(self.edgesOnEdge.shape[1])[None, :] < self.nEdgesOnEdge[:, None]
            rows = np.repeat(np.arange(self.nEdges), self.nEdgesOnEdge)
            W = csr_matrix(
                (self.perpWeights[mask], (rows, self.edgesOnEdge[mask])),
                shape=(self.nEdges, self.nEdges),
            )
            self._cache["perp"] = W
        return self._cache["perp"]

    def cell_adjacency(self) -> csr_matrix:
        """Symmetric 0/1 cell-to-cell adjacency across interior edges."""
        if "adj" not in self._cache:
            interior = np.all(self.cellsOnEdge >= 0, axis=1)
            c0, c1 = self.cellsOnEdge[interior, 0], self.cellsOnEdge[interior, 1]
            rows = np.concatenate([c0, c1])
            cols = np.concatenate([c1, c0])
            A = csr_matrix(
                (np.ones(rows.size), (rows, cols)), shape=(self.nCells, self.nCells)
            )
            A.data[:] = 1.0
            self._cache["adj"] = A
        return self._cache["adj"]

    def cell_edge_incidence(self) -> csr_matrix:
        """Rows are cells, columns edges, 1 where the edge bounds the cell."""
        if "inc" not in self._cache:
            mask = np.arange(self.edgesOnCell.shape[1])[None, :] < self.nEdgesOnCell[:, None]
            rows = np.repeat(np.arange(self.nCells), self.nEdgesOnCell)
            self._cache["inc"] = csr_matrix(
                (np.ones(rows.size), (rows, self.edgesOnCell[mask])),
                shape=(self.nCells, self.nEdges),
            )
        return self._cache["inc"]

    def surface_vector_on_edges(self, vx: float, vy: float) -> np.ndarray:
        """Normal components n_e . (vx, vy) of a uniform vector field."""
        nx, ny = self.edge_normals()
        return nx * vx + ny * vy

    def edge_normals(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit normals pointing from cellsOnEdge[:, 0] to cellsOnEdge[:, 1]."""
        if "normals" not in self._cache:
            c0, c1 = self.cellsOnEdge[:, 0], self.cellsOnEdge[:, 1]
            dx = self.periodic_delta(self.xCell[c1] - self.xCell[c0], self.xPeriod)
            dy = self.periodic_delta(self.yCell[c1] - self.yCell[c0], self.yPeriod)
            norm = np.hypot(dx, dy)
            self._cache["normals"] = (dx / norm, dy / norm)
        return self._cache["normals"]

    @staticmethod
    def periodic_delta(delta: np.ndarray, period: float) -> np.ndarray:
        if period <= 0:
            return delta
        return delta - period * np.round(delta / period)
