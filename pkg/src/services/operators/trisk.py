from __future__ import annotations

import logging
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix

from src.dtos.physics_dtos import PhysicsConfig
from src.services.errors import PositivityError
from src.services.mesh import Mesh
from src.services.operators.state import (
    RowSelection,
    State,
    TendencyPair,
    VorticityFields,
    WorkCounters,
    pick,
)

logger = logging.getLogger(__name__)


def _cell_edge_matrix(mesh: Mesh, values: np.ndarray) -> csr_matrix:
    """nCells x nEdges matrix with `values[i, slot]` at (i, edgesOnCell[i, slot])."""
    listed = np.arange(mesh.edgesOnCell.shape[1])[None, :] < mesh.nEdgesOnCell[:, None]
    rows = np.repeat(np.arange(mesh.nCells), mesh.nEdgesOnCell)
    return csr_matrix(
        (values[listed], (rows, mesh.edgesOnCell[listed])), shape=(mesh.nCells, mesh.nEdges)
    )


class TriskOperators:
    """
    TRiSK C-grid operators on one mesh, assembled once as sparse matrices:

        div     (nCells x nEdges)     -n(e,i) l(e) / A(i)
        curl    (nVertices x nEdges)   t(e,v) d(e) / A(v)
        kite    (nVertices x nCells)   kiteArea(v,i) / A(v)
        ke      (nCells x nEdges)      l(e) d(e) / (4 A(i))
        perp    (nEdges x nEdges)      TRiSK weights

    Every tendency accepts an optional RowSelection; intermediates (edge
    thickness, K, q) are formed globally, the final rows are restricted.
    """

    def __init__(self, mesh: Mesh, physics: Optional[PhysicsConfig] = None) -> None:
        self.mesh = mesh
        self.physics = physics or PhysicsConfig()
        self.c0 = np.ascontiguousarray(mesh.cellsOnEdge[:, 0])
        self.c1 = np.ascontiguousarray(mesh.cellsOnEdge[:, 1])
        self.v0 = np.ascontiguousarray(mesh.verticesOnEdge[:, 0])
        self.v1 = np.ascontiguousarray(mesh.verticesOnEdge[:, 1])

        edge_of_cell = np.where(mesh.edgesOnCell >= 0, mesh.edgesOnCell, 0)
        owner = np.arange(mesh.nCells)[:, None]
        n_on_cell = np.where(
            mesh.cellsOnEdge[edge_of_cell, 0] == owner,
            mesh.nSign[edge_of_cell, 0],
            mesh.nSign[edge_of_cell, 1],
        )
        area = mesh.areaCell[:, None]
        self.div = _cell_edge_matrix(mesh, -n_on_cell * mesh.lEdge[edge_of_cell] / area)
        self.ke = _cell_edge_matrix(
            mesh, mesh.lEdge[edge_of_cell] * mesh.dEdge[edge_of_cell] / (4.0 * area)
        )

        eov = mesh.edgesOnVertex
        t_on_vertex = np.where(
            mesh.verticesOnEdge[eov, 0] == np.arange(mesh.nVertices)[:, None],
            mesh.tSign[eov, 0],
            mesh.tSign[eov, 1],
        )
        width = eov.shape[1]
        self.curl = csr_matrix(
            (
                (t_on_vertex * mesh.dEdge[eov] / mesh.areaDual[:, None]).ravel(),
                (np.repeat(np.arange(mesh.nVertices), width), eov.ravel()),
            ),
            shape=(mesh.nVertices, mesh.nEdges),
        )
        valid = mesh.cellsOnVertex >= 0
        self.kite = csr_matrix(
            (
                (mesh.kiteArea / mesh.areaDual[:, None])[valid],
                (np.repeat(np.arange(mesh.nVertices), valid.sum(axis=1)), mesh.cellsOnVertex[valid]),
            ),
            shape=(mesh.nVertices, mesh.nCells),
        )
        self.perp = mesh.perp_matrix()

        nx, ny = mesh.edge_normals()
        wx, wy = self.physics.windVelocity
        self.wind_normal = nx * wx + ny * wy
        self.wind_tangent = -ny * wx + nx * wy
        self.f_active = mesh.coriolisVertex if self.physics.rotationOn else np.zeros(mesh.nVertices)

    @property
    def n_cells(self) -> int:
        return self.mesh.nCells

    @property
    def n_edges(self) -> int:
        return self.mesh.nEdges

    # -- building blocks -------------------------------------------------

    def edge_thickness(self, h: np.ndarray) -> np.ndarray:
        return 0.5 * (h[self.c0] + h[self.c1])

    def thickness_tendency(self, u: np.ndarray, h: np.ndarray, cells: Optional[RowSelection] = None) -> np.ndarray:
        flux = self.edge_thickness(h) * u
        div = self.div if cells is None else cells.rows("div", self.div)
        return div @ flux

    def perp_flux(self, flux: np.ndarray, edges: Optional[RowSelection] = None) -> np.ndarray:
        perp = self.perp if edges is None else edges.rows("perp", self.perp)
        return perp @ flux

    def kinetic_energy(self, u: np.ndarray, cells: Optional[RowSelection] = None) -> np.ndarray:
        ke = self.ke if cells is None else cells.rows("ke", self.ke)
        return ke @ (u * u)

    def vertex_thickness(self, h: np.ndarray) -> np.ndarray:
        h_vertex = self.kite @ h
        if np.any(h_vertex <= 0):
            bad = int(np.argmin(h_vertex))
            raise PositivityError(
                f"dual thickness {h_vertex[bad]:.6g} <= 0", region="dual", index=bad
            )
        return h_vertex

    def vorticity_fields(self, u: np.ndarray, h: np.ndarray) -> VorticityFields:
        """Diagnostic vorticity chain; eta carries f only when rotation is on."""
        zeta = self.curl @ u
        eta = zeta + self.f_active
        h_vertex = self.vertex_thickness(h)
        q = eta / h_vertex
        q_edge = 0.5 * (q[self.v0] + q[self.v1])
        return VorticityFields(zeta=zeta, eta=eta, hVertex=h_vertex, q=q, qEdge=q_edge)

    def _flux_pv(self, u: np.ndarray, h: np.ndarray) -> np.ndarray:
        """PV on edges as seen by the momentum equation (advection/rotation switches)."""
        eta = self.f_active
        if self.physics.advectionOn:
            eta = self.curl @ u + eta
        q = eta / self.vertex_thickness(h)
        return 0.5 * (q[self.v0] + q[self.v1])

    def vorticity_flux(self, u: np.ndarray, h: np.ndarray, edges: Optional[RowSelection] = None) -> np.ndarray:
        """
        q_e F_perp_e. Its dual divergence drives absolute vorticity, and as a
        momentum term it is the discrete -(eta k x u).n_e.
        """
        p = self.physics
        if not (p.advectionOn or p.rotationOn):
            return np.zeros(self.n_edges if edges is None else len(edges))
        q_edge = self._flux_pv(u, h)
        flux = self.edge_thickness(h) * u
        return pick(q_edge, edges) * self.perp_flux(flux, edges)

    def vorticity_tendency_from_flux(self, flux: np.ndarray) -> np.ndarray:
        """Dual-cell tendency of eta driven by an edge vorticity flux (curl of the flux)."""
        return self.curl @ flux

    def gradient_momentum(self, h: np.ndarray, edges: Optional[RowSelection] = None) -> np.ndarray:
        surface = h + self.mesh.bottomElevation
        c0, c1 = pick(self.c0, edges), pick(self.c1, edges)
        return -self.physics.g * (surface[c1] - surface[c0]) / pick(self.mesh.dEdge, edges)

    def slow_momentum(self, u: np.ndarray, h: np.ndarray, edges: Optional[RowSelection] = None) -> np.ndarray:
        p = self.physics
        c0, c1 = pick(self.c0, edges), pick(self.c1, edges)
        du = np.zeros(self.n_edges if edges is None else len(edges))
        if not p.has_slow_terms:
            return du

        need_k = p.advectionOn or p.dragCoefficient > 0 or p.windCoefficient > 0
        K = self.kinetic_energy(u) if need_k else None
        if p.advectionOn or p.rotationOn:
            du = du + self.vorticity_flux(u, h, edges)
        if p.advectionOn:
            du = du - (K[c1] - K[c0]) / pick(self.mesh.dEdge, edges)
        if p.dragCoefficient > 0 or p.windCoefficient > 0:
            h_edge = 0.5 * (h[c0] + h[c1])
            if np.any(h_edge <= 0):
                bad = int(np.argmin(h_edge))
                raise PositivityError(f"edge thickness {h_edge[bad]:.6g} <= 0", region="edge", index=bad)
            u_e = pick(u, edges)
            if p.dragCoefficient > 0:
                speed = np.sqrt(K[c0] + K[c1])          # sqrt(2 * mean K)
                du = du - p.dragCoefficient * speed * u_e / h_edge
            if p.windCoefficient > 0:
                wind_n = pick(self.wind_normal, edges)
                u_t = self.perp_flux(u, edges)
                slip = np.hypot(wind_n - u_e, pick(self.wind_tangent, edges) - u_t)
                du = du + p.windCoefficient * slip * (wind_n - u_e) / h_edge
        return du

    # -- tendencies ------------------------------------------------------

    def tendency_fast(self, state: State, counters: Optional[WorkCounters] = None) -> TendencyPair:
        dh = self.thickness_tendency(state.u, state.h)
        du = self.gradient_momentum(state.h)
        if counters is not None:
            counters.charge(fast_cells=self.n_cells, fast_edges=self.n_edges)
        return TendencyPair(du=du, dh=dh)

    def tendency_slow(self, state: State, counters: Optional[WorkCounters] = None) -> TendencyPair:
        du = self.slow_momentum(state.u, state.h)
        if counters is not None:
            counters.charge(slow_edges=self.n_edges)
        return TendencyPair(du=du, dh=np.zeros(self.n_cells))

    def tendency_full(self, state: State, counters: Optional[WorkCounters] = None) -> TendencyPair:
        fast = self.tendency_fast(state, counters)
        slow = self.tendency_slow(state, counters)
        return TendencyPair(du=fast.du + slow.du, dh=fast.dh + slow.dh)
