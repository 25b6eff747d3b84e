from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import diags

from src.services.mesh.mesh import Mesh

AREA_TOLERANCE = 1e-10
ANTISYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    field: str
    passed: bool
    worst_index: Optional[Tuple[int, ...]] = None
    magnitude: float = 0.0
    detail: str = ""


@dataclass
class MeshValidationReport:
    checks: List[CheckResult] = field(default_factory=list)
    boundary_edges: int = 0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def conservation_hypotheses_hold(self) -> bool:
        """Conservation proofs need a closed (periodic, boundary-free) mesh."""
        return self.boundary_edges == 0

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)


def _first(mask: np.ndarray) -> Optional[Tuple[int, ...]]:
    hits = np.argwhere(mask)
    return tuple(int(x) for x in hits[0]) if hits.size else None


def _check_normal_signs(mesh: Mesh, interior: np.ndarray) -> CheckResult:
    bad = interior & ~((mesh.nSign[:, 0] == 1) & (mesh.nSign[:, 1] == -1))
    return CheckResult(
        "normal_signs", "nSign", not bad.any(), _first(bad), float(bad.sum()),
        "n(e, i1) must be +1 and n(e, i2) must be -1",
    )


def _check_tangent_signs(mesh: Mesh) -> CheckResult:
    bad = mesh.tSign[:, 0] * mesh.tSign[:, 1] != -1
    return CheckResult(
        "tangent_signs", "tSign", not bad.any(), _first(bad), float(bad.sum()),
        "t(e, v1) t(e, v2) must be -1",
    )


def _check_areas(mesh: Mesh, active_cells: np.ndarray) -> List[CheckResult]:
    total_cell = float(np.sum(mesh.areaCell[active_cells]))
    total_dual = float(np.sum(mesh.areaDual))
    total_kite = float(np.sum(mesh.kiteArea[mesh.cellsOnVertex >= 0]))
    scale = max(total_cell, np.finfo(float).tiny)
    dual_gap = abs(total_dual - total_cell) / scale
    kite_gap = abs(total_kite - total_cell) / scale

    kite_rows = np.where(mesh.cellsOnVertex >= 0, mesh.kiteArea, 0.0).sum(axis=1)
    row_gap = np.abs(kite_rows - mesh.areaDual) / np.maximum(mesh.areaDual, np.finfo(float).tiny)
    positive = (mesh.areaCell[active_cells] > 0).all() and (mesh.lEdge > 0).all() and (mesh.dEdge > 0).all()
    return [
        CheckResult("dual_area_total", "areaDual", dual_gap <= AREA_TOLERANCE, None, dual_gap),
        CheckResult("kite_area_total", "kiteArea", kite_gap <= AREA_TOLERANCE, None, kite_gap),
        CheckResult(
            "kite_area_per_vertex", "kiteArea", bool(row_gap.max(initial=0.0) <= AREA_TOLERANCE),
            (int(np.argmax(row_gap)),) if row_gap.size else None, float(row_gap.max(initial=0.0)),
        ),
        CheckResult("positive_geometry", "areaCell", bool(positive)),
    ]


def _check_euler(mesh: Mesh) -> CheckResult:
    chi = mesh.nVertices - mesh.nEdges + mesh.nCells
    if not mesh.is_periodic:
        return CheckResult("euler_characteristic", "nVertices", True, None, float(chi), "not periodic, skipped")
    return CheckResult("euler_characteristic", "nVertices", chi == 0, None, float(chi), "torus requires V - E + C = 0")


def _check_edge_membership(mesh: Mesh) -> CheckResult:
    """Each edge is listed by exactly its cellsOnEdge entries."""
    width = mesh.edgesOnCell.shape[1]
    listed = np.arange(width)[None, :] < mesh.nEdgesOnCell[:, None]
    owners = np.repeat(np.arange(mesh.nCells), mesh.nEdgesOnCell)
    edge_ids = mesh.edgesOnCell[listed]
    in_range = (edge_ids >= 0) & (edge_ids < mesh.nEdges)
    if not in_range.all():
        return CheckResult("edge_membership", "edgesOnCell", False, (int(owners[~in_range][0]),), 1.0)
    counts = np.bincount(edge_ids, minlength=mesh.nEdges)
    expected = (mesh.cellsOnEdge >= 0).sum(axis=1)
    first_hit = mesh.cellsOnEdge[edge_ids, 0] == owners
    second_hit = mesh.cellsOnEdge[edge_ids, 1] == owners
    stray = ~(first_hit | second_hit)
    bad_edges = counts != expected
    if stray.any():
        return CheckResult(
            "edge_membership", "edgesOnCell", False, (int(edge_ids[stray][0]),), float(stray.sum()),
            "edge listed by a cell that is not one of its cellsOnEdge",
        )
    return CheckResult(
        "edge_membership", "edgesOnCell", not bad_edges.any(), _first(bad_edges), float(bad_edges.sum()),
    )


def _check_perp_antisymmetry(mesh: Mesh) -> CheckResult:
    if not mesh.has_perp_weights:
        return CheckResult("perp_antisymmetry", "perpWeights", False, None, np.inf, "weights missing")
    scaled = (mesh.perp_matrix() @ diags(mesh.lEdge)).tocsr()   # l(e') w(e, e')
    residual = (scaled + scaled.T).tocoo()
    scale = float(np.abs(scaled.data).max()) if scaled.nnz else 1.0
    if residual.nnz == 0:
        return CheckResult("perp_antisymmetry", "perpWeights", True, None, 0.0)
    worst = int(np.argmax(np.abs(residual.data)))
    magnitude = float(abs(residual.data[worst]) / scale)
    return CheckResult(
        "perp_antisymmetry", "perpWeights", magnitude <= ANTISYMMETRY_TOLERANCE,
        (int(residual.row[worst]), int(residual.col[worst])), magnitude,
        "l(e') w(e, e') + l(e) w(e', e), relative to max |l w|",
    )


def validate_mesh(mesh: Mesh) -> MeshValidationReport:
    """
    Report-only check of every mesh invariant. Never raises on a bad mesh;
    `load_mesh` turns the first failure into a MeshFormatError.
    """
    interior = np.all(mesh.cellsOnEdge >= 0, axis=1)
    active_cells = mesh.nEdgesOnCell > 0
    report = MeshValidationReport(boundary_edges=int((~interior).sum()))
    report.checks.append(_check_normal_signs(mesh, interior))
    report.checks.append(_check_tangent_signs(mesh))
    report.checks.extend(_check_areas(mesh, active_cells))
    report.checks.append(_check_euler(mesh))
    report.checks.append(_check_edge_membership(mesh))
    report.checks.append(_check_perp_antisymmetry(mesh))
    return report
