from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional

import numpy as np
from scipy.sparse import csr_matrix

from src.services.errors import LabelingError
from src.services.mesh import Mesh

logger = logging.getLogger(__name__)

FINE_LAYERS = 5


class Region(IntEnum):
    """
    Per-cell/per-edge region. FINE_ADJ_l marks fine cells within l*r rings
    of interface one (so F^l is FINE_ADJ_1..FINE_ADJ_l); FINE is deeper.
    """

    FINE = 0
    FINE_ADJ_1 = 1
    FINE_ADJ_2 = 2
    FINE_ADJ_3 = 3
    FINE_ADJ_4 = 4
    FINE_ADJ_5 = 5
    IF1 = 6
    IF2 = 7
    COARSE_INT = 8


# region -> class: 0 fine, 1 interface one, 2 interface two, 3 coarse interior
_CLASS_OF = np.array([0, 0, 0, 0, 0, 0, 1, 2, 3], dtype=np.int8)
CLASS_REGIONS = (Region.FINE, Region.IF1, Region.IF2, Region.COARSE_INT)
# deeper fine layers rank higher; FINE is deepest
_FINE_DEPTH_RANK = np.array([6, 1, 2, 3, 4, 5, -1, -1, -1], dtype=np.int8)


def region_class(regions: np.ndarray) -> np.ndarray:
    """Collapse regions to FINE / IF1 / IF2 / COARSE_INT values."""
    return np.asarray(CLASS_REGIONS, dtype=np.int8)[_CLASS_OF[regions]]


@dataclass(frozen=True, eq=False)
class LTSLabels:
    cellRegion: np.ndarray
    edgeRegion: np.ndarray
    vertexClass: np.ndarray
    stencilRadius: int
    cellDistance: Optional[np.ndarray] = None
    _cache: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_cache", {})
        for arr in (self.cellRegion, self.edgeRegion, self.vertexClass):
            arr.setflags(write=False)

    @property
    def cell_class(self) -> np.ndarray:
        return region_class(self.cellRegion)

    @property
    def edge_class(self) -> np.ndarray:
        return region_class(self.edgeRegion)

    @property
    def fine_cells(self) -> np.ndarray:
        return np.flatnonzero(self.cellRegion <= Region.FINE_ADJ_5)

    @property
    def fine_edges(self) -> np.ndarray:
        return np.flatnonzero(self.edgeRegion <= Region.FINE_ADJ_5)

    def cells_in(self, *regions: Region) -> np.ndarray:
        return np.flatnonzero(np.isin(self.cellRegion, [int(r) for r in regions]))

    def edges_in(self, *regions: Region) -> np.ndarray:
        return np.flatnonzero(np.isin(self.edgeRegion, [int(r) for r in regions]))

    def counts(self) -> dict:
        """Cell and edge totals per region name, for logs and reports."""
        return {
            "cells": {r.name: int(np.sum(self.cellRegion == r)) for r in Region},
            "edges": {r.name: int(np.sum(self.edgeRegion == r)) for r in Region},
        }


def hop_distance(adjacency: csr_matrix, sources: np.ndarray) -> np.ndarray:
    """Breadth-first hop count from the `sources` mask; -1 where unreachable."""
    n = adjacency.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    frontier = np.asarray(sources, dtype=bool).copy()
    dist[frontier] = 0
    level = 0
    while frontier.any():
        level += 1
        reached = (adjacency @ frontier.astype(np.float64)) > 0
        frontier = reached & (dist < 0)
        dist[frontier] = level
    return dist


def assign_edge_regions(mesh: Mesh, cell_region: np.ndarray) -> np.ndarray:
    """
    An edge takes the region of its endpoint closest to the fine set: the
    deeper fine layer if either endpoint is fine, else the lower of
    IF1 < IF2 < COARSE_INT.
    """
    a = cell_region[mesh.cellsOnEdge[:, 0]]
    b = cell_region[mesh.cellsOnEdge[:, 1]]
    rank_a, rank_b = _FINE_DEPTH_RANK[a], _FINE_DEPTH_RANK[b]
    fine_pick = np.where(rank_a >= rank_b, a, b)
    any_fine = (rank_a >= 0) | (rank_b >= 0)
    return np.where(any_fine, fine_pick, np.minimum(a, b)).astype(np.int8)


def assign_vertex_classes(mesh: Mesh, edge_region: np.ndarray) -> np.ndarray:
    """Dual-cell class: the class of the vertex's edge closest to the fine set."""
    return region_class(edge_region)[mesh.edgesOnVertex].min(axis=1).astype(np.int8)


def label_regions(mesh: Mesh, fine_mask: np.ndarray, r: int = 2) -> LTSLabels:
    """
    Label cells from hop distances to the fine set: IF1 is the r rings
    outside it, IF2 the next r rings, the rest is coarse interior. Fine
    cells are layered by their distance to the non-fine set.
    """
    fine_mask = np.asarray(fine_mask, dtype=bool)
    if fine_mask.shape != (mesh.nCells,):
        raise LabelingError(f"fine mask has shape {fine_mask.shape}, expected ({mesh.nCells},)")
    if not fine_mask.any():
        raise LabelingError("fine mask is empty")
    if fine_mask.all():
        raise LabelingError("fine mask covers every cell; no coarse region")

    adjacency = mesh.cell_adjacency()
    outside = hop_distance(adjacency, fine_mask)
    inside = hop_distance(adjacency, ~fine_mask)
    coarse_reach = outside[~fine_mask].max()
    if coarse_reach < 2 * r:
        raise LabelingError(
            f"coarse region reaches only {coarse_reach} rings from the fine set; "
            f"interfaces need {2 * r}"
        )

    region = np.full(mesh.nCells, int(Region.COARSE_INT), dtype=np.int8)
    region[~fine_mask & (outside <= 2 * r)] = Region.IF2
    region[~fine_mask & (outside <= r)] = Region.IF1
    layer = np.ceil(inside / r).astype(np.int64)
    deep = fine_mask & (layer > FINE_LAYERS)
    region[fine_mask] = np.minimum(layer[fine_mask], FINE_LAYERS).astype(np.int8)
    region[deep] = Region.FINE
    if not deep.any():
        logger.warning(
            "fine region is at most %d rings deep; F^l layers are truncated", int(inside[fine_mask].max())
        )

    edge_region = assign_edge_regions(mesh, region)
    labels = LTSLabels(
        cellRegion=region,
        edgeRegion=edge_region,
        vertexClass=assign_vertex_classes(mesh, edge_region),
        stencilRadius=r,
        cellDistance=np.where(fine_mask, -inside, outside),
    )
    logger.debug("labels: %s", labels.counts()["cells"])
    return labels


def relabel(mesh: Mesh, labels: LTSLabels, cell_region: np.ndarray) -> LTSLabels:
    """Labels with a replaced cell labeling; edges and dual cells follow the edge rule."""
    cell_region = np.asarray(cell_region, dtype=np.int8).copy()
    edge_region = assign_edge_regions(mesh, cell_region)
    return LTSLabels(
        cellRegion=cell_region,
        edgeRegion=edge_region,
        vertexClass=assign_vertex_classes(mesh, edge_region),
        stencilRadius=labels.stencilRadius,
        cellDistance=labels.cellDistance,
    )


@dataclass(frozen=True)
class LabelViolation:
    kind: str
    index: int
    detail: str


@dataclass
class LabelValidationReport:
    violations: List[LabelViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def indices(self, kind: str) -> np.ndarray:
        return np.array(sorted({v.index for v in self.violations if v.kind == kind}), dtype=np.int64)


def _spread(adjacency: csr_matrix, values: np.ndarray, hops: int, reduce) -> np.ndarray:
    """Max (or min) of `values` over each cell's `hops`-ring neighbourhood, itself included."""
    out = values.copy()
    starts = adjacency.indptr[:-1]
    has_neighbours = np.diff(adjacency.indptr) > 0
    for _ in range(hops):
        gathered = out[adjacency.indices]
        neighbour = out.copy()
        neighbour[has_neighbours] = reduce.reduceat(gathered, starts[has_neighbours])
        out = reduce(out, neighbour)
    return out


def validate_labels(mesh: Mesh, labels: LTSLabels) -> LabelValidationReport:
    """
    Report-only. A cell's radius-r stencil, and an edge's stencil (its two
    cells and their neighbours), may only touch its own class or the
    adjacent one. Edge labels must also follow the edge rule.
    """
    report = LabelValidationReport()
    adjacency = mesh.cell_adjacency()
    r = labels.stencilRadius
    cls = _CLASS_OF[labels.cellRegion].astype(np.int64)

    hi = _spread(adjacency, cls, r, np.maximum)
    lo = _spread(adjacency, cls, r, np.minimum)
    for i in np.flatnonzero((hi - cls > 1) | (cls - lo > 1)):
        report.violations.append(
            LabelViolation("cell", int(i), f"class {cls[i]} stencil spans classes {lo[i]}..{hi[i]}")
        )

    expected = assign_edge_regions(mesh, labels.cellRegion)
    for e in np.flatnonzero(expected != labels.edgeRegion):
        report.violations.append(
            LabelViolation(
                "edge", int(e),
                f"labelled {Region(labels.edgeRegion[e]).name}, edge rule gives {Region(expected[e]).name}",
            )
        )

    edge_cls = _CLASS_OF[labels.edgeRegion].astype(np.int64)
    hi_e = _spread(adjacency, cls, r - 1, np.maximum)
    lo_e = _spread(adjacency, cls, r - 1, np.minimum)
    c0, c1 = mesh.cellsOnEdge[:, 0], mesh.cellsOnEdge[:, 1]
    e_hi = np.maximum(hi_e[c0], hi_e[c1])
    e_lo = np.minimum(lo_e[c0], lo_e[c1])
    for e in np.flatnonzero((e_hi - edge_cls > 1) | (edge_cls - e_lo > 1)):
        report.violations.append(
            LabelViolation("edge", int(e), f"class {edge_cls[e]} stencil spans classes {e_lo[e]}..{e_hi[e]}")
        )

    if report.violations:
        logger.warning("label validation found %d violations", len(report.violations))
    return report
