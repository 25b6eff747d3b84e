from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.dtos.stepping_dtos import HaloPolicy
from src.services.lts.labels import LTSLabels, Region
from src.services.operators.state import RowSelection

_COARSE_SIDE = (Region.IF1, Region.IF2, Region.COARSE_INT)


def _fine_layers(depth: int):
    return tuple(Region(layer) for layer in range(1, depth + 1))


@dataclass(frozen=True)
class StageExtents:
    """Rows each coarse-phase stage is evaluated on."""

    h1: RowSelection
    u1: RowSelection
    h2: RowSelection
    u2: RowSelection
    h3: RowSelection
    u3: RowSelection


@dataclass(frozen=True)
class FineSelections:
    """Rows touched by the fine subcycles and by the interface correction."""

    fine_cells: RowSelection
    fine_edges: RowSelection
    if1_cells: np.ndarray
    if1_edges: np.ndarray
    if_cells: np.ndarray
    if_edges: np.ndarray
    stage3_cells: RowSelection
    stage3_edges: RowSelection
    # positions of the fine / interface rows inside the stage-3 selections
    stage3_cell_fine: np.ndarray
    stage3_cell_if: np.ndarray
    stage3_edge_fine: np.ndarray
    stage3_edge_if: np.ndarray


def stage_extents(labels: LTSLabels, policy: HaloPolicy = HaloPolicy.SHRINKING) -> StageExtents:
    """
    Shrinking: thickness stages on F^5, F^3, F^1 and velocity stages on
    F^4, F^2 plus the coarse side; velocity stage 3 on IF1 and the interior
    only. `f5` keeps every stage on F^5, `all_fine` on the whole fine region.
    """
    cells, edges = labels.cells_in, labels.edges_in
    if policy is HaloPolicy.SHRINKING:
        depths = (5, 4, 3, 2, 1)
    elif policy is HaloPolicy.F5:
        depths = (5, 5, 5, 5, 5)
    else:
        depths = None

    if depths is None:
        every_cell = RowSelection(np.arange(labels.cellRegion.size))
        every_edge = RowSelection(np.arange(labels.edgeRegion.size))
        h1 = h2 = h3 = every_cell
        u1 = u2 = every_edge
    else:
        h1 = RowSelection(cells(*_fine_layers(depths[0]), *_COARSE_SIDE))
        u1 = RowSelection(edges(*_fine_layers(depths[1]), *_COARSE_SIDE))
        h2 = RowSelection(cells(*_fine_layers(depths[2]), *_COARSE_SIDE))
        u2 = RowSelection(edges(*_fine_layers(depths[3]), *_COARSE_SIDE))
        h3 = RowSelection(cells(*_fine_layers(depths[4]), *_COARSE_SIDE))
    u3 = RowSelection(edges(Region.IF1, Region.COARSE_INT))
    return StageExtents(h1=h1, u1=u1, h2=h2, u2=u2, h3=h3, u3=u3)


def fine_selections(labels: LTSLabels) -> FineSelections:
    fine_cells = labels.fine_cells
    fine_edges = labels.fine_edges
    if1_cells = labels.cells_in(Region.IF1)
    if1_edges = labels.edges_in(Region.IF1)
    if_cells = labels.cells_in(Region.IF1, Region.IF2)
    if_edges = labels.edges_in(Region.IF1, Region.IF2)

    s3_cells = np.union1d(fine_cells, if_cells)
    s3_edges = np.union1d(fine_edges, if_edges)
    return FineSelections(
        fine_cells=RowSelection(fine_cells),
        fine_edges=RowSelection(fine_edges),
        if1_cells=if1_cells,
        if1_edges=if1_edges,
        if_cells=if_cells,
        if_edges=if_edges,
        stage3_cells=RowSelection(s3_cells),
        stage3_edges=RowSelection(s3_edges),
        stage3_cell_fine=np.searchsorted(s3_cells, fine_cells),
        stage3_cell_if=np.searchsorted(s3_cells, if_cells),
        stage3_edge_fine=np.searchsorted(s3_edges, fine_edges),
        stage3_edge_if=np.searchsorted(s3_edges, if_edges),
    )
