from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from src.dtos.stepping_dtos import HaloPolicy
from src.services.lts.labels import LTSLabels, Region


@dataclass(frozen=True)
class WorkEstimate:
    fast_cell_evals: int
    fast_edge_evals: int
    slow_cell_evals: int
    slow_edge_evals: int

    def as_dict(self) -> dict:
        return asdict(self)


def _count(regions: np.ndarray, *members: int) -> int:
    return int(np.isin(regions, members).sum())


def _slow_edges(fast_edges: int, n_edges: int, split: bool, slow_terms: bool) -> int:
    if split:
        return n_edges
    return fast_edges if slow_terms else 0


def closed_form_counts(
    labels: LTSLabels,
    M: int,
    policy: HaloPolicy = HaloPolicy.SHRINKING,
    *,
    split: bool = False,
    slow_terms: bool = True,
) -> WorkEstimate:
    """
    Tendency evaluations of one FB-LTS coarse step, from region sizes alone.

    cells: |F5| + |F3| + |F1| + 3(|IF1| + |IF2| + |INT|) + M(3|F| + |IF1| + |IF2|)
    edges: |F4e| + |F2e| + 3|IF1e| + 2|IF2e| + 3|INTe| + M(3|Fe| + |IF1e| + |IF2e|)

    (shrinking halo; `f5` and `all_fine` widen the F^l terms).
    """
    cr, er = labels.cellRegion, labels.edgeRegion
    n_cells, n_edges = cr.size, er.size
    if1, if2, interior = int(Region.IF1), int(Region.IF2), int(Region.COARSE_INT)

    def fine_layers(regions, depth):
        return _count(regions, *range(1, depth + 1))

    fine_c = fine_layers(cr, 5) + _count(cr, int(Region.FINE))
    fine_e = fine_layers(er, 5) + _count(er, int(Region.FINE))
    if1_c, if2_c, int_c = _count(cr, if1), _count(cr, if2), _count(cr, interior)
    if1_e, if2_e, int_e = _count(er, if1), _count(er, if2), _count(er, interior)

    if policy is HaloPolicy.SHRINKING:
        halo_cells = fine_layers(cr, 5) + fine_layers(cr, 3) + fine_layers(cr, 1)
        halo_edges = fine_layers(er, 4) + fine_layers(er, 2)
    elif policy is HaloPolicy.F5:
        halo_cells = 3 * fine_layers(cr, 5)
        halo_edges = 2 * fine_layers(er, 5)
    else:
        halo_cells = 3 * fine_c
        halo_edges = 2 * fine_e

    cells = halo_cells + 3 * (if1_c + if2_c + int_c) + M * (3 * fine_c + if1_c + if2_c)
    edges = halo_edges + 3 * if1_e + 2 * if2_e + 3 * int_e + M * (3 * fine_e + if1_e + if2_e)
    return WorkEstimate(
        fast_cell_evals=cells,
        fast_edge_evals=edges,
        slow_cell_evals=0,
        slow_edge_evals=_slow_edges(edges, n_edges, split, slow_terms),
    )


def global_counts(n_cells: int, n_edges: int, steps: int = 1, *, split: bool = False, slow_terms: bool = True) -> WorkEstimate:
    """FB-RK(3,2) over `steps` global steps (three stages each)."""
    cells, edges = 3 * steps * n_cells, 3 * steps * n_edges
    slow = steps * n_edges if split else (edges if slow_terms else 0)
    return WorkEstimate(cells, edges, 0, slow)


def rk4_counts(n_cells: int, n_edges: int, steps: int = 1, *, split: bool = False, slow_terms: bool = True) -> WorkEstimate:
    cells, edges = 4 * steps * n_cells, 4 * steps * n_edges
    slow = steps * n_edges if split else (edges if slow_terms else 0)
    return WorkEstimate(cells, edges, 0, slow)
