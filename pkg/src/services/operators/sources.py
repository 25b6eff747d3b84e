from __future__ import annotations

from typing import Optional, Protocol, runtime_checkable

import numpy as np

from src.services.operators.state import RowSelection, WorkCounters, count_rows
from src.services.operators.trisk import TriskOperators


@runtime_checkable
class TendencySource(Protocol):
    """
    What a time integrator needs from the spatial discretization.

    `thickness` is Psi and `momentum` is Phi, both optionally restricted to a
    row selection. `vorticity_flux` is the edge flux whose dual divergence
    drives the absolute vorticity; integrators record it for the companion
    vorticity field. Each source charges its own work counters.
    """

    counters: WorkCounters

    @property
    def n_cells(self) -> int: ...

    @property
    def n_edges(self) -> int: ...

    def thickness(self, u: np.ndarray, h: np.ndarray, cells: Optional[RowSelection] = None) -> np.ndarray: ...

    def momentum(self, u: np.ndarray, h: np.ndarray, edges: Optional[RowSelection] = None) -> np.ndarray: ...

    def vorticity_flux(self, u: np.ndarray, h: np.ndarray) -> np.ndarray: ...


class FullTendencySource:
    """Unsplit right-hand side: fast and slow momentum terms evaluated together."""

    def __init__(self, operators: TriskOperators, counters: Optional[WorkCounters] = None) -> None:
        self.operators = operators
        self.counters = counters if counters is not None else WorkCounters()

    @property
    def n_cells(self) -> int:
        return self.operators.n_cells

    @property
    def n_edges(self) -> int:
        return self.operators.n_edges

    def thickness(self, u, h, cells=None):
        self.counters.charge(fast_cells=count_rows(cells, self.n_cells))
        return self.operators.thickness_tendency(u, h, cells)

    def momentum(self, u, h, edges=None):
        n = count_rows(edges, self.n_edges)
        fast = self.operators.gradient_momentum(h, edges)
        if not self.operators.physics.has_slow_terms:
            self.counters.charge(fast_edges=n)
            return fast
        self.counters.charge(fast_edges=n, slow_edges=n)
        return fast + self.operators.slow_momentum(u, h, edges)

    def vorticity_flux(self, u, h):
        return self.operators.vorticity_flux(u, h)
