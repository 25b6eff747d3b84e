"""
Additive fast/slow splitting. The slow momentum terms (PV flux, kinetic
energy gradient, drag, wind) are evaluated once at the start of a coarse
step and held fixed through every stage and every fine subcycle; the fast
gravity-wave terms are re-evaluated as usual. The thickness equation is
never split.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.services.errors import InternalConsistencyError
from src.services.operators.state import (
    RowSelection,
    State,
    TendencyPair,
    WorkCounters,
    count_rows,
    pick,
)
from src.services.operators.trisk import TriskOperators

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlowCache:
    du: np.ndarray
    flux: np.ndarray
    t: float

    def __post_init__(self) -> None:
        self.du.setflags(write=False)
        self.flux.setflags(write=False)


def freeze_slow(state: State, operators: TriskOperators, counters: Optional[WorkCounters] = None) -> SlowCache:
    du = operators.slow_momentum(state.u, state.h)
    flux = operators.vorticity_flux(state.u, state.h)
    if counters is not None:
        counters.charge(slow_edges=operators.n_edges)
    return SlowCache(du=du, flux=flux, t=state.t)


def split_tendency(state: State, cache: SlowCache, operators: TriskOperators) -> TendencyPair:
    du = operators.gradient_momentum(state.h) + cache.du
    return TendencyPair(du=du, dh=operators.thickness_tendency(state.u, state.h))


class SplitTendencySource:
    """
    Tendency source for split runs. `freeze(state)` must be called at the
    start of each coarse step; stepping without a cache is an error.
    """

    def __init__(self, operators: TriskOperators, counters: Optional[WorkCounters] = None) -> None:
        self.operators = operators
        self.counters = counters if counters is not None else WorkCounters()
        self.cache: Optional[SlowCache] = None

    @property
    def n_cells(self) -> int:
        return self.operators.n_cells

    @property
    def n_edges(self) -> int:
        return self.operators.n_edges

    def freeze(self, state: State) -> SlowCache:
        self.cache = freeze_slow(state, self.operators, self.counters)
        logger.debug("froze slow tendencies at t=%.3f", state.t)
        return self.cache

    def _require_cache(self) -> SlowCache:
        if self.cache is None:
            raise InternalConsistencyError("split source used before freeze()")
        return self.cache

    def thickness(self, u, h, cells: Optional[RowSelection] = None):
        self.counters.charge(fast_cells=count_rows(cells, self.n_cells))
        return self.operators.thickness_tendency(u, h, cells)

    def momentum(self, u, h, edges: Optional[RowSelection] = None):
        cache = self._require_cache()
        self.counters.charge(fast_edges=count_rows(edges, self.n_edges))
        fast = self.operators.gradient_momentum(h, edges)
        if not self.operators.physics.has_slow_terms:
            return fast
        return fast + pick(cache.du, edges)

    def vorticity_flux(self, u, h):
        return self._require_cache().flux
