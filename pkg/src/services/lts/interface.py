from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.dtos.stepping_dtos import FBWeights
from src.services.errors import InternalConsistencyError, PredictionRangeError
from src.services.steppers.stages import fb_average, fb_average_final


@dataclass
class InterfaceCache:
    """
    Coarse-phase stage arrays (full length; uncorrected "tilde" values on
    IF1/IF2, final values on the coarse interior), base-time copies and the
    correction accumulators over IF1 and IF2.
    """

    h_n: np.ndarray
    u_n: np.ndarray
    h1: np.ndarray
    u1: np.ndarray
    hs: np.ndarray
    h2: np.ndarray
    u2: np.ndarray
    hss: np.ndarray
    h3: np.ndarray
    u3: np.ndarray
    hsss: np.ndarray
    if1_cells: np.ndarray
    if1_edges: np.ndarray
    if_cells: np.ndarray
    if_edges: np.ndarray
    psi_sum: np.ndarray = field(init=False)
    phi_sum: np.ndarray = field(init=False)
    count: int = field(init=False, default=0)
    base_level_reads: List[int] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        self.reset_accumulators()

    def reset_accumulators(self) -> None:
        self.psi_sum = np.zeros(self.if_cells.size)
        self.phi_sum = np.zeros(self.if_edges.size)
        self.count = 0
        self.base_level_reads = []

    def accumulate(self, psi: np.ndarray, phi: np.ndarray) -> None:
        self.psi_sum = self.psi_sum + psi
        self.phi_sum = self.phi_sum + phi
        self.count += 1


@dataclass(frozen=True)
class InterfacePrediction:
    """
    Predicted IF1 data for one subcycle, ordered like `if1_cells` /
    `if1_edges`. For k = M only the base level is present.
    """

    k: int
    h_base: np.ndarray
    u_base: np.ndarray
    h_s1: Optional[np.ndarray] = None
    u_s1: Optional[np.ndarray] = None
    h_s2: Optional[np.ndarray] = None
    u_s2: Optional[np.ndarray] = None
    h_star: Optional[np.ndarray] = None
    h_star2: Optional[np.ndarray] = None
    h_star3: Optional[np.ndarray] = None
    h_next: Optional[np.ndarray] = None


def _base_level(cache: InterfaceCache, k: int, M: int):
    a = k / M
    cells, edges = cache.if1_cells, cache.if1_edges
    h = a * cache.h3[cells] + (1.0 - a) * cache.h_n[cells]
    u = a * cache.u3[edges] + (1.0 - a) * cache.u_n[edges]
    return h, u


def _stage_level(cache: InterfaceCache, k: int, M: int, h_stage: np.ndarray, u_stage: np.ndarray):
    a, b, c = k / M, 1.0 / M, 1.0 - (k + 1) / M
    cells, edges = cache.if1_cells, cache.if1_edges
    h = a * cache.h3[cells] + b * h_stage[cells] + c * cache.h_n[cells]
    u = a * cache.u3[edges] + b * u_stage[edges] + c * cache.u_n[edges]
    return h, u


def predict_interface(cache: InterfaceCache, k: int, M: int, weights: FBWeights) -> InterfacePrediction:
    """
    Second-order interpolation of the uncorrected coarse data on IF1 to the
    subcycle times t^{n,k}, t^{n,k+1/3} and t^{n,k+1/2}, with the matching
    FB-averaged thicknesses. With M = 1 the predictions are the cached
    stage values themselves.
    """
    if not 0 <= k <= M:
        raise PredictionRangeError(f"subcycle index {k} outside 0..{M}")
    h_base, u_base = _base_level(cache, k, M)
    if k == M:
        cache.base_level_reads.append(k)
        return InterfacePrediction(k=k, h_base=h_base, u_base=u_base)

    h_s1, u_s1 = _stage_level(cache, k, M, cache.h1, cache.u1)
    h_s2, u_s2 = _stage_level(cache, k, M, cache.h2, cache.u2)
    h_next, _ = _base_level(cache, k + 1, M)
    if k + 1 == M:
        cache.base_level_reads.append(M)
    return InterfacePrediction(
        k=k,
        h_base=h_base,
        u_base=u_base,
        h_s1=h_s1,
        u_s1=u_s1,
        h_s2=h_s2,
        u_s2=u_s2,
        h_star=fb_average(weights.beta1, h_s1, h_base),
        h_star2=fb_average(weights.beta2, h_s2, h_base),
        h_star3=fb_average_final(weights.beta3, h_next, h_s2, h_base),
        h_next=h_next,
    )


def correct_interface(cache: InterfaceCache, dt: float, M: int):
    """Corrected IF1/IF2 values at t^{n+1}: base value plus dt/M times the M accumulated summands."""
    if cache.count != M:
        raise InternalConsistencyError(f"interface accumulators hold {cache.count} summands, expected {M}")
    fine_dt = dt / M
    h = cache.h_n[cache.if_cells] + fine_dt * cache.psi_sum
    u = cache.u_n[cache.if_edges] + fine_dt * cache.phi_sum
    return h, u
