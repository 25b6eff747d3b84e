from __future__ import annotations

from typing import Tuple

import numpy as np

from src.services.errors import PositivityError
from src.services.mesh import Mesh
from src.services.operators.state import State


def total_mass(state: State, mesh: Mesh) -> float:
    return float(np.dot(mesh.areaCell, state.h))


def total_absolute_vorticity(eta: np.ndarray, mesh: Mesh) -> float:
    return float(np.dot(mesh.areaDual, eta))


def dual_thickness(h: np.ndarray, mesh: Mesh) -> np.ndarray:
    valid = mesh.cellsOnVertex >= 0
    cells = np.where(valid, mesh.cellsOnVertex, 0)
    h_vertex = np.where(valid, mesh.kiteArea * h[cells], 0.0).sum(axis=1) / mesh.areaDual
    if np.any(h_vertex <= 0):
        bad = int(np.argmin(h_vertex))
        raise PositivityError(f"dual thickness {h_vertex[bad]:.6g} <= 0", region="dual", index=bad)
    return h_vertex


def total_pv_volume(state: State, eta: np.ndarray, mesh: Mesh) -> Tuple[float, float]:
    """
    The PV volume integral both ways: sum A_v h_v q_v with q = eta / h_v,
    and sum A_v eta_v. The two agree up to roundoff.
    """
    h_vertex = dual_thickness(state.h, mesh)
    q = eta / h_vertex
    return float(np.dot(mesh.areaDual, h_vertex * q)), total_absolute_vorticity(eta, mesh)


def rms_error(model: np.ndarray, reference: np.ndarray) -> float:
    model = np.asarray(model, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if model.shape != reference.shape:
        raise ValueError(f"length mismatch: {model.shape} vs {reference.shape}")
    if model.size == 0:
        return 0.0
    return float(np.sqrt(np.mean((reference - model) ** 2)))


def relative_drift(values) -> float:
    """max |v - v0| / |v0| over a series (absolute when v0 is 0)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    scale = abs(values[0]) if values[0] != 0 else 1.0
    return float(np.max(np.abs(values - values[0])) / scale)


def speedup(baseline_seconds: float, candidate_seconds: float) -> float:
    if baseline_seconds <= 0 or candidate_seconds <= 0:
        raise ValueError("timings must be positive")
    return baseline_seconds / candidate_seconds
