from __future__ import annotations

from typing import Tuple

import numpy as np

from src.services.mesh import Mesh
from src.services.operators.state import State


def courant_field(state: State, mesh: Mesh, dt: float, g: float = 9.80665) -> np.ndarray:
    h_edge = 0.5 * (state.h[mesh.cellsOnEdge[:, 0]] + state.h[mesh.cellsOnEdge[:, 1]])
    speed = np.abs(state.u) + np.sqrt(g * h_edge)
    return speed * dt / mesh.dEdge


def courant_number(state: State, mesh: Mesh, dt: float, g: float = 9.80665) -> Tuple[float, int]:
    """Max over edges of (|u| + sqrt(g h_e)) dt / d_e, and the edge where it occurs."""
    nu = courant_field(state, mesh, dt, g)
    edge = int(np.argmax(nu))
    return float(nu[edge]), edge
