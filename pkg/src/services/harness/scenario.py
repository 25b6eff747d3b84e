from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.dtos.scenario_dtos import FineRegionSpec, InitialConditionConfig, MeshSpec, ScenarioConfig
from src.repositories.mesh_repository import load_mesh
from src.services.errors import LabelingError
from src.services.lts.labels import LTSLabels, Region, label_regions
from src.services.mesh import Mesh, build_periodic_hex_mesh, with_fields
from src.services.operators.state import State

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scenario:
    """A built scenario: mesh (with depth and bottom set), initial state and optional LTS labels."""

    config: ScenarioConfig
    mesh: Mesh
    state0: State
    fine_mask: Optional[np.ndarray] = None
    labels: Optional[LTSLabels] = None


def build_mesh(spec: MeshSpec) -> Mesh:
    if spec.path is not None:
        return load_mesh(spec.path)
    return build_periodic_hex_mesh(spec.nx, spec.ny, spec.dc, coriolis=spec.coriolis)


def _offsets(mesh: Mesh, x0: float, y0: float):
    dx = Mesh.periodic_delta(mesh.xCell - x0, mesh.xPeriod)
    dy = Mesh.periodic_delta(mesh.yCell - y0, mesh.yPeriod)
    return dx, dy


def _domain_centre(mesh: Mesh):
    if mesh.is_periodic:
        return 0.5 * mesh.xPeriod, 0.5 * mesh.yPeriod
    return float(mesh.xCell.mean()), float(mesh.yCell.mean())


def fine_region_mask(mesh: Mesh, spec: FineRegionSpec) -> np.ndarray:
    if spec.kind == "cells":
        mask = np.zeros(mesh.nCells, dtype=bool)
        mask[np.asarray(spec.cells, dtype=np.int64)] = True
        return mask
    if spec.kind == "disk":
        dx, dy = _offsets(mesh, spec.centerX, spec.centerY)
        return np.hypot(dx, dy) <= spec.radius
    in_x = (mesh.xCell >= spec.xMin) & (mesh.xCell <= spec.xMax)
    if spec.kind == "band":
        return in_x
    return in_x & (mesh.yCell >= spec.yMin) & (mesh.yCell <= spec.yMax)


def initial_state(
    mesh: Mesh, ic: InitialConditionConfig, fine_mask: Optional[np.ndarray] = None, seed: int = 0
) -> tuple[Mesh, State]:
    """
    Gaussian bump on a flat free surface. With `fineDepth` the fine region is
    deeper (bottom lowered to keep the surface flat), giving it a faster
    gravity wave on a uniform mesh.
    """
    depth = np.full(mesh.nCells, ic.backgroundDepth)
    if ic.fineDepth is not None and fine_mask is not None:
        depth[fine_mask] = ic.fineDepth
    mesh = with_fields(mesh, restingDepth=depth, bottomElevation=ic.backgroundDepth - depth)

    cx, cy = _domain_centre(mesh)
    x0 = cx if ic.centerX is None else ic.centerX
    y0 = cy if ic.centerY is None else ic.centerY
    dx, dy = _offsets(mesh, x0, y0)
    h = depth + ic.amplitude * np.exp(-(dx**2 + dy**2) / ic.width**2)

    u = mesh.surface_vector_on_edges(*ic.backgroundVelocity)
    if ic.velocityNoise > 0:
        rng = np.random.default_rng(seed)
        u = u + ic.velocityNoise * rng.standard_normal(mesh.nEdges)
    return mesh, State(h=h, u=np.asarray(u, dtype=float), t=0.0)


def build_scenario(config: ScenarioConfig, seed: Optional[int] = None) -> Scenario:
    mesh = build_mesh(config.mesh)
    mask = fine_region_mask(mesh, config.fineRegion) if config.fineRegion is not None else None
    seed = config.seed if seed is None else seed
    mesh, state0 = initial_state(mesh, config.initialCondition, mask, seed or 0)

    labels = None
    if mask is not None:
        if not mask.any():
            raise LabelingError("fine region selects no cells")
        labels = label_regions(mesh, mask, config.timeStepping.stencilRadius)
        logger.info(
            "fine region: %d of %d cells, %d interface cells",
            int(mask.sum()), mesh.nCells, int(labels.cells_in(Region.IF1, Region.IF2).size),
        )
    return Scenario(config=config, mesh=mesh, state0=state0, fine_mask=mask, labels=labels)
