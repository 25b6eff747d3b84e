from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from src.services.errors import MeshFormatError
from src.services.mesh import Mesh, compute_perp_weights, validate_mesh

logger = logging.getLogger(__name__)

COUNT_FIELDS = ("nCells", "nEdges", "nVertices")

# field -> (dtype kind, leading dimension, index target or None)
ARRAY_SCHEMA: Dict[str, tuple] = {
    "cellsOnEdge": ("i", "nEdges", "nCells"),
    "nEdgesOnCell": ("i", "nCells", None),
    "edgesOnCell": ("i", "nCells", "nEdges"),
    "verticesOnCell": ("i", "nCells", "nVertices"),
    "verticesOnEdge": ("i", "nEdges", "nVertices"),
    "edgesOnVertex": ("i", "nVertices", "nEdges"),
    "cellsOnVertex": ("i", "nVertices", "nCells"),
    "areaCell": ("f", "nCells", None),
    "areaDual": ("f", "nVertices", None),
    "kiteArea": ("f", "nVertices", None),
    "lEdge": ("f", "nEdges", None),
    "dEdge": ("f", "nEdges", None),
    "nSign": ("i", "nEdges", None),
    "tSign": ("i", "nEdges", None),
    "bottomElevation": ("f", "nCells", None),
    "restingDepth": ("f", "nCells", None),
    "coriolisVertex": ("f", "nVertices", None),
    "xCell": ("f", "nCells", None),
    "yCell": ("f", "nCells", None),
    "xVertex": ("f", "nVertices", None),
    "yVertex": ("f", "nVertices", None),
    "xEdge": ("f", "nEdges", None),
    "yEdge": ("f", "nEdges", None),
}
OPTIONAL_SCHEMA: Dict[str, tuple] = {
    "nEdgesOnEdge": ("i", "nEdges", None),
    "edgesOnEdge": ("i", "nEdges", "nEdges"),
    "perpWeights": ("f", "nEdges", None),
}


def _to_json_value(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        # Python floats serialize with repr, the shortest string that
        # round-trips the double exactly (at most 17 significant digits).
        return value.tolist()
    return value


class MeshRepository:
    """
    Reads and writes meshes as self-describing JSON: integer counts plus
    arrays named exactly like the Mesh fields, all indices 0-based.
    """

    def save(self, mesh: Mesh, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload: Dict[str, Any] = {name: getattr(mesh, name) for name in COUNT_FIELDS}
        payload["xPeriod"] = mesh.xPeriod
        payload["yPeriod"] = mesh.yPeriod
        for name in (*ARRAY_SCHEMA, *OPTIONAL_SCHEMA):
            value = getattr(mesh, name)
            if value is not None:
                payload[name] = _to_json_value(value)
        path.write_text(json.dumps(payload))
        logger.info("saved mesh with %d cells to %s", mesh.nCells, path)
        return path

    def load(self, path: Union[str, Path]) -> Mesh:
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise MeshFormatError("<file>", None, f"not valid JSON: {exc}") from exc

        counts = {}
        for name in COUNT_FIELDS:
            if name not in raw:
                raise MeshFormatError(name, None, "missing field")
            counts[name] = int(raw[name])

        arrays = {}
        for name, spec in ARRAY_SCHEMA.items():
            if name not in raw:
                raise MeshFormatError(name, None, "missing field")
            arrays[name] = self._parse_array(name, raw[name], spec, counts)
        for name, spec in OPTIONAL_SCHEMA.items():
            if name in raw:
                arrays[name] = self._parse_array(name, raw[name], spec, counts)

        mesh = Mesh(
            **counts,
            **arrays,
            xPeriod=float(raw.get("xPeriod", 0.0)),
            yPeriod=float(raw.get("yPeriod", 0.0)),
        )
        if mesh.perpWeights is None:
            n_eoe, eoe, weights = compute_perp_weights(mesh)
            mesh = Mesh(
                **counts,
                **arrays,
                xPeriod=mesh.xPeriod,
                yPeriod=mesh.yPeriod,
                nEdgesOnEdge=n_eoe,
                edgesOnEdge=eoe,
                perpWeights=weights,
            )

        report = validate_mesh(mesh)
        for check in report.failures():
            index = check.worst_index[0] if check.worst_index else None
            raise MeshFormatError(check.field, index, f"{check.name} failed ({check.magnitude:.3e}) {check.detail}".strip())
        return mesh

    @staticmethod
    def _parse_array(name: str, value: Any, spec: tuple, counts: Dict[str, int]) -> np.ndarray:
        kind, leading, target = spec
        try:
            array = np.asarray(value, dtype=np.int64 if kind == "i" else np.float64)
        except (TypeError, ValueError) as exc:
            raise MeshFormatError(name, None, f"cannot parse array: {exc}") from exc
        if array.ndim == 0 or array.shape[0] != counts[leading]:
            raise MeshFormatError(name, None, f"expected leading dimension {counts[leading]} ({leading})")
        if target is not None:
            bad = (array < -1) | (array >= counts[target])
            if bad.any():
                row = int(np.argwhere(bad)[0][0])
                raise MeshFormatError(name, row, f"index out of range for {target}={counts[target]}")
        return array


def save_mesh(mesh: Mesh, path: Union[str, Path]) -> Path:
    return MeshRepository().save(mesh, path)


def load_mesh(path: Union[str, Path]) -> Mesh:
    return MeshRepository().load(path)
