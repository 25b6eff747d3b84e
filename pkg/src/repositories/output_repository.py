from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
import yaml
from pydantic import BaseModel

from src.services.diagnostics import RunRecord
from src.services.lts.labels import LTSLabels
from src.services.mesh import Mesh
from src.services.operators.state import State

logger = logging.getLogger(__name__)

STATE_COLUMNS = ("kind", "index", "x", "y", "h", "u", "region")
NO_REGION = -1


class OutputRepository:
    """CSV/YAML artifacts of one run or driver, all under a single directory."""

    def __init__(self, out_dir: Union[str, Path]) -> None:
        self.out_dir = Path(out_dir)

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def write_record(self, record: RunRecord, name: str = "record.csv") -> Path:
        path = self._path(name)
        # 17 significant digits keep the conserved totals exact across reruns
        record.to_frame().to_csv(path, index=False, float_format="%.17g")
        logger.info("wrote %d record rows to %s", len(record), path)
        return path

    def write_state(
        self, mesh: Mesh, state: State, labels: Optional[LTSLabels] = None, name: str = "state_final.csv"
    ) -> Path:
        cell_region = labels.cellRegion if labels is not None else np.full(mesh.nCells, NO_REGION)
        edge_region = labels.edgeRegion if labels is not None else np.full(mesh.nEdges, NO_REGION)
        cells = pd.DataFrame({
            "kind": "cell",
            "index": np.arange(mesh.nCells),
            "x": mesh.xCell,
            "y": mesh.yCell,
            "h": state.h,
            "u": np.nan,
            "region": cell_region.astype(int),
        })
        edges = pd.DataFrame({
            "kind": "edge",
            "index": np.arange(mesh.nEdges),
            "x": mesh.xEdge,
            "y": mesh.yEdge,
            "h": np.nan,
            "u": state.u,
            "region": edge_region.astype(int),
        })
        path = self._path(name)
        pd.concat([cells, edges], ignore_index=True)[list(STATE_COLUMNS)].to_csv(
            path, index=False, float_format="%.17g"
        )
        return path

    def write_report(self, frame: pd.DataFrame, name: str = "report.csv") -> Path:
        path = self._path(name)
        frame.to_csv(path, index=False, float_format="%.17g")
        logger.info("wrote report %s", path)
        return path

    def write_config(self, config: BaseModel, name: str = "config_resolved.yaml") -> Path:
        path = self._path(name)
        path.write_text(yaml.safe_dump(config.model_dump(mode="json"), sort_keys=False))
        return path

    def read_record(self, name: str = "record.csv") -> pd.DataFrame:
        return pd.read_csv(self.out_dir / name)
