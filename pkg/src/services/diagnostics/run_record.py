from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import List

import pandas as pd


@dataclass(frozen=True)
class RunRecordRow:
    step: int
    time: float
    total_mass: float
    total_abs_vorticity: float
    pv_volume: float
    max_courant: float
    fast_cell_evals: int
    fast_edge_evals: int
    slow_cell_evals: int
    slow_edge_evals: int
    wall_coarse: float = 0.0
    wall_predict: float = 0.0
    wall_fine: float = 0.0
    wall_correct: float = 0.0
    wall_global: float = 0.0
    vorticity_gap: float = 0.0


RUN_RECORD_COLUMNS = tuple(f.name for f in fields(RunRecordRow))
WALL_COLUMNS = tuple(c for c in RUN_RECORD_COLUMNS if c.startswith("wall_"))


@dataclass
class RunRecord:
    """One row per completed coarse step (row 0 is the initial state)."""

    rows: List[RunRecordRow] = field(default_factory=list)

    def append(self, row: RunRecordRow) -> None:
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> List:
        return [getattr(r, name) for r in self.rows]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.rows], columns=list(RUN_RECORD_COLUMNS))

    def totals(self) -> dict:
        """Summed eval counters and wall seconds over the run."""
        keys = ("fast_cell_evals", "fast_edge_evals", "slow_cell_evals", "slow_edge_evals", *WALL_COLUMNS)
        return {k: sum(self.column(k)) for k in keys}
