"""
Stage arithmetic shared by the global FB-RK(3,2) step and every FB-LTS
phase. Both paths go through these helpers so that the same stage value is
produced by the same floating-point operations in the same order.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from src.services.errors import PositivityError
from src.services.operators.state import RowSelection


def advance(
    base: np.ndarray,
    dt_stage: float,
    tendency: np.ndarray,
    rows: Optional[RowSelection] = None,
    into: Optional[np.ndarray] = None,
) -> np.ndarray:
    """base + dt_stage * tendency, on all rows or on `rows` only (others taken from `into`, else `base`)."""
    if rows is None:
        return base + dt_stage * tendency
    out = (base if into is None else into).copy()
    idx = rows.indices
    out[idx] = base[idx] + dt_stage * tendency
    return out


def fb_average(beta: float, new: np.ndarray, old: np.ndarray) -> np.ndarray:
    return beta * new + (1.0 - beta) * old


def fb_average_final(beta3: float, new: np.ndarray, half: np.ndarray, old: np.ndarray) -> np.ndarray:
    return beta3 * new + (1.0 - 2.0 * beta3) * half + beta3 * old


def check_positive(h: np.ndarray, *, stage: int, rows: Optional[RowSelection] = None, region: Optional[str] = None) -> None:
    values = h if rows is None else h[rows.indices]
    if values.size and not values.min() > 0:
        local = int(np.argmin(values))
        index = local if rows is None else int(rows.indices[local])
        raise PositivityError(
            f"thickness {values[local]:.6g} is not positive", region=region, stage=stage, index=index
        )
