from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np


@dataclass(frozen=True)
class State:
    """Prognostic fields at one time level: h per cell (m), u per edge (m/s), t (s)."""

    h: np.ndarray
    u: np.ndarray
    t: float = 0.0

    def with_fields(self, h: np.ndarray, u: np.ndarray, t: Optional[float] = None) -> "State":
        return State(h=h, u=u, t=self.t if t is None else t)

    def copy(self) -> "State":
        return State(h=self.h.copy(), u=self.u.copy(), t=self.t)


@dataclass(frozen=True)
class TendencyPair:
    du: np.ndarray
    dh: np.ndarray


@dataclass(frozen=True)
class VorticityFields:
    zeta: np.ndarray
    eta: np.ndarray
    hVertex: np.ndarray
    q: np.ndarray
    qEdge: np.ndarray


@dataclass
class WorkCounters:
    """Tendency evaluations, one per cell (thickness) or edge (momentum) touched."""

    fast_cell_evals: int = 0
    fast_edge_evals: int = 0
    slow_cell_evals: int = 0
    slow_edge_evals: int = 0

    def charge(self, *, fast_cells: int = 0, fast_edges: int = 0, slow_cells: int = 0, slow_edges: int = 0) -> None:
        self.fast_cell_evals += int(fast_cells)
        self.fast_edge_evals += int(fast_edges)
        self.slow_cell_evals += int(slow_cells)
        self.slow_edge_evals += int(slow_edges)

    def snapshot(self) -> "WorkCounters":
        return WorkCounters(**asdict(self))

    def since(self, earlier: "WorkCounters") -> "WorkCounters":
        return WorkCounters(
            self.fast_cell_evals - earlier.fast_cell_evals,
            self.fast_edge_evals - earlier.fast_edge_evals,
            self.slow_cell_evals - earlier.slow_cell_evals,
            self.slow_edge_evals - earlier.slow_edge_evals,
        )

    def reset(self) -> None:
        self.fast_cell_evals = self.fast_edge_evals = 0
        self.slow_cell_evals = self.slow_edge_evals = 0

    def as_dict(self) -> Dict[str, int]:
        return asdict(self)


class RowSelection:
    """
    A fixed subset of cell or edge rows. Row-sliced operator matrices are
    cached per selection; CSR slicing keeps each row's summation order, so a
    restricted evaluation is bitwise equal to the same rows of a global one.
    """

    __slots__ = ("indices", "_slices")

    def __init__(self, indices) -> None:
        self.indices = np.asarray(indices, dtype=np.int64)
        self.indices.setflags(write=False)
        self._slices: Dict[str, object] = {}

    def __len__(self) -> int:
        return int(self.indices.size)

    def rows(self, name: str, matrix):
        if name not in self._slices:
            self._slices[name] = matrix[self.indices]
        return self._slices[name]

    def union(self, other: "RowSelection") -> "RowSelection":
        return RowSelection(np.union1d(self.indices, other.indices))

    @classmethod
    def empty(cls) -> "RowSelection":
        return cls(np.empty(0, dtype=np.int64))


def count_rows(selection: Optional[RowSelection], total: int) -> int:
    return total if selection is None else len(selection)


def pick(values: np.ndarray, selection: Optional[RowSelection]) -> np.ndarray:
    return values if selection is None else values[selection.indices]

