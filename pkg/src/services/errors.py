"""
Exception hierarchy shared by the solver services.

The CLI maps ``FbltsError`` subclasses raised mid-run to exit code 3; drivers
catch ``PositivityError`` per run and record the run as unstable.
"""

from __future__ import annotations

from typing import Optional


class FbltsError(Exception):
    """Base class for every solver error."""


class MeshSizingError(FbltsError, ValueError):
    pass


class MeshFormatError(FbltsError, ValueError):
    """A mesh file field is missing, out of range or violates an invariant."""

    def __init__(self, field: str, index: Optional[int], message: str) -> None:
        self.field = field
        self.index = index
        where = field if index is None else f"{field}[{index}]"
        super().__init__(f"{where}: {message}")


class UnsupportedTopologyError(FbltsError, ValueError):
    pass


class PositivityError(FbltsError, RuntimeError):
    """
    Thickness (cell, edge or dual) dropped to zero or below.

    The tags say where it happened so a driver can report it.
    """

    def __init__(
        self,
        message: str,
        *,
        region: Optional[str] = None,
        stage: Optional[int] = None,
        step: Optional[int] = None,
        subcycle: Optional[int] = None,
        index: Optional[int] = None,
    ) -> None:
        self.region = region
        self.stage = stage
        self.step = step
        self.subcycle = subcycle
        self.index = index
        super().__init__(message)

    def tagged(self, **tags) -> "PositivityError":
        """Return the same error with extra tags filled in (existing tags win)."""
        for key, value in tags.items():
            if getattr(self, key, None) is None:
                setattr(self, key, value)
        return self

    def __str__(self) -> str:
        tags = [
            f"{name}={getattr(self, name)}"
            for name in ("region", "stage", "step", "subcycle", "index")
            if getattr(self, name) is not None
        ]
        base = super().__str__()
        return f"{base} ({', '.join(tags)})" if tags else base


class LabelingError(FbltsError, ValueError):
    pass


class InternalConsistencyError(FbltsError, RuntimeError):
    pass


class PredictionRangeError(FbltsError, IndexError):
    pass
