from .state import (
    RowSelection,
    State,
    TendencyPair,
    VorticityFields,
    WorkCounters,
    count_rows,
    pick,
)
from .trisk import TriskOperators
from .sources import FullTendencySource, TendencySource

__all__ = [
    "RowSelection",
    "State",
    "TendencyPair",
    "VorticityFields",
    "WorkCounters",
    "count_rows",
    "pick",
    "TriskOperators",
    "FullTendencySource",
    "TendencySource",
]
