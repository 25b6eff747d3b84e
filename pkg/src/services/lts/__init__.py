from .labels import (
    LabelValidationReport,
    LabelViolation,
    LTSLabels,
    Region,
    assign_edge_regions,
    hop_distance,
    label_regions,
    region_class,
    relabel,
    validate_labels,
)
from .extents import FineSelections, StageExtents, fine_selections, stage_extents
from .interface import InterfaceCache, InterfacePrediction, correct_interface, predict_interface
from .stepper import LTSPlan, coarse_advance, fblts_step, fine_advance, plan_for
from .work_model import WorkEstimate, closed_form_counts, global_counts, rk4_counts

__all__ = [
    "LabelValidationReport",
    "LabelViolation",
    "LTSLabels",
    "Region",
    "assign_edge_regions",
    "hop_distance",
    "label_regions",
    "region_class",
    "relabel",
    "validate_labels",
    "FineSelections",
    "StageExtents",
    "fine_selections",
    "stage_extents",
    "InterfaceCache",
    "InterfacePrediction",
    "correct_interface",
    "predict_interface",
    "LTSPlan",
    "coarse_advance",
    "fblts_step",
    "fine_advance",
    "plan_for",
    "WorkEstimate",
    "closed_form_counts",
    "global_counts",
    "rk4_counts",
]
