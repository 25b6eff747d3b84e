from .integrals import (
    dual_thickness,
    relative_drift,
    rms_error,
    speedup,
    total_absolute_vorticity,
    total_mass,
    total_pv_volume,
)
from .run_record import RUN_RECORD_COLUMNS, WALL_COLUMNS, RunRecord, RunRecordRow
from .vorticity import VorticityFluxRecord, VorticityFluxRecorder, step_prognostic_vorticity

__all__ = [
    "dual_thickness",
    "relative_drift",
    "rms_error",
    "speedup",
    "total_absolute_vorticity",
    "total_mass",
    "total_pv_volume",
    "RUN_RECORD_COLUMNS",
    "WALL_COLUMNS",
    "RunRecord",
    "RunRecordRow",
    "VorticityFluxRecord",
    "VorticityFluxRecorder",
    "step_prognostic_vorticity",
]
