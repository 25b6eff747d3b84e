from .context import StepContext
from .courant import courant_field, courant_number
from .fbrk32 import FBStageData, fbrk32_stages, fbrk32_step
from .rk4 import rk4_step
from .stages import advance, check_positive, fb_average, fb_average_final

__all__ = [
    "StepContext",
    "courant_field",
    "courant_number",
    "FBStageData",
    "fbrk32_stages",
    "fbrk32_step",
    "rk4_step",
    "advance",
    "check_positive",
    "fb_average",
    "fb_average_final",
]
