from .logging_setup import configure_logging
from .progress import progress_bar
from .timing import PhaseTimer

__all__ = ["configure_logging", "progress_bar", "PhaseTimer"]
