import logging

import coloredlogs

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """Install colored console logging on the root logger (idempotent)."""
    coloredlogs.install(level=level.upper(), fmt=LOG_FORMAT, logger=logging.getLogger())
