import logging
import os
import sys
from pathlib import Path
from typing import Optional


LOG_FILE_ENV = "UNIPROV_LOG_FILE"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def init_logging(
    level: int = logging.INFO,
    log_file: Optional[Path] = None,
    quiet: bool = False,
) -> None:
    """Configure logging for the command line tools.

    Parameters
    ----------
    level:
        The minimum severity level to record. Defaults to ``logging.INFO``.
    log_file:
        Optional path to a log file. If omitted, the ``UNIPROV_LOG_FILE``
        environment variable is consulted; without either, records only go
        to standard error so that standard output stays reserved for data.
    quiet:
        Only report errors on standard error.
    """

    if quiet:
        level = logging.ERROR
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    file_path = log_file or os.getenv(LOG_FILE_ENV)
    if file_path:
        handlers.append(logging.FileHandler(file_path, encoding="utf-8"))
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
