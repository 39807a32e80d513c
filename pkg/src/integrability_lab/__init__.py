"""Stochastic integrability lab: package logging.

Everything under the `integrability_lab` logger goes to <log dir>/app.log
at DEBUG and to the console at ERROR. numpy RuntimeWarnings are captured
into the same file. The directory comes from INTEGRABILITY_LAB_LOG_DIR.
"""

import logging
import os

__version__ = "0.1.0"

LOG_DIR_ENV = "INTEGRABILITY_LAB_LOG_DIR"

_DEFAULT_LOG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "logs")
_FILE_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"
_CONSOLE_FORMAT = "%(levelname)s %(name)s: %(message)s"


def _configure(log_dir: str) -> logging.Logger:
    root = logging.getLogger("integrability_lab")
    if root.handlers:
        return root
    os.makedirs(log_dir, exist_ok=True)
    root.setLevel(logging.DEBUG)

    # UTF-8: messages carry Greek letters
    file_handler = logging.FileHandler(os.path.join(log_dir, "app.log"), encoding="utf-8")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(_FILE_FORMAT))

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.ERROR)
    console_handler.setFormatter(logging.Formatter(_CONSOLE_FORMAT))

    root.addHandler(file_handler)
    root.addHandler(console_handler)
    root.propagate = False

    logging.captureWarnings(True)
    warnings_logger = logging.getLogger("py.warnings")
    warnings_logger.addHandler(file_handler)
    warnings_logger.propagate = False
    return root


_configure(os.environ.get(LOG_DIR_ENV, _DEFAULT_LOG_DIR))
