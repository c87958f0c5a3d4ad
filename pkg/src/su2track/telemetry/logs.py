from __future__ import annotations

import logging
import os
import sys

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LOG_ENV = "SU2TRACK_LOG"


def setup_logging(level: int | str = logging.INFO) -> None:
    """Configure the root logger once: stdout, plus a file when ``SU2TRACK_LOG`` is set."""

    log = logging.getLogger()
    if log.handlers:
        log.setLevel(level)
        return  # already configured

    log.setLevel(level)
    fmt = logging.Formatter(LOG_FORMAT, DATE_FORMAT)

    sh = logging.StreamHandler(sys.stdout)
    sh.setFormatter(fmt)
    log.addHandler(sh)

    log_path = os.getenv(LOG_ENV)
    if log_path:
        fh = logging.FileHandler(log_path)
        fh.setFormatter(fmt)
        log.addHandler(fh)


__all__ = ["LOG_FORMAT", "LOG_ENV", "setup_logging"]
