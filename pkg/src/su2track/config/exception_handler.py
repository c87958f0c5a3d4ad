"""Exit codes for su2track errors and process-wide exception logging."""

from __future__ import annotations

import logging
import sys
import traceback
from typing import Callable, Optional, TypeVar

from su2track.errors import (
    ConfigError,
    DegenerateHeading,
    DegenerateSegment,
    DegenerateThrust,
    EmptyGyroBuffer,
    InvalidPhi,
    NonPositiveDt,
    ParseError,
    PlotError,
    SimulationDiverged,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_CERTIFICATE = 3

# First match wins.
EXIT_CODES: tuple[tuple[tuple[type[BaseException], ...], int, str], ...] = (
    ((SimulationDiverged,), EXIT_VIOLATION, "Simulation diverged"),
    ((PlotError,), EXIT_USAGE, "Plotting failed"),
    ((ConfigError, InvalidPhi), EXIT_USAGE, "Invalid configuration"),
    ((DegenerateThrust, DegenerateHeading, DegenerateSegment), EXIT_USAGE, "Unusable reference"),
    ((ParseError,), EXIT_USAGE, "Unreadable input"),
    ((NonPositiveDt, EmptyGyroBuffer), EXIT_USAGE, "Estimator input rejected"),
    ((FileNotFoundError,), EXIT_USAGE, "File not found"),
)

T = TypeVar("T")


def exit_code_for(exc: BaseException) -> Optional[tuple[int, str]]:
    """``(exit code, label)`` for a known error, ``None`` for anything else."""

    for types, code, label in EXIT_CODES:
        if isinstance(exc, types):
            return code, label
    return None


def run_guarded(func: Callable[..., int], *args, **kwargs) -> int:
    """Call a command and turn known errors into their exit code; others propagate."""

    try:
        return func(*args, **kwargs)
    except Exception as exc:
        mapped = exit_code_for(exc)
        if mapped is None:
            raise
        code, label = mapped
        logger.error("❌ %s: %s", label, exc)
        return code


def log_uncaught(exc_type, exc, exc_tb) -> None:
    """Known errors get one line; anything else is logged with its traceback."""

    mapped = exit_code_for(exc) if exc is not None else None
    if mapped is not None:
        logger.error("Unhandled %s (exit code %d): %s", mapped[1].lower(), mapped[0], exc)
        return
    formatted = "".join(traceback.format_exception(exc_type, exc, exc_tb))
    logger.error("Unhandled exception: %s", formatted)


def setup_exception_hook() -> None:
    """Route uncaught exceptions through :func:`log_uncaught`; installed once per process.

    ``KeyboardInterrupt`` keeps the default handler.
    """

    if getattr(setup_exception_hook, "_installed", False):  # type: ignore[attr-defined]
        return

    default_hook = sys.excepthook

    def _hook(exc_type, exc, exc_tb):
        if issubclass(exc_type, KeyboardInterrupt):
            default_hook(exc_type, exc, exc_tb)
            return
        log_uncaught(exc_type, exc, exc_tb)

    sys.excepthook = _hook
    setattr(setup_exception_hook, "_installed", True)  # type: ignore[attr-defined]


__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_VIOLATION",
    "EXIT_CERTIFICATE",
    "EXIT_CODES",
    "exit_code_for",
    "run_guarded",
    "log_uncaught",
    "setup_exception_hook",
]
