"""Fixed-step clock helpers: rates, tick alignment and sampling grids."""

from __future__ import annotations

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

_TICK_EPS = 1e-9


def period_s(rate_hz: float) -> float:
    """Return the period of ``rate_hz`` in seconds."""

    if rate_hz <= 0.0 or not math.isfinite(rate_hz):
        raise ValueError(f"rate must be positive, got {rate_hz!r}")
    return 1.0 / rate_hz


def steps_per_tick(rate_hz: float, h: float) -> int:
    """Number of integrator steps of size ``h`` per period of ``rate_hz``.

    The period must be an integer multiple of ``h`` (within 1e-9 relative).
    """

    ratio = period_s(rate_hz) / h
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > _TICK_EPS * max(1.0, ratio):
        raise ValueError(f"{rate_hz} Hz is not an integer multiple of the step h={h}")
    return steps


def is_tick(step: int, every: int) -> bool:
    """Return ``True`` when integer ``step`` lands on a tick of period ``every`` steps."""

    return step % every == 0


def num_steps(horizon: float, h: float) -> int:
    """Integer number of steps covering ``horizon``; rejects non-multiples."""

    if h <= 0.0:
        raise ValueError("step must be positive")
    ratio = horizon / h
    n = int(round(ratio))
    if abs(ratio - n) > _TICK_EPS * max(1.0, ratio):
        logger.debug("Horizon %s is not a multiple of h=%s; rounding up", horizon, h)
        n = int(math.ceil(ratio))
    return n


def uniform_grid(horizon: float, dt: float) -> np.ndarray:
    """Sample times ``0, dt, ..., horizon`` (inclusive)."""

    n = num_steps(horizon, dt)
    return np.arange(n + 1) * dt


def next_tick(after: float, rate_hz: float) -> float:
    """Return the next tick time of ``rate_hz`` strictly greater than ``after``."""

    period = period_s(rate_hz)
    k = math.floor(after / period + _TICK_EPS) + 1
    return k * period


__all__ = [
    "period_s",
    "steps_per_tick",
    "is_tick",
    "num_steps",
    "uniform_grid",
    "next_tick",
]
