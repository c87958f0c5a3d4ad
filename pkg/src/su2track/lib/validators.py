"""Validation helpers for numeric inputs, config mappings and sample streams."""

from __future__ import annotations

import logging
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def require_keys(d: Mapping, keys: Sequence[str]) -> None:
    """Ensure that ``d`` contains ``keys``; raise with missing ones otherwise."""

    missing = [key for key in keys if key not in d]
    if missing:
        logger.debug("Missing keys detected: %s", missing)
        raise KeyError(f"Missing keys: {', '.join(missing)}")


def _is_number(value: object) -> bool:
    return isinstance(value, (int, float, np.floating, np.integer)) and not isinstance(value, bool)


def require_finite(name: str, value: object) -> float:
    if not _is_number(value):
        raise ValueError(f"'{name}' must be a numeric value")
    out = float(value)  # type: ignore[arg-type]
    if not math.isfinite(out):
        raise ValueError(f"'{name}' must be finite")
    return out


def require_positive(name: str, value: object) -> float:
    out = require_finite(name, value)
    if out <= 0.0:
        raise ValueError(f"'{name}' must be positive")
    return out


def require_nonnegative(name: str, value: object) -> float:
    out = require_finite(name, value)
    if out < 0.0:
        raise ValueError(f"'{name}' must be non-negative")
    return out


def as_vec3(name: str, value: object) -> np.ndarray:
    """Coerce ``value`` to a finite float array of shape ``(3,)``."""

    try:
        arr = np.asarray(value, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"'{name}' must be a 3-vector") from exc
    if arr.shape != (3,):
        raise ValueError(f"'{name}' must have 3 components, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"'{name}' must have finite components")
    return arr


def require_spd(name: str, value: object, tol: float = 1e-12) -> np.ndarray:
    """Symmetric (within ``tol``) positive-definite 3x3 matrix."""

    M = np.asarray(value, dtype=float)
    if M.shape != (3, 3):
        raise ValueError(f"'{name}' must be a 3x3 matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"'{name}' must be finite")
    if float(np.max(np.abs(M - M.T))) > tol:
        raise ValueError(f"'{name}' must be symmetric")
    if float(np.linalg.eigvalsh(M)[0]) <= 0.0:
        raise ValueError(f"'{name}' must be positive definite")
    return M


def ensure_monotone(timestamps: Iterable[float], *, strict: bool = False) -> None:
    """Ensure ``timestamps`` never decrease (strictly increase when ``strict``)."""

    last: float | None = None
    for t in timestamps:
        if not math.isfinite(t):
            raise ValueError("timestamps must be finite")
        if last is not None and (t < last or (strict and t == last)):
            raise ValueError(f"timestamps must be {'strictly ' if strict else ''}increasing ({t} after {last})")
        last = t


__all__ = [
    "require_keys",
    "require_finite",
    "require_positive",
    "require_nonnegative",
    "as_vec3",
    "require_spd",
    "ensure_monotone",
]
