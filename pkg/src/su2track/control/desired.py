"""Desired force and desired attitude constructions.

Three ways to complete the frame whose third axis is the desired thrust
direction ``b_d3 = f_d / |f_d|``:

* case 1: an externally supplied ``b_d1`` re-projected onto ``b_d3``'s normal plane;
* case 2: projection of a heading vector ``b_r1`` (SO(3) literature convention);
* case 3: minimal tilt ``X_A`` taking ``e3`` to ``b_d3`` followed by a yaw
  ``X_B`` of ``psi_r`` about the body axis, ``X_d = X_A X_B``.

Body rates of the desired attitude are obtained by differentiating the
sampled ``X_d`` through ``X_dot = X [omega/2]^``.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from typing import Sequence

import numpy as np

from su2track.control.attitude import InertialParams
from su2track.control.gains import TranslationGains
from su2track.errors import DegenerateForce, InsufficientHistory, ProjectionSingular
from su2track.lie import (
    Su2Element,
    dist_su2,
    embed_su2_to_so3,
    exp_su2,
    hat_su2,
    project_su2_algebra,
    su2_from_so3,
    vee_su2,
)

logger = logging.getLogger(__name__)

E3 = np.array([0.0, 0.0, 1.0])
PROJECTION_TOL = 1e-6
_YAW_AXIS_TOL = 1e-12


def desired_force(e_p, e_v, a_r, gains: TranslationGains, params: InertialParams) -> np.ndarray:
    """``f_d = -k_p e_p - k_v e_v + m g e3 + m a_r``."""

    return (
        -gains.k_p * np.asarray(e_p, dtype=float)
        - gains.k_v * np.asarray(e_v, dtype=float)
        + params.m * params.g * E3
        + params.m * np.asarray(a_r, dtype=float)
    )


def _thrust_axis(f_d: np.ndarray, min_force: float) -> np.ndarray:
    norm = float(np.linalg.norm(f_d))
    if norm <= min_force:
        raise DegenerateForce(f"|f_d| = {norm:.3e} below threshold {min_force:.3e}")
    return f_d / norm


def desired_b1_projection(b_d3, b_r1, tol: float = PROJECTION_TOL) -> np.ndarray:
    b_d3 = np.asarray(b_d3, dtype=float)
    y = np.cross(b_d3, np.asarray(b_r1, dtype=float))
    ny = float(np.linalg.norm(y))
    if ny < tol:
        raise ProjectionSingular(f"|b_d3 x b_r1| = {ny:.3e} below {tol:g}")
    return -np.cross(b_d3, y) / ny


def _assemble(b1: np.ndarray, b3: np.ndarray) -> np.ndarray:
    return np.column_stack([b1, np.cross(b3, b1), b3])


def desired_attitude_case1(f_d, b_d1, min_force: float = 0.0) -> np.ndarray:
    b3 = _thrust_axis(np.asarray(f_d, dtype=float), min_force)
    b1 = np.asarray(b_d1, dtype=float)
    b1 = b1 - float(b1 @ b3) * b3
    n = float(np.linalg.norm(b1))
    if n < PROJECTION_TOL:
        raise ProjectionSingular("supplied b_d1 is parallel to the thrust axis")
    return _assemble(b1 / n, b3)


def desired_attitude_case2(f_d, b_r1, min_force: float = 0.0) -> np.ndarray:
    b3 = _thrust_axis(np.asarray(f_d, dtype=float), min_force)
    return _assemble(desired_b1_projection(b3, b_r1), b3)


def desired_attitude_case3(f_d, psi_r: float, min_force: float = 0.0) -> Su2Element:
    f_d = np.asarray(f_d, dtype=float)
    norm = float(np.linalg.norm(f_d))
    if norm <= min_force or norm == 0.0:
        raise DegenerateForce(f"|f_d| = {norm:.3e} below threshold {min_force:.3e}")
    f1, f2, f3 = f_d
    r = math.hypot(f1, f2)
    if r <= _YAW_AXIS_TOL * norm:
        # thrust along +-e3: no tilt axis
        X_A = Su2Element.identity() if f3 > 0.0 else exp_su2(np.array([0.5 * math.pi, 0.0, 0.0]))
    else:
        beta = math.atan2(r, f3)
        n = np.array([-f2, f1, 0.0]) / r
        X_A = exp_su2(0.5 * beta * n)
    X_B = exp_su2(np.array([0.0, 0.0, 0.5 * psi_r]))
    return X_A * X_B


def enforce_continuity(candidate: Su2Element, prev: Su2Element) -> Su2Element:
    """Pick the covering element of ``candidate`` within ``Gamma < 1`` of ``prev``."""

    if dist_su2(candidate, prev) < 1.0:
        return candidate
    return -candidate


def thrust_projection(f_d, X: Su2Element) -> float:
    """``f = f_d . R e3``."""

    return float(np.asarray(f_d, dtype=float) @ embed_su2_to_so3(X)[:, 2])


def as_su2(R) -> Su2Element:
    return su2_from_so3(R)


# ---- rates by differentiation ----------------------------------------------------

def _body_rates(M: np.ndarray, Md: np.ndarray, Mdd: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    Ms = M.conj().T
    omega = 2.0 * vee_su2(project_su2_algebra(Ms @ Md))
    omega_dot = 2.0 * vee_su2(project_su2_algebra(Ms @ (Mdd - Md @ hat_su2(0.5 * omega))))
    return omega, omega_dot


def desired_rates(history: Sequence[Su2Element], h: float, *, centered: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Body rate and acceleration of uniformly sampled ``X_d`` (oldest first).

    Backward differences at the newest sample by default (second order in the
    rate; the acceleration is second order once four samples are available).
    ``centered`` evaluates at the middle of the last three samples instead.
    """

    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h!r}")
    if len(history) < 3:
        raise InsufficientHistory(f"need at least 3 samples, got {len(history)}")

    M0 = history[-1].matrix
    M1 = history[-2].matrix
    M2 = history[-3].matrix
    if centered:
        Md = (M0 - M2) / (2.0 * h)
        Mdd = (M0 - 2.0 * M1 + M2) / (h * h)
        return _body_rates(M1, Md, Mdd)

    Md = (3.0 * M0 - 4.0 * M1 + M2) / (2.0 * h)
    if len(history) >= 4:
        M3 = history[-4].matrix
        Mdd = (2.0 * M0 - 5.0 * M1 + 4.0 * M2 - M3) / (h * h)
    else:
        Mdd = (M0 - 2.0 * M1 + M2) / (h * h)
    return _body_rates(M0, Md, Mdd)


class DesiredRateEstimator:
    """Rolling window of continuity-enforced ``X_d`` samples."""

    def __init__(self, h: float, window: int = 4):
        if window < 3:
            raise ValueError("window must hold at least 3 samples")
        self.h = float(h)
        self._samples: deque[Su2Element] = deque(maxlen=window)

    def push(self, X_d: Su2Element) -> None:
        self._samples.append(X_d)

    def reset(self) -> None:
        self._samples.clear()

    def __len__(self) -> int:
        return len(self._samples)

    @property
    def last(self) -> Su2Element | None:
        return self._samples[-1] if self._samples else None

    def rates(self) -> tuple[np.ndarray, np.ndarray]:
        return desired_rates(list(self._samples), self.h)


__all__ = [
    "PROJECTION_TOL",
    "desired_force",
    "desired_b1_projection",
    "desired_attitude_case1",
    "desired_attitude_case2",
    "desired_attitude_case3",
    "enforce_continuity",
    "thrust_projection",
    "as_su2",
    "desired_rates",
    "DesiredRateEstimator",
]
