"""Measurement records and the source protocols that produce them.

Accelerations are specific force in the body frame (m/s^2), rates in rad/s,
positions in the world frame (m). Timestamps are seconds on the simulation clock.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from su2track.dynamics.state import ControlInput, RigidBodyState
from su2track.lib.validators import as_vec3, require_finite


@dataclass(frozen=True, eq=False)
class ImuSample:
    accel: np.ndarray
    gyro: np.ndarray
    timestamp: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "accel", as_vec3("accel", self.accel))
        object.__setattr__(self, "gyro", as_vec3("gyro", self.gyro))
        object.__setattr__(self, "timestamp", require_finite("timestamp", self.timestamp))


@dataclass(frozen=True, eq=False)
class PoseMeasurement:
    position: np.ndarray
    noise_std: np.ndarray
    timestamp: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", as_vec3("position", self.position))
        std = as_vec3("noise_std", self.noise_std)
        if np.any(std <= 0.0):
            raise ValueError("'noise_std' must be positive")
        object.__setattr__(self, "noise_std", std)
        object.__setattr__(self, "timestamp", require_finite("timestamp", self.timestamp))


class ImuSource(Protocol):
    def measure(self, state: RigidBodyState, u: ControlInput, t: float) -> ImuSample:
        ...


class PoseSource(Protocol):
    def measure(self, state: RigidBodyState, t: float) -> PoseMeasurement:
        ...


__all__ = ["ImuSample", "PoseMeasurement", "ImuSource", "PoseSource"]
