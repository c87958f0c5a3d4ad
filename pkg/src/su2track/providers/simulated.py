"""Seeded measurement sources driven by the simulated plant."""

from __future__ import annotations

import numpy as np

from su2track.control.attitude import InertialParams
from su2track.dynamics.state import ControlInput, RigidBodyState
from su2track.providers.measurement import ImuSample, PoseMeasurement

E3 = np.array([0.0, 0.0, 1.0])


class SimulatedImu:
    """Specific force ``(f/m) e3`` and body rate, plus optional white noise.

    Noiseless by default.
    """

    def __init__(self, params: InertialParams, accel_std: float = 0.0, gyro_std: float = 0.0, seed: int | None = None):
        self.params = params
        self.accel_std = float(accel_std)
        self.gyro_std = float(gyro_std)
        self._rng = np.random.default_rng(seed)

    def measure(self, state: RigidBodyState, u: ControlInput, t: float) -> ImuSample:
        accel = (u.f / self.params.m) * E3
        gyro = state.omega.copy()
        if self.accel_std > 0.0:
            accel = accel + self._rng.normal(0.0, self.accel_std, 3)
        if self.gyro_std > 0.0:
            gyro = gyro + self._rng.normal(0.0, self.gyro_std, 3)
        return ImuSample(accel, gyro, t)


class SimulatedPose:
    """Position fixes with noise ``noise_std``; ``reported_std`` is what the filter is told."""

    def __init__(self, noise_std: float = 0.0, reported_std: float = 0.02, seed: int | None = None):
        self.noise_std = float(noise_std)
        self.reported_std = float(reported_std)
        self._rng = np.random.default_rng(seed)

    def measure(self, state: RigidBodyState, t: float) -> PoseMeasurement:
        p = state.p.copy()
        if self.noise_std > 0.0:
            p = p + self._rng.normal(0.0, self.noise_std, 3)
        return PoseMeasurement(p, np.full(3, self.reported_std), t)


__all__ = ["SimulatedImu", "SimulatedPose"]
