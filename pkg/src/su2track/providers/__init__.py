"""Measurement records and simulated measurement sources."""

from su2track.providers.measurement import ImuSample, ImuSource, PoseMeasurement, PoseSource
from su2track.providers.simulated import SimulatedImu, SimulatedPose

__all__ = [
    "ImuSample",
    "ImuSource",
    "PoseMeasurement",
    "PoseSource",
    "SimulatedImu",
    "SimulatedPose",
]
