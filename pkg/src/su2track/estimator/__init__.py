"""Multiplicative EKF, IMU accumulation and replay logs."""

from su2track.estimator.imu_buffer import ImuAccumulator, ImuWindow
from su2track.estimator.mekf import EkfConfig, EkfState, MultiplicativeEkf

__all__ = ["EkfConfig", "EkfState", "ImuAccumulator", "ImuWindow", "MultiplicativeEkf"]
