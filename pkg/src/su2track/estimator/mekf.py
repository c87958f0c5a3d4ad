"""Multiplicative EKF on the error state ``z = (p, v, delta)``.

``p`` is the world position, ``v`` the body-frame velocity and ``delta`` a
small attitude error on top of the anchor rotation ``R_anchor``:

    R_hat = R_anchor (I + S(delta)), projected onto SO(3).

The projection of ``I + S(delta)`` is the rotation by ``atan|delta|`` about
``delta``, which is the chart used when propagating ``delta``. Position
fixes are fused one axis at a time; attitude fixes only in experimental mode.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from su2track.control.desired import enforce_continuity
from su2track.dynamics.state import RigidBodyState
from su2track.errors import EmptyGyroBuffer, NonPositiveDt
from su2track.estimator.imu_buffer import ImuAccumulator
from su2track.lie import Su2Element, embed_su2_to_so3, exp_so3, hat_so3, log_so3, project_to_so3, su2_from_so3
from su2track.providers.measurement import ImuSample, PoseMeasurement

logger = logging.getLogger(__name__)

E3 = np.array([0.0, 0.0, 1.0])
SYM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EkfState:
    p: np.ndarray
    v: np.ndarray
    delta: np.ndarray
    R_anchor: np.ndarray
    P: np.ndarray
    t: float = 0.0

    @property
    def R(self) -> np.ndarray:
        return self.R_anchor @ delta_rotation(self.delta)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.p, self.v, self.delta])


# ---- chart ------------------------------------------------------------------------

def delta_rotation(delta) -> np.ndarray:
    """Polar factor of ``I + S(delta)``."""

    delta = np.asarray(delta, dtype=float)
    d = float(np.linalg.norm(delta))
    if d == 0.0:
        return np.eye(3)
    return exp_so3((math.atan(d) / d) * delta)


def rotation_delta(R_rel) -> np.ndarray:
    """Inverse of :func:`delta_rotation` for rotations below a quarter turn."""

    w = log_so3(R_rel)
    theta = float(np.linalg.norm(w))
    if theta == 0.0:
        return np.zeros(3)
    if theta >= 0.5 * math.pi:
        raise ValueError(f"relative rotation of {theta:.3f} rad is outside the attitude chart")
    return (math.tan(theta) / theta) * w


def covariance_ok(P: np.ndarray, tol: float = SYM_TOL) -> bool:
    if float(np.max(np.abs(P - P.T))) > tol:
        return False
    return float(np.linalg.eigvalsh(0.5 * (P + P.T))[0]) > 0.0


def _symmetrize(P: np.ndarray) -> np.ndarray:
    return 0.5 * (P + P.T)


# ---- filter steps -------------------------------------------------------------------

def ekf_init(state: RigidBodyState, p0_std: Sequence[float] = (0.1, 0.1, 0.05), t: float = 0.0) -> EkfState:
    R = embed_su2_to_so3(state.X)
    sp, sv, sd = (float(x) for x in p0_std)
    P = np.diag([sp * sp] * 3 + [sv * sv] * 3 + [sd * sd] * 3)
    return EkfState(state.p.copy(), R.T @ state.v, np.zeros(3), R, P, float(t))


def process_noise(dt: float, accel_std: float, gyro_std: float) -> np.ndarray:
    qp = (0.5 * accel_std * dt * dt) ** 2
    qv = (accel_std * dt) ** 2
    qd = (gyro_std * dt) ** 2
    return np.diag([qp] * 3 + [qv] * 3 + [qd] * 3)


def ekf_predict(
    state: EkfState,
    imu: ImuSample,
    dt: float,
    process_noise: np.ndarray,
    *,
    g: float = 10.0,
    gyro_start=None,
) -> EkfState:
    """Propagate the mean over one IMU interval and the covariance with ``F = I + A dt``.

    ``imu.accel`` is the specific force held over the interval and ``imu.gyro``
    the rate at its end. With ``gyro_start`` the rate is averaged across the
    interval; the specific force is rotated at the interval midpoint.
    """

    if not dt > 0.0:
        raise NonPositiveDt(f"prediction step must be positive, got {dt!r}")

    rel = delta_rotation(state.delta)
    R = state.R_anchor @ rel
    omega = imu.gyro if gyro_start is None else 0.5 * (np.asarray(gyro_start, dtype=float) + imu.gyro)
    v_w = R @ state.v
    R_mid = R @ exp_so3(0.5 * dt * omega)
    a_w = R_mid @ imu.accel - g * E3

    p = state.p + v_w * dt + 0.5 * a_w * dt * dt
    v_w_next = v_w + a_w * dt
    rel_next = rel @ exp_so3(omega * dt)
    delta = rotation_delta(rel_next)
    v = (state.R_anchor @ rel_next).T @ v_w_next

    F = np.eye(9)
    F[0:3, 3:6] = R * dt
    F[0:3, 6:9] = -R @ hat_so3(state.v) * dt
    F[3:6, 3:6] = np.eye(3) - hat_so3(omega) * dt
    F[3:6, 6:9] = -hat_so3(R.T @ (g * E3)) * dt
    F[6:9, 6:9] = np.eye(3) - hat_so3(omega * dt)
    P = _symmetrize(F @ state.P @ F.T + process_noise)

    return EkfState(p, v, delta, state.R_anchor, P, state.t + dt)


def propagate_samples(
    state: EkfState,
    samples: Sequence[ImuSample],
    t: float,
    *,
    g: float = 10.0,
    noise: Optional[tuple[float, float]] = None,
    previous: Optional[ImuSample] = None,
) -> EkfState:
    """Step the filter through each sample at its own timestamp, then hold the last one up to ``t``.

    ``previous`` is the sample that closed the last window; its rate starts
    the first interval. Without it the first sample is held across the interval.
    ``noise`` is ``(accel_std, gyro_std)``; ``None`` leaves the covariance
    without process noise.
    """

    def _q(dt: float) -> np.ndarray:
        return np.zeros((9, 9)) if noise is None else process_noise(dt, noise[0], noise[1])

    if not t > state.t:
        raise NonPositiveDt(f"prediction step must be positive, got {t - state.t!r}")

    prev = previous
    for sample in samples:
        end = min(sample.timestamp, t)
        dt = end - state.t
        if dt > 0.0:
            start = None if prev is None else prev.gyro
            state = ekf_predict(state, sample, dt, _q(dt), g=g, gyro_start=start)
        prev = sample
    if prev is None:
        raise EmptyGyroBuffer("no IMU sample to propagate with")
    dt = t - state.t
    if dt > 0.0:
        state = ekf_predict(state, replace(prev, timestamp=t), dt, _q(dt), g=g)
    return state


def _scalar_update(x: np.ndarray, P: np.ndarray, index: int, z: float, var: float, label: str) -> tuple[np.ndarray, np.ndarray]:
    H = np.zeros(9)
    H[index] = 1.0
    S = float(H @ P @ H) + var
    K = P @ H / S
    innovation = z - float(x[index])
    x = x + K * innovation
    IKH = np.eye(9) - np.outer(K, H)
    P = _symmetrize(IKH @ P @ IKH.T + var * np.outer(K, K))
    logger.debug("%s update: innovation=%.6g gain=%.6g", label, innovation, K[index])
    return x, P


def _with_vector(state: EkfState, x: np.ndarray, P: np.ndarray) -> EkfState:
    return replace(state, p=x[0:3].copy(), v=x[3:6].copy(), delta=x[6:9].copy(), P=P)


def ekf_update_scalar(state: EkfState, meas: PoseMeasurement) -> EkfState:
    """Three sequential scalar position updates (Joseph form)."""

    x = state.vector()
    P = state.P
    for axis in range(3):
        x, P = _scalar_update(x, P, axis, float(meas.position[axis]), float(meas.noise_std[axis]) ** 2, f"pos[{axis}]")
    return _with_vector(state, x, P)


def ekf_update_attitude(state: EkfState, R_meas, noise_std: float) -> EkfState:
    """Experimental: fuse a full attitude fix through the ``delta`` chart."""

    y = rotation_delta(state.R_anchor.T @ np.asarray(R_meas, dtype=float))
    x = state.vector()
    P = state.P
    for axis in range(3):
        x, P = _scalar_update(x, P, 6 + axis, float(y[axis]), noise_std * noise_std, f"att[{axis}]")
    return _with_vector(state, x, P)


def attitude_reset(state: EkfState, threshold: float) -> EkfState:
    """Fold ``delta`` into the anchor once ``|delta| > threshold``; the estimate is unchanged."""

    d = float(np.linalg.norm(state.delta))
    if d <= threshold:
        return state
    R_anchor = project_to_so3(state.R_anchor @ (np.eye(3) + hat_so3(state.delta)))
    G = np.eye(9)
    G[6:9, 6:9] = np.eye(3) - 0.5 * hat_so3(state.delta)
    P = _symmetrize(G @ state.P @ G.T)
    logger.debug("Attitude reset at t=%.4f, |delta|=%.4g", state.t, d)
    return replace(state, delta=np.zeros(3), R_anchor=R_anchor, P=P)


def externalize(state: EkfState, recent_gyro: Sequence, prev_X: Optional[Su2Element] = None) -> RigidBodyState:
    """Plant-state view of the estimate: world velocity, mean gyro rate, continuous ``X``."""

    if len(recent_gyro) == 0:
        raise EmptyGyroBuffer("no gyro sample since the last externalization")
    R = project_to_so3(state.R_anchor @ (np.eye(3) + hat_so3(state.delta)))
    X = su2_from_so3(R)
    if prev_X is not None:
        X = enforce_continuity(X, prev_X)
    omega = np.mean(np.asarray(recent_gyro, dtype=float).reshape(-1, 3), axis=0)
    return RigidBodyState(state.p.copy(), R @ state.v, X, omega)


# ---- stateful filter ------------------------------------------------------------------

@dataclass(frozen=True)
class EkfConfig:
    g: float = 10.0
    accel_std: float = 0.5
    gyro_std: float = 0.05
    pose_std: float = 0.02
    reset_threshold: float = 0.1
    p0_std: tuple[float, float, float] = (0.1, 0.1, 0.05)
    attitude_updates: bool = False
    attitude_std: float = 0.01

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "EkfConfig":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in data.items() if k in known}
        if "p0_std" in kwargs:
            kwargs["p0_std"] = tuple(float(x) for x in kwargs["p0_std"])
        return cls(**kwargs)


@dataclass
class MultiplicativeEkf:
    """One filter per vehicle stream. Calls must be serialized by the caller."""

    state: EkfState
    config: EkfConfig = field(default_factory=EkfConfig)
    imu: ImuAccumulator = field(default_factory=ImuAccumulator)
    rejected: int = 0
    _gyro: list = field(default_factory=list, init=False, repr=False)
    _last_X: Optional[Su2Element] = field(default=None, init=False, repr=False)
    _last_imu: Optional[ImuSample] = field(default=None, init=False, repr=False)

    @classmethod
    def from_state(cls, initial: RigidBodyState, config: EkfConfig | None = None, t0: float = 0.0) -> "MultiplicativeEkf":
        config = config or EkfConfig()
        ekf = cls(ekf_init(initial, config.p0_std, t0), config)
        ekf._last_X = initial.X
        return ekf

    @property
    def t(self) -> float:
        return self.state.t

    def push_imu(self, sample: ImuSample) -> None:
        if self.imu.add(sample):
            self._gyro.append(sample.gyro)
        else:
            self.rejected += 1
            logger.warning("Out-of-order IMU sample at t=%.4f rejected", sample.timestamp)

    def predict(self, t: float) -> None:
        """Propagate through every pending IMU sample up to ``t``."""

        if len(self.imu) == 0:
            raise EmptyGyroBuffer("no IMU samples since the last prediction")
        if not t > self.state.t:
            raise NonPositiveDt(f"prediction step must be positive, got {t - self.state.t!r}")
        window = self.imu.flush()
        self.state = propagate_samples(
            self.state,
            window.samples,
            t,
            g=self.config.g,
            noise=(self.config.accel_std, self.config.gyro_std),
            previous=self._last_imu,
        )
        self._last_imu = window.samples[-1]
        self.state = attitude_reset(self.state, self.config.reset_threshold)
        self._check("predict")

    def update_pose(self, meas: PoseMeasurement) -> bool:
        if meas.timestamp < self.state.t:
            self.rejected += 1
            logger.warning(
                "Out-of-order pose at t=%.4f rejected (filter clock %.4f)", meas.timestamp, self.state.t
            )
            return False
        self.state = ekf_update_scalar(self.state, meas)
        self.state = attitude_reset(self.state, self.config.reset_threshold)
        self._check("update")
        return True

    def update_attitude(self, R_meas, timestamp: float) -> bool:
        if not self.config.attitude_updates:
            logger.debug("Attitude fix at t=%.4f ignored (experimental mode off)", timestamp)
            return False
        if timestamp < self.state.t:
            self.rejected += 1
            logger.warning("Out-of-order attitude fix at t=%.4f rejected", timestamp)
            return False
        self.state = ekf_update_attitude(self.state, R_meas, self.config.attitude_std)
        self.state = attitude_reset(self.state, self.config.reset_threshold)
        self._check("attitude update")
        return True

    def externalize(self, t: Optional[float] = None) -> RigidBodyState:
        """Plant-state view of the filter.

        When ``t`` is past the filter clock, a copy of the estimate is carried
        forward to ``t`` through the pending IMU samples; the filter itself is untouched.
        """

        state = self.state
        pending = self.imu.peek()
        samples = pending.samples if pending is not None else []
        if t is not None and t > state.t and (samples or self._last_imu is not None):
            state = propagate_samples(state, samples, t, g=self.config.g, previous=self._last_imu)
        out = externalize(state, self._gyro, self._last_X)
        self._gyro = []
        self._last_X = out.X
        return out

    def _check(self, stage: str) -> None:
        if not covariance_ok(self.state.P):
            logger.warning("Covariance lost symmetry or definiteness after %s at t=%.4f", stage, self.state.t)


__all__ = [
    "EkfState",
    "EkfConfig",
    "MultiplicativeEkf",
    "delta_rotation",
    "rotation_delta",
    "covariance_ok",
    "ekf_init",
    "process_noise",
    "ekf_predict",
    "propagate_samples",
    "ekf_update_scalar",
    "ekf_update_attitude",
    "attitude_reset",
    "externalize",
]
