"""Full-state tracking controller.

Pipeline per sample: desired force -> desired attitude (selected case) ->
sign continuity -> desired rates -> attitude feedback about ``X_d`` ->
thrust projection onto the current body axis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from su2track.control.attitude import (
    AttitudeErrors,
    AttitudeRef,
    InertialParams,
    attitude_errors,
    attitude_torque,
)
from su2track.control.desired import (
    DesiredRateEstimator,
    as_su2,
    desired_attitude_case1,
    desired_attitude_case2,
    desired_attitude_case3,
    desired_force,
    enforce_continuity,
    thrust_projection,
)
from su2track.control.gains import GainSet
from su2track.control.reference import FullReference
from su2track.dynamics.state import ControlInput, RigidBodyState
from su2track.errors import DegenerateForce, InsufficientHistory, ProjectionSingular
from su2track.lie import Su2Element

logger = logging.getLogger(__name__)

MIN_FORCE_RATIO = 1e-6


class AttitudeMode(str, Enum):
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"


@dataclass(frozen=True, eq=False)
class DesiredAttitude:
    X_d: Su2Element
    omega_d: np.ndarray
    omega_d_dot: np.ndarray

    def as_ref(self) -> AttitudeRef:
        return AttitudeRef(self.X_d, self.omega_d, self.omega_d_dot)


@dataclass(frozen=True, eq=False)
class ControlOutput:
    f: float
    tau: np.ndarray
    desired: DesiredAttitude
    f_d: np.ndarray
    e_p: np.ndarray
    e_v: np.ndarray
    attitude: AttitudeErrors
    held: bool = False
    negative_thrust: bool = False

    def as_input(self) -> ControlInput:
        return ControlInput(self.f, self.tau)


def _candidate(
    f_d: np.ndarray,
    ref: FullReference,
    mode: AttitudeMode,
    min_force: float,
    b_d1: Optional[np.ndarray],
) -> Su2Element:
    if mode is AttitudeMode.CASE3:
        return desired_attitude_case3(f_d, ref.psi, min_force)
    if mode is AttitudeMode.CASE2:
        return as_su2(desired_attitude_case2(f_d, ref.R_r[:, 0], min_force))
    b1 = ref.R_r[:, 0] if b_d1 is None else b_d1
    return as_su2(desired_attitude_case1(f_d, b1, min_force))


def tracking_control(
    state: RigidBodyState,
    ref: FullReference,
    gains: GainSet,
    params: InertialParams,
    mode: AttitudeMode = AttitudeMode.CASE3,
    prev: Optional[DesiredAttitude] = None,
    history: Optional[DesiredRateEstimator] = None,
    *,
    b_d1: Optional[np.ndarray] = None,
    zero_omega_d_dot: bool = False,
    clamp_thrust: bool = False,
) -> ControlOutput:
    """One evaluation of the tracking law.

    ``history`` (when given) receives the continuity-enforced ``X_d`` and
    supplies ``omega_d``/``omega_d_dot``; until it holds three samples the
    reference rates are used. On a degenerate force or heading the previous
    desired attitude is held, the output is flagged and ``history`` is
    cleared, so no rate difference spans the hold.
    """

    e_p = state.p - ref.p
    e_v = state.v - ref.v
    f_d = desired_force(e_p, e_v, ref.a, gains.translation, params)

    held = False
    try:
        X_d = _candidate(f_d, ref, mode, MIN_FORCE_RATIO * params.weight, b_d1)
        X_d = enforce_continuity(X_d, prev.X_d if prev is not None else state.X)
    except (DegenerateForce, ProjectionSingular) as exc:
        if prev is None:
            raise
        logger.warning("Holding previous desired attitude at t=%.4f: %s", ref.t, exc)
        held = True
        X_d = prev.X_d
        if history is not None:
            history.reset()

    if held and prev is not None:
        desired = prev
    else:
        omega_d, omega_d_dot = ref.omega_r, ref.omega_r_dot
        if history is not None:
            history.push(X_d)
            try:
                omega_d, omega_d_dot = history.rates()
            except InsufficientHistory:
                pass
        if zero_omega_d_dot:
            omega_d_dot = np.zeros(3)
        desired = DesiredAttitude(X_d, omega_d, omega_d_dot)

    att_ref = desired.as_ref()
    errs = attitude_errors(state.X, state.omega, att_ref)
    tau = attitude_torque(state.X, state.omega, att_ref, gains.attitude, params, errs)

    f = thrust_projection(f_d, state.X)
    negative = f < 0.0
    if negative and clamp_thrust:
        f = 0.0
    return ControlOutput(
        f=f,
        tau=tau,
        desired=desired,
        f_d=f_d,
        e_p=e_p,
        e_v=e_v,
        attitude=errs,
        held=held,
        negative_thrust=negative,
    )


class TrackingController:
    """Per-trajectory controller state: previous ``X_d`` and the rate history.

    One instance per simulated vehicle; not shared across trajectories.
    """

    def __init__(
        self,
        gains: GainSet,
        params: InertialParams,
        h: float,
        mode: AttitudeMode | str = AttitudeMode.CASE3,
        *,
        zero_omega_d_dot: bool = False,
        clamp_thrust: bool = False,
        b1_provider: Optional[Callable[[float], np.ndarray]] = None,
    ):
        self.gains = gains
        self.params = params
        self.h = float(h)
        self.mode = AttitudeMode(mode)
        self.zero_omega_d_dot = zero_omega_d_dot
        self.clamp_thrust = clamp_thrust
        self.b1_provider = b1_provider
        self.prev: Optional[DesiredAttitude] = None
        self.history = DesiredRateEstimator(self.h)
        self.held_count = 0
        self._negative = False

    def reset(self) -> None:
        self.prev = None
        self.history.reset()
        self.held_count = 0
        self._negative = False

    def step(self, state: RigidBodyState, ref: FullReference) -> ControlOutput:
        b_d1 = self.b1_provider(ref.t) if self.b1_provider is not None else None
        out = tracking_control(
            state,
            ref,
            self.gains,
            self.params,
            self.mode,
            self.prev,
            self.history,
            b_d1=b_d1,
            zero_omega_d_dot=self.zero_omega_d_dot,
            clamp_thrust=self.clamp_thrust,
        )
        if out.held:
            self.held_count += 1
        if out.negative_thrust and not self._negative:
            logger.warning(
                "Negative thrust %.4g N at t=%.4f%s",
                thrust_projection(out.f_d, state.X),
                ref.t,
                " (clamped to 0)" if self.clamp_thrust else "",
            )
        self._negative = out.negative_thrust
        self.prev = out.desired
        return out


__all__ = [
    "AttitudeMode",
    "DesiredAttitude",
    "ControlOutput",
    "tracking_control",
    "TrackingController",
]
