import math

import numpy as np
import pytest

from su2track.control.attitude import InertialParams
from su2track.control.desired import (
    desired_attitude_case1,
    desired_attitude_case2,
    desired_attitude_case3,
    desired_b1_projection,
    desired_rates,
    enforce_continuity,
    thrust_projection,
)
from su2track.control.gains import GainSet
from su2track.control.reference import FullReference
from su2track.control.tracking import AttitudeMode, TrackingController, tracking_control
from su2track.dynamics.state import RigidBodyState
from su2track.errors import DegenerateForce, InsufficientHistory, ProjectionSingular
from su2track.lie import Su2Element, dist_su2, embed_su2_to_so3, exp_su2


def _params():
    return InertialParams(0.1, 10.0, np.diag([0.05, 0.05, 0.1]))


def _gains(**overrides):
    values = {"k_p": 0.6, "k_v": 0.4, "c_p": 0.05, "k_X": 20.0, "k_omega": 1.0, "c_a": 0.1}
    values.update(overrides)
    return GainSet.from_mapping(values)


def _base_reference(**overrides):
    values = {
        "t": 0.0,
        "p": np.zeros(3),
        "v": np.zeros(3),
        "a": np.zeros(3),
        "X_r": Su2Element.identity(),
        "omega_r": np.zeros(3),
        "omega_r_dot": np.zeros(3),
    }
    values.update(overrides)
    return FullReference(**values)


def test_case3_vertical_thrust_is_pure_yaw():
    X = desired_attitude_case3([0.0, 0.0, 2.0], psi_r=0.7)
    assert X.allclose(exp_su2(np.array([0.0, 0.0, 0.35])))


def test_case3_aligns_third_axis_with_force():
    f_d = np.array([0.3, -0.4, 1.0])
    X = desired_attitude_case3(f_d, psi_r=-1.2)
    assert np.allclose(embed_su2_to_so3(X)[:, 2], f_d / np.linalg.norm(f_d), atol=1e-12)


def test_case3_inverted_thrust():
    X = desired_attitude_case3([0.0, 0.0, -1.0], psi_r=0.0)
    assert np.allclose(embed_su2_to_so3(X)[:, 2], [0.0, 0.0, -1.0], atol=1e-12)


def test_case3_rejects_zero_force():
    with pytest.raises(DegenerateForce):
        desired_attitude_case3(np.zeros(3), psi_r=0.0)


def test_case1_and_case2_frames():
    f_d = np.array([0.0, 0.5, 1.0])
    R1 = desired_attitude_case1(f_d, [1.0, 0.0, 0.0])
    R2 = desired_attitude_case2(f_d, [1.0, 0.0, 0.0])
    for R in (R1, R2):
        assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
        assert np.allclose(R[:, 2], f_d / np.linalg.norm(f_d))
    assert np.allclose(R1[:, 0], [1.0, 0.0, 0.0])


def test_b1_projection_singular_when_parallel():
    with pytest.raises(ProjectionSingular):
        desired_b1_projection([0.0, 0.0, 1.0], [0.0, 0.0, 1.0])


def test_continuity_picks_nearby_cover():
    prev = exp_su2(np.array([0.1, 0.0, 0.0]))
    candidate = -exp_su2(np.array([0.12, 0.0, 0.0]))
    chosen = enforce_continuity(candidate, prev)
    assert chosen.allclose(-candidate)


def test_case2_matches_case3_when_heading_is_along_a_tilt_direction():
    f_d = np.array([0.3, -0.4, 1.0])
    psi_par = math.atan2(-0.4, 0.3)
    for psi in (psi_par, psi_par + 0.5 * math.pi, psi_par + math.pi):
        R2 = desired_attitude_case2(f_d, [math.cos(psi), math.sin(psi), 0.0])
        R3 = embed_su2_to_so3(desired_attitude_case3(f_d, psi))
        assert np.allclose(R2, R3, atol=1e-12)
    psi = psi_par + 0.7
    R2 = desired_attitude_case2(f_d, [math.cos(psi), math.sin(psi), 0.0])
    R3 = embed_su2_to_so3(desired_attitude_case3(f_d, psi))
    assert np.allclose(R2[:, 2], R3[:, 2], atol=1e-12)
    assert not np.allclose(R2, R3, atol=1e-6)


def test_continuity_chain_removes_injected_sign_flips():
    axis = np.array([1.0, 2.0, -2.0]) / 3.0
    truth = [exp_su2(0.01 * k * axis) for k in range(250)]
    flipped = {37, 38, 39, 90, 151, 152, 200}
    chain = [truth[0]]
    for k in range(1, len(truth)):
        raw = -truth[k] if k in flipped else truth[k]
        chain.append(enforce_continuity(raw, chain[-1]))
    steps = [dist_su2(a, b) for a, b in zip(chain, chain[1:])]
    assert max(steps) < 0.1
    for X, X_true in zip(chain, truth):
        assert X.allclose(X_true)


def test_thrust_projection_on_tilted_body():
    X = exp_su2(np.array([0.5 * math.pi / 3.0, 0.0, 0.0]))
    assert thrust_projection([0.0, 0.0, 2.0], X) == pytest.approx(2.0 * math.cos(math.pi / 3.0))


def test_desired_rates_of_constant_spin():
    w = np.array([0.3, -0.2, 0.5])
    h = 1e-3
    history = [exp_su2(0.5 * w * k * h) for k in range(4)]
    omega, omega_dot = desired_rates(history, h)
    assert np.allclose(omega, w, atol=1e-5)
    assert np.allclose(omega_dot, 0.0, atol=1e-3)
    with pytest.raises(InsufficientHistory):
        desired_rates(history[:2], h)


def test_hover_reference_needs_weight_only():
    params = _params()
    ref = FullReference.hover([0.0, 0.0, 1.0], params)
    out = tracking_control(RigidBodyState.hover([0.0, 0.0, 1.0]), ref, _gains(), params)
    assert out.f == pytest.approx(params.weight)
    assert np.allclose(out.tau, 0.0)
    assert not out.held
    assert not out.negative_thrust


def test_free_fall_reference_holds_previous_attitude():
    params = _params()
    ref = _base_reference(a=np.array([0.0, 0.0, -10.0]))
    state = RigidBodyState.hover()
    with pytest.raises(DegenerateForce):
        tracking_control(state, ref, _gains(), params)

    controller = TrackingController(_gains(), params, h=1e-3, mode=AttitudeMode.CASE3)
    controller.step(state, _base_reference())
    out = controller.step(state, ref)
    assert out.held
    assert controller.held_count == 1
    assert out.desired.X_d.allclose(Su2Element.identity())


def test_negative_thrust_is_flagged_and_clamped():
    params = _params()
    upside_down = RigidBodyState(np.zeros(3), np.zeros(3), exp_su2(np.array([0.5 * math.pi, 0.0, 0.0])), np.zeros(3))
    out = tracking_control(upside_down, _base_reference(), _gains(), params, clamp_thrust=True)
    assert out.negative_thrust
    assert out.f == 0.0


def test_hold_clears_the_desired_rate_window():
    params = _params()
    state = RigidBodyState.hover()
    spin = _base_reference(omega_r=np.array([0.0, 0.0, 0.2]))
    controller = TrackingController(_gains(), params, h=1e-3, mode=AttitudeMode.CASE3)
    for _ in range(3):
        out = controller.step(state, spin)
    assert len(controller.history) == 3
    assert np.allclose(out.desired.omega_d, 0.0, atol=1e-9)

    out = controller.step(state, _base_reference(a=np.array([0.0, 0.0, -10.0])))
    assert out.held
    assert len(controller.history) == 0

    out = controller.step(state, spin)
    assert not out.held
    assert len(controller.history) == 1
    assert np.allclose(out.desired.omega_d, [0.0, 0.0, 0.2])
