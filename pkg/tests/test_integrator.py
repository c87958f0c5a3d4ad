import math

import numpy as np
import pytest

from su2track.control.attitude import InertialParams
from su2track.dynamics.integrator import integrate, rk4_step
from su2track.dynamics.plant import kinetic_energy, rhs, state_derivative
from su2track.dynamics.state import ControlInput, RigidBodyState
from su2track.lie import Su2Element, exp_su2


def _params():
    return InertialParams(0.1, 10.0, np.diag([0.05, 0.07, 0.1]))


def _spin_error(h, horizon=1.0, rate=5.0):
    params = _params()
    s = RigidBodyState(np.zeros(3), np.zeros(3), Su2Element.identity(), [0.0, 0.0, rate])
    steps = int(round(horizon / h))
    for k in range(steps):
        s = rk4_step(s, ControlInput(params.weight, np.zeros(3)), params, h, k * h, renormalize=False)
    exact = exp_su2(np.array([0.0, 0.0, 0.5 * rate * horizon]))
    return float(np.linalg.norm(s.X.q - exact.q))


def test_rk4_is_fourth_order_on_spin():
    coarse, fine = _spin_error(0.1), _spin_error(0.05)
    assert 12.0 < coarse / fine < 20.0


def test_free_fall_is_exact():
    params = _params()
    s = integrate(RigidBodyState.hover(), ControlInput.zero(), params, h=0.01, n_steps=100)
    assert s.p[2] == pytest.approx(-0.5 * 10.0 * 1.0**2)
    assert s.v[2] == pytest.approx(-10.0)


def test_hover_thrust_balances_gravity():
    params = _params()
    s = integrate(RigidBodyState.hover([1.0, 2.0, 3.0]), ControlInput(params.weight, np.zeros(3)), params, 1e-3, 200)
    assert np.allclose(s.p, [1.0, 2.0, 3.0])
    assert np.allclose(s.v, 0.0)


def test_torque_free_tumble_conserves_energy():
    params = _params()
    s0 = RigidBodyState(np.zeros(3), np.zeros(3), Su2Element.identity(), [1.0, 2.0, -0.5])
    s = integrate(s0, ControlInput(params.weight, np.zeros(3)), params, 1e-3, 2000)
    assert kinetic_energy(s, params)[1] == pytest.approx(kinetic_energy(s0, params)[1], rel=1e-8)
    L0 = params.J @ s0.omega
    L = s.X.rotation() @ (params.J @ s.omega)
    assert np.allclose(L, L0, atol=1e-8)
    assert s.X.norm_error() < 1e-12


def test_state_derivative_matches_rhs():
    params = _params()
    s = RigidBodyState([0.1, 0.2, 0.3], [1.0, 0.0, -1.0], exp_su2(np.array([0.2, 0.1, -0.3])), [0.4, -0.2, 0.9])
    u = ControlInput(1.3, [0.01, -0.02, 0.03])
    assert np.allclose(state_derivative(s, u, params).to_vector(), rhs(s.to_vector(), u.f, u.tau, params))


def test_callable_input_is_sampled_at_stage_times():
    params = _params()
    seen = []

    def thrust(t):
        seen.append(t)
        return ControlInput(params.weight, np.zeros(3))

    rk4_step(RigidBodyState.hover(), thrust, params, 0.1, t=1.0)
    assert sorted(set(seen)) == pytest.approx([1.0, 1.05, 1.1])


def test_step_must_be_positive():
    with pytest.raises(ValueError):
        rk4_step(RigidBodyState.hover(), ControlInput.zero(), _params(), 0.0)


def test_spin_angle_wraps_through_double_cover():
    params = _params()
    s = RigidBodyState(np.zeros(3), np.zeros(3), Su2Element.identity(), [0.0, 0.0, 2.0 * math.pi])
    s = integrate(s, ControlInput(params.weight, np.zeros(3)), params, 1e-3, 1000)
    # one full turn lands on -I
    assert s.X.allclose(-Su2Element.identity(), atol=1e-9)
