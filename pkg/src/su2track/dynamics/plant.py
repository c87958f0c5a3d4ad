"""Quadrotor rigid-body dynamics on SU(2) x R^3.

    p_dot = v
    m v_dot = f R e3 - m g e3
    X_dot = X [omega / 2]^
    J omega_dot = S(J omega) omega + tau
"""

from __future__ import annotations

import numpy as np

from su2track.control.attitude import InertialParams
from su2track.dynamics.state import ControlInput, RigidBodyState, StateTangent
from su2track.lie import embed_su2_to_so3

E3 = np.array([0.0, 0.0, 1.0])


def quat_rate(q: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Quaternion form of ``X [omega/2]^``."""

    q1, q2, q3, q4 = q
    w1, w2, w3 = 0.5 * omega
    return np.array(
        [
            -q2 * w1 - q3 * w2 - q4 * w3,
            q1 * w1 + q3 * w3 - q4 * w2,
            q1 * w2 - q2 * w3 + q4 * w1,
            q1 * w3 + q2 * w2 - q3 * w1,
        ]
    )


def body_z(q: np.ndarray) -> np.ndarray:
    """Third column of R(q)."""

    q1, q2, q3, q4 = q
    return np.array(
        [
            2.0 * (q2 * q4 + q1 * q3),
            2.0 * (q3 * q4 - q1 * q2),
            q1 * q1 - q2 * q2 - q3 * q3 + q4 * q4,
        ]
    )


def rhs(y: np.ndarray, f: float, tau: np.ndarray, params: InertialParams) -> np.ndarray:
    """Right-hand side on the 13 coordinates ``(p, v, q, omega)``."""

    v = y[3:6]
    q = y[6:10]
    omega = y[10:13]
    v_dot = (f / params.m) * body_z(q) - params.g * E3
    Jw = params.J @ omega
    omega_dot = params.J_inv @ (np.cross(Jw, omega) + tau)
    return np.concatenate([v, v_dot, quat_rate(q, omega), omega_dot])


def state_derivative(s: RigidBodyState, u: ControlInput, params: InertialParams) -> StateTangent:
    R = embed_su2_to_so3(s.X)
    v_dot = (u.f / params.m) * R[:, 2] - params.g * E3
    Jw = params.J @ s.omega
    omega_dot = params.J_inv @ (np.cross(Jw, s.omega) + u.tau)
    return StateTangent(
        p_dot=s.v.copy(),
        v_dot=v_dot,
        q_dot=quat_rate(s.X.q, s.omega),
        omega_dot=omega_dot,
    )


def kinetic_energy(s: RigidBodyState, params: InertialParams) -> tuple[float, float]:
    """Translational and rotational kinetic energy."""

    return 0.5 * params.m * float(s.v @ s.v), 0.5 * float(s.omega @ params.J @ s.omega)


__all__ = ["E3", "quat_rate", "body_z", "rhs", "state_derivative", "kinetic_energy"]
