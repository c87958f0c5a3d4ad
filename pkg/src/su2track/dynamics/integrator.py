"""Fixed-step classical RK4 with quaternion re-normalization."""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

from su2track.control.attitude import InertialParams
from su2track.dynamics.plant import rhs
from su2track.dynamics.state import ControlInput, RigidBodyState

InputLike = Union[ControlInput, Callable[[float], ControlInput]]


def _input_at(u: InputLike, t: float) -> tuple[float, np.ndarray]:
    if isinstance(u, ControlInput):
        return u.f, u.tau
    held = u(t)
    return held.f, held.tau


def rk4_vector(y: np.ndarray, u: InputLike, params: InertialParams, h: float, t: float = 0.0) -> np.ndarray:
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h!r}")
    f0, tau0 = _input_at(u, t)
    if isinstance(u, ControlInput):
        f1 = f2 = f0
        tau1 = tau2 = tau0
    else:
        f1, tau1 = _input_at(u, t + 0.5 * h)
        f2, tau2 = _input_at(u, t + h)
    k1 = rhs(y, f0, tau0, params)
    k2 = rhs(y + 0.5 * h * k1, f1, tau1, params)
    k3 = rhs(y + 0.5 * h * k2, f1, tau1, params)
    k4 = rhs(y + h * k3, f2, tau2, params)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(
    s: RigidBodyState,
    u: InputLike,
    params: InertialParams,
    h: float,
    t: float = 0.0,
    *,
    renormalize: bool = True,
) -> RigidBodyState:
    """Advance ``s`` by ``h``.

    ``u`` is either a held ``ControlInput`` (zero-order hold over the step) or a
    callable ``t -> ControlInput`` evaluated at the stage times.
    """

    y = rk4_vector(s.to_vector(), u, params, h, t)
    if renormalize:
        y[6:10] /= np.linalg.norm(y[6:10])
    return RigidBodyState.from_vector(y)


def integrate(
    s0: RigidBodyState,
    u: InputLike,
    params: InertialParams,
    h: float,
    n_steps: int,
    t0: float = 0.0,
) -> RigidBodyState:
    s = s0
    for k in range(n_steps):
        s = rk4_step(s, u, params, h, t0 + k * h)
    return s


__all__ = ["InputLike", "rk4_vector", "rk4_step", "integrate"]
