"""Plant state, control input and state tangent containers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from su2track.lib.validators import as_vec3, require_finite
from su2track.lie import Su2Element


@dataclass(frozen=True, eq=False)
class RigidBodyState:
    """``(p, v, X, omega)``: world position/velocity, attitude, body rates."""

    p: np.ndarray
    v: np.ndarray
    X: Su2Element
    omega: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", as_vec3("p", self.p))
        object.__setattr__(self, "v", as_vec3("v", self.v))
        object.__setattr__(self, "omega", as_vec3("omega", self.omega))

    @classmethod
    def hover(cls, p=(0.0, 0.0, 0.0)) -> "RigidBodyState":
        return cls(np.asarray(p, dtype=float), np.zeros(3), Su2Element.identity(), np.zeros(3))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.p, self.v, self.X.q, self.omega])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "RigidBodyState":
        y = np.asarray(y, dtype=float)
        return cls(y[0:3], y[3:6], Su2Element(y[6:10]), y[10:13])

    def max_norm(self) -> float:
        return float(max(np.linalg.norm(self.p), np.linalg.norm(self.v), np.linalg.norm(self.omega)))


@dataclass(frozen=True, eq=False)
class ControlInput:
    f: float
    tau: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "f", require_finite("f", self.f))
        object.__setattr__(self, "tau", as_vec3("tau", self.tau))

    @classmethod
    def zero(cls) -> "ControlInput":
        return cls(0.0, np.zeros(3))


@dataclass(frozen=True, eq=False)
class StateTangent:
    p_dot: np.ndarray
    v_dot: np.ndarray
    q_dot: np.ndarray
    omega_dot: np.ndarray

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.p_dot, self.v_dot, self.q_dot, self.omega_dot])


__all__ = ["RigidBodyState", "ControlInput", "StateTangent"]
