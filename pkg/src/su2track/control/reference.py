"""Full reference state consumed by the tracking controller."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from su2track.control.attitude import AttitudeRef, InertialParams
from su2track.lib.validators import as_vec3
from su2track.lie import Su2Element, embed_su2_to_so3

_ZERO = np.zeros(3)


@dataclass(frozen=True, eq=False)
class FullReference:
    """Translational reference with derivatives, the matching attitude reference and heading.

    ``f_r`` and ``tau_r`` are the reference inputs reproducing the trajectory
    through the plant equations; the controller does not consume ``tau_r``.
    """

    t: float
    p: np.ndarray
    v: np.ndarray
    a: np.ndarray
    X_r: Su2Element
    omega_r: np.ndarray
    omega_r_dot: np.ndarray
    psi: float = 0.0
    psi_dot: float = 0.0
    f_r: float = 0.0
    j: np.ndarray = field(default_factory=lambda: _ZERO.copy())
    s: np.ndarray = field(default_factory=lambda: _ZERO.copy())
    tau_r: np.ndarray = field(default_factory=lambda: _ZERO.copy())

    def __post_init__(self) -> None:
        for name in ("p", "v", "a", "omega_r", "omega_r_dot", "j", "s", "tau_r"):
            object.__setattr__(self, name, as_vec3(name, getattr(self, name)))
        object.__setattr__(self, "t", float(self.t))

    @property
    def R_r(self) -> np.ndarray:
        return embed_su2_to_so3(self.X_r)

    def attitude_ref(self) -> AttitudeRef:
        return AttitudeRef(self.X_r, self.omega_r, self.omega_r_dot)

    @classmethod
    def hover(cls, p, params: InertialParams, t: float = 0.0, psi: float = 0.0) -> "FullReference":
        half = 0.5 * psi
        X_r = Su2Element(np.array([np.cos(half), 0.0, 0.0, np.sin(half)]))
        return cls(
            t=t,
            p=np.asarray(p, dtype=float),
            v=_ZERO,
            a=_ZERO,
            X_r=X_r,
            omega_r=_ZERO,
            omega_r_dot=_ZERO,
            psi=psi,
            f_r=params.weight,
        )


__all__ = ["FullReference"]
