"""Differential-flatness expansion of a position/heading trajectory.

The thrust vector ``u = m (p_ddot + g e3)`` fixes ``f_r = |u|`` and the third
body axis ``b3 = u / |u|``. The remaining rotation about ``b3`` is fixed either
by the minimal tilt followed by a yaw (``tilt_yaw``, the same frame as the
case-3 desired attitude) or by projecting a heading vector (``projection``,
the case-2 frame). Frame derivatives are analytic in jerk and snap; body rates
follow from ``R^T R_dot = S(omega)`` and ``R^T R_ddot = S(omega_dot) + S(omega)^2``.
See ``docs/Flatness_Derivation.md``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Protocol

import numpy as np

from su2track.control.attitude import InertialParams
from su2track.control.desired import enforce_continuity
from su2track.control.reference import FullReference
from su2track.errors import DegenerateHeading, DegenerateThrust
from su2track.lie import Su2Element, hat_so3, su2_from_so3

logger = logging.getLogger(__name__)

E3 = np.array([0.0, 0.0, 1.0])
MIN_THRUST_RATIO = 1e-6
MIN_SPEED = 1e-6

Construction = Literal["tilt_yaw", "projection"]
Heading = Literal["yaw", "velocity"]

_ZERO = np.zeros(3)


@dataclass(frozen=True, eq=False)
class FlatSample:
    """Flat output at one instant: position to 4th derivative, heading to 2nd."""

    t: float
    p: np.ndarray
    v: np.ndarray = field(default_factory=lambda: _ZERO.copy())
    a: np.ndarray = field(default_factory=lambda: _ZERO.copy())
    j: np.ndarray = field(default_factory=lambda: _ZERO.copy())
    s: np.ndarray = field(default_factory=lambda: _ZERO.copy())
    psi: float = 0.0
    psi_dot: float = 0.0
    psi_ddot: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p", "v", "a", "j", "s"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))


class FlatTrajectory(Protocol):
    duration: Optional[float]

    def sample(self, t: float) -> FlatSample:
        ...


# ---- derivative chains -------------------------------------------------------------

def _unit_chain(u: np.ndarray, ud: np.ndarray, udd: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """``|u|`` and ``n = u/|u|`` with its first two time derivatives."""

    r = float(np.linalg.norm(u))
    n = u / r
    rd = float(n @ ud)
    nd = (ud - n * rd) / r
    rdd = float(nd @ ud + n @ udd)
    ndd = (udd - rdd * n - 2.0 * rd * nd) / r
    return r, n, nd, ndd


def _vee_skew(M: np.ndarray) -> np.ndarray:
    A = 0.5 * (M - M.T)
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def _rz_chain(psi: float, psi_dot: float, psi_ddot: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    c, s = math.cos(psi), math.sin(psi)
    Rz = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    S3 = hat_so3(E3)
    Rz_d = psi_dot * Rz @ S3
    Rz_dd = psi_ddot * Rz @ S3 + psi_dot * psi_dot * Rz @ S3 @ S3
    return Rz, Rz_d, Rz_dd


def _tilt_chain(b3, b3d, b3dd) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimal rotation ``e3 -> b3``: ``I + K + K^2 / (1 + b3_z)``, ``K = S(e3 x b3)``."""

    d = 1.0 + float(b3[2])
    if d <= MIN_THRUST_RATIO:
        raise DegenerateThrust("thrust axis points straight down; tilt is undefined")
    K = hat_so3(np.cross(E3, b3))
    Kd = hat_so3(np.cross(E3, b3d))
    Kdd = hat_so3(np.cross(E3, b3dd))
    dd, ddd = float(b3d[2]), float(b3dd[2])
    w = 1.0 / d
    wd = -dd / (d * d)
    wdd = -ddd / (d * d) + 2.0 * dd * dd / (d * d * d)

    K2 = K @ K
    K2d = Kd @ K + K @ Kd
    K2dd = Kdd @ K + 2.0 * Kd @ Kd + K @ Kdd
    R = np.eye(3) + K + w * K2
    Rd = Kd + wd * K2 + w * K2d
    Rdd = Kdd + wdd * K2 + 2.0 * wd * K2d + w * K2dd
    return R, Rd, Rdd


def _velocity_heading(v: np.ndarray, a: np.ndarray, j: np.ndarray, min_speed: float) -> tuple[float, float, float]:
    D = float(v[0] * v[0] + v[1] * v[1])
    if D < min_speed * min_speed:
        raise DegenerateHeading(f"horizontal speed {math.sqrt(D):.3e} below {min_speed:g}")
    N = float(v[0] * a[1] - v[1] * a[0])
    Nd = float(v[0] * j[1] - v[1] * j[0])
    Dd = 2.0 * float(v[0] * a[0] + v[1] * a[1])
    psi = math.atan2(v[1], v[0])
    return psi, N / D, (Nd * D - N * Dd) / (D * D)


def _cross_chain(a, ad, add, b, bd, bdd):
    return (
        np.cross(a, b),
        np.cross(ad, b) + np.cross(a, bd),
        np.cross(add, b) + 2.0 * np.cross(ad, bd) + np.cross(a, bdd),
    )


def _projection_frame(b3, b3d, b3dd, c, cd, cdd, min_cross: float):
    y, yd, ydd = _cross_chain(b3, b3d, b3dd, c, cd, cdd)
    if float(np.linalg.norm(y)) < min_cross:
        raise DegenerateHeading("heading vector parallel to the thrust axis")
    _, b2, b2d, b2dd = _unit_chain(y, yd, ydd)
    b1, b1d, b1dd = _cross_chain(b2, b2d, b2dd, b3, b3d, b3dd)
    R = np.column_stack([b1, b2, b3])
    Rd = np.column_stack([b1d, b2d, b3d])
    Rdd = np.column_stack([b1dd, b2dd, b3dd])
    return R, Rd, Rdd


# ---- expansion ---------------------------------------------------------------------

def flat_to_reference(
    flat: FlatSample,
    params: InertialParams,
    *,
    construction: Construction = "tilt_yaw",
    heading: Heading = "yaw",
    prev_X: Optional[Su2Element] = None,
    min_speed: float = MIN_SPEED,
) -> FullReference:
    """Full reference state and inputs reproducing ``flat`` through the plant.

    ``heading="velocity"`` takes the heading from the reference velocity
    instead of ``flat.psi``. ``prev_X`` (when given) selects the covering
    element of ``X_r`` closest to it.
    """

    m = params.m
    u = m * (flat.a + params.g * E3)
    ud = m * flat.j
    udd = m * flat.s
    f_r = float(np.linalg.norm(u))
    if f_r <= MIN_THRUST_RATIO * params.weight:
        raise DegenerateThrust(f"required thrust {f_r:.3e} N is degenerate")
    _, b3, b3d, b3dd = _unit_chain(u, ud, udd)

    if heading == "velocity":
        psi, psi_dot, psi_ddot = _velocity_heading(flat.v, flat.a, flat.j, min_speed)
    elif heading == "yaw":
        psi, psi_dot, psi_ddot = flat.psi, flat.psi_dot, flat.psi_ddot
    else:
        raise ValueError(f"unknown heading source {heading!r}")

    if construction == "tilt_yaw":
        RA, RAd, RAdd = _tilt_chain(b3, b3d, b3dd)
        Rz, Rzd, Rzdd = _rz_chain(psi, psi_dot, psi_ddot)
        R = RA @ Rz
        Rd = RAd @ Rz + RA @ Rzd
        Rdd = RAdd @ Rz + 2.0 * RAd @ Rzd + RA @ Rzdd
    elif construction == "projection":
        if heading == "velocity":
            speed = float(np.linalg.norm(flat.v))
            if speed < min_speed:
                raise DegenerateHeading(f"speed {speed:.3e} below {min_speed:g}")
            _, c, cd, cdd = _unit_chain(flat.v, flat.a, flat.j)
        else:
            cs, sn = math.cos(psi), math.sin(psi)
            c = np.array([cs, sn, 0.0])
            perp = np.array([-sn, cs, 0.0])
            cd = psi_dot * perp
            cdd = psi_ddot * perp - psi_dot * psi_dot * c
        R, Rd, Rdd = _projection_frame(b3, b3d, b3dd, c, cd, cdd, min_speed)
    else:
        raise ValueError(f"unknown frame construction {construction!r}")

    omega = _vee_skew(R.T @ Rd)
    omega_dot = _vee_skew(R.T @ Rdd)
    tau_r = params.J @ omega_dot - np.cross(params.J @ omega, omega)

    X_r = su2_from_so3(R)
    if prev_X is not None:
        X_r = enforce_continuity(X_r, prev_X)

    return FullReference(
        t=flat.t,
        p=flat.p,
        v=flat.v,
        a=flat.a,
        X_r=X_r,
        omega_r=omega,
        omega_r_dot=omega_dot,
        psi=psi,
        psi_dot=psi_dot,
        f_r=f_r,
        j=flat.j,
        s=flat.s,
        tau_r=tau_r,
    )


class ReferenceExpander:
    """Samples a flat trajectory and keeps ``X_r`` continuous between calls."""

    def __init__(
        self,
        trajectory: FlatTrajectory,
        params: InertialParams,
        *,
        construction: Construction = "tilt_yaw",
        heading: Heading = "yaw",
    ):
        self.trajectory = trajectory
        self.params = params
        self.construction = construction
        self.heading = heading
        self._prev: Optional[Su2Element] = None

    def reset(self) -> None:
        self._prev = None

    def at(self, t: float) -> FullReference:
        ref = flat_to_reference(
            self.trajectory.sample(t),
            self.params,
            construction=self.construction,
            heading=self.heading,
            prev_X=self._prev,
        )
        self._prev = ref.X_r
        return ref

    def peek(self, t: float) -> FullReference:
        """Expand without touching the continuity anchor."""

        return flat_to_reference(
            self.trajectory.sample(t),
            self.params,
            construction=self.construction,
            heading=self.heading,
            prev_X=self._prev,
        )


__all__ = [
    "FlatSample",
    "FlatTrajectory",
    "flat_to_reference",
    "ReferenceExpander",
    "MIN_THRUST_RATIO",
]
