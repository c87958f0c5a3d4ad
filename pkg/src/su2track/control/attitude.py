"""SU(2) attitude tracking controller with its gain certificate and Lyapunov value."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from su2track.errors import InvalidPhi
from su2track.lib.validators import as_vec3, require_nonnegative, require_positive, require_spd
from su2track.lie import (
    Su2Element,
    attitude_error_vector,
    dist_su2,
    hat_su2,
    project_su2_algebra,
    vee_su2,
)

logger = logging.getLogger(__name__)

PD_REL_TOL = 1e-12


# ---- parameters -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InertialParams:
    m: float
    g: float
    J: np.ndarray
    lam_min: float = field(init=False, repr=False)
    lam_max: float = field(init=False, repr=False)
    J_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", require_positive("m", self.m))
        object.__setattr__(self, "g", require_positive("g", self.g))
        J = require_spd("J", self.J)
        J = 0.5 * (J + J.T)
        eig = np.linalg.eigvalsh(J)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "lam_min", float(eig[0]))
        object.__setattr__(self, "lam_max", float(eig[-1]))
        object.__setattr__(self, "J_inv", np.linalg.inv(J))

    @property
    def weight(self) -> float:
        return self.m * self.g


@dataclass(frozen=True)
class AttitudeGains:
    """``k_c`` is the cross-term weight, called ``c_a`` in the full-state analysis."""

    k_X: float
    k_omega: float
    k_c: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "k_X", require_nonnegative("k_X", self.k_X))
        object.__setattr__(self, "k_omega", require_nonnegative("k_omega", self.k_omega))
        object.__setattr__(self, "k_c", require_nonnegative("k_c", self.k_c))

    @property
    def c_a(self) -> float:
        return self.k_c


@dataclass(frozen=True, eq=False)
class AttitudeRef:
    X_r: Su2Element
    omega_r: np.ndarray
    omega_r_dot: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega_r", as_vec3("omega_r", self.omega_r))
        object.__setattr__(self, "omega_r_dot", as_vec3("omega_r_dot", self.omega_r_dot))

    @classmethod
    def hover(cls) -> "AttitudeRef":
        return cls(Su2Element.identity(), np.zeros(3), np.zeros(3))


@dataclass(frozen=True, eq=False)
class AttitudeErrors:
    e_X: np.ndarray
    e_omega: np.ndarray
    Xe: Su2Element

    @property
    def z(self) -> np.ndarray:
        return np.array([np.linalg.norm(self.e_X), np.linalg.norm(self.e_omega)])


class AttitudeGainMatrices(NamedTuple):
    W_aa: np.ndarray
    M1_aa: np.ndarray
    M2_aa: np.ndarray
    certified: bool


# ---- 2x2 helpers -----------------------------------------------------------------

def sym2_eigvals(A: np.ndarray) -> tuple[float, float]:
    """Eigenvalues of a symmetric 2x2 matrix from its trace and determinant."""

    a, b, c = float(A[0, 0]), float(A[1, 1]), 0.5 * float(A[0, 1] + A[1, 0])
    mid = 0.5 * (a + b)
    rad = math.hypot(0.5 * (a - b), c)
    return mid - rad, mid + rad


def is_pd2(A: np.ndarray, rel_tol: float = PD_REL_TOL) -> bool:
    lo, hi = sym2_eigvals(A)
    return lo > 0.0 and lo > rel_tol * hi


def quad(M: np.ndarray, z: np.ndarray) -> float:
    return float(z @ M @ z)


def _check_phi(phi: float, upper: float = 2.0) -> float:
    phi = float(phi)
    if not (0.0 < phi < upper):
        raise InvalidPhi(f"phi must lie in (0, {upper:g}), got {phi!r}")
    return phi


# ---- errors and feedback ---------------------------------------------------------

def attitude_errors(X: Su2Element, omega, ref: AttitudeRef) -> AttitudeErrors:
    Xe = ref.X_r.star() * X
    M = Xe.matrix
    omega_r_body = vee_su2(project_su2_algebra(M.conj().T @ hat_su2(ref.omega_r) @ M))
    e_omega = np.asarray(omega, dtype=float) - omega_r_body
    return AttitudeErrors(attitude_error_vector(Xe), e_omega, Xe)


def attitude_torque(
    X: Su2Element,
    omega,
    ref: AttitudeRef,
    gains: AttitudeGains,
    params: InertialParams,
    errs: AttitudeErrors | None = None,
) -> np.ndarray:
    """Feedback torque with gyroscopic cancellation and the three feedforward terms."""

    if errs is None:
        errs = attitude_errors(X, omega, ref)
    omega = np.asarray(omega, dtype=float)

    M = errs.Xe.matrix
    Ms = M.conj().T
    A = Ms @ hat_su2(ref.omega_r) @ M
    B = Ms @ hat_su2(ref.omega_r_dot) @ M
    E = hat_su2(0.5 * errs.e_omega)
    feedforward = vee_su2(project_su2_algebra(-E @ A + B + A @ E))

    Jw = params.J @ omega
    return (
        -gains.k_X * errs.e_X
        - gains.k_omega * errs.e_omega
        - np.cross(Jw, omega)
        + params.J @ feedforward
    )


# ---- certificate, domain, Lyapunov -----------------------------------------------

def attitude_gain_matrices(gains: AttitudeGains, params: InertialParams, phi: float) -> AttitudeGainMatrices:
    phi = _check_phi(phi)
    k_X, k_w, k_c = gains.k_X, gains.k_omega, gains.k_c
    lmin, lmax = params.lam_min, params.lam_max

    off = -k_c * k_w / (2.0 * lmin)
    W = np.array([[k_c * k_X / lmax, off], [off, k_w - k_c / 4.0]])
    M1 = 0.5 * np.array([[4.0 * k_X, -k_c], [-k_c, lmin]])
    M2 = 0.5 * np.array([[8.0 * k_X / (2.0 - phi), k_c], [k_c, lmax]])
    certified = is_pd2(W) and is_pd2(M1) and is_pd2(M2)
    return AttitudeGainMatrices(W, M1, M2, certified)


def attitude_decay_rate(gains: AttitudeGains, params: InertialParams, phi: float) -> float:
    """Exponential rate ``lambda_min(W_aa) / lambda_max(M2_aa)`` of the attitude Lyapunov value."""

    mats = attitude_gain_matrices(gains, params, phi)
    return sym2_eigvals(mats.W_aa)[0] / sym2_eigvals(mats.M2_aa)[1]


def attitude_domain_check(
    errs: AttitudeErrors,
    X: Su2Element,
    ref: AttitudeRef,
    gains: AttitudeGains,
    params: InertialParams,
    phi: float,
) -> bool:
    mats = attitude_gain_matrices(gains, params, phi)
    if dist_su2(ref.X_r, X) > phi:
        return False
    return quad(mats.M2_aa, errs.z) <= gains.k_X * phi


def attitude_lyapunov(
    errs: AttitudeErrors,
    X: Su2Element,
    ref: AttitudeRef,
    gains: AttitudeGains,
    params: InertialParams,
) -> float:
    e_w = errs.e_omega
    return (
        gains.k_X * dist_su2(ref.X_r, X)
        + gains.k_c * float(e_w @ errs.e_X)
        + 0.5 * float(e_w @ params.J @ e_w)
    )


__all__ = [
    "InertialParams",
    "AttitudeGains",
    "AttitudeRef",
    "AttitudeErrors",
    "AttitudeGainMatrices",
    "sym2_eigvals",
    "is_pd2",
    "quad",
    "attitude_errors",
    "attitude_torque",
    "attitude_gain_matrices",
    "attitude_decay_rate",
    "attitude_domain_check",
    "attitude_lyapunov",
]
