"""Composite Lyapunov value and domain membership for the full-state loop."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import block_diag

from su2track.control.attitude import InertialParams, attitude_gain_matrices, sym2_eigvals
from su2track.control.certificate import PHI_MAX, CertificateReport, gain_certificate, translation_matrices
from su2track.control.gains import DomainParams, GainSet
from su2track.lie import Su2Element, attitude_error_vector, dist_su2


class LyapunovValue(NamedTuple):
    V: float
    V_p: float
    V_a: float
    c1: float
    c2: float
    c3: float
    decay_rate: float
    z: np.ndarray

    @property
    def lower(self) -> float:
        return self.c1 * float(self.z @ self.z)

    @property
    def upper(self) -> float:
        return self.c2 * float(self.z @ self.z)


@dataclass(frozen=True)
class DomainMembership:
    in_D: bool
    in_attractive: bool
    gamma: float
    omega_sq: float
    energy: float


def bound_constants(gains: GainSet, params: InertialParams, domain: DomainParams) -> tuple[float, float]:
    """``c1 = lmin(diag(M1_pp, M1_aa))`` and ``c2 = lmax(diag(M2_pp, M2_aa))``."""

    M1_pp, M2_pp, _ = translation_matrices(gains, params, domain.alpha)
    aa = attitude_gain_matrices(gains.attitude, params, domain.phi)
    M1 = block_diag(M1_pp, aa.M1_aa)
    M2 = block_diag(M2_pp, aa.M2_aa)
    return float(np.linalg.eigvalsh(M1)[0]), float(np.linalg.eigvalsh(M2)[-1])


def full_lyapunov(
    e_p,
    e_v,
    X_d: Su2Element,
    X: Su2Element,
    e_omega,
    gains: GainSet,
    params: InertialParams,
    domain: DomainParams,
    certificate: CertificateReport | None = None,
) -> LyapunovValue:
    """``V = V_p + V_a`` with its sandwich constants and the envelope decay rate.

    ``c3`` is ``B_z``; ``decay_rate`` is the rate the monitor checks against.
    Pass a precomputed ``certificate`` when evaluating along a trace.
    """

    e_p = np.asarray(e_p, dtype=float)
    e_v = np.asarray(e_v, dtype=float)
    e_w = np.asarray(e_omega, dtype=float)
    e_X = attitude_error_vector(X_d.star() * X)

    V_p = 0.5 * gains.k_p * float(e_p @ e_p) + 0.5 * params.m * float(e_v @ e_v) + gains.c_p * float(e_p @ e_v)
    V_a = gains.k_X * dist_su2(X_d, X) + gains.c_a * float(e_X @ e_w) + 0.5 * float(e_w @ params.J @ e_w)

    cert = certificate if certificate is not None else gain_certificate(gains, params, domain)
    z = np.array([np.linalg.norm(e_p), np.linalg.norm(e_v), np.linalg.norm(e_X), np.linalg.norm(e_w)])
    return LyapunovValue(
        V=V_p + V_a,
        V_p=V_p,
        V_a=V_a,
        c1=cert.c1,
        c2=cert.c2,
        c3=cert.c3,
        decay_rate=cert.decay_rate,
        z=z,
    )


def domain_check_full(
    e_p,
    e_v,
    X_d: Su2Element,
    X: Su2Element,
    e_omega,
    gains: GainSet,
    params: InertialParams,
    domain: DomainParams,
) -> DomainMembership:
    """Membership in the exponential domain ``D`` and in the attractivity set.

    ``D`` needs ``Gamma <= phi < 1/8``, the rate-energy condition and the
    quadratic energy bound ``lmax(M2_aa)|z_a|^2 + lmax(M2_pp)|z_p|^2 <= k_p B_p^2 / 2``.
    The attractivity set uses ``phi_attract`` with only the first two conditions.
    """

    e_p = np.asarray(e_p, dtype=float)
    e_v = np.asarray(e_v, dtype=float)
    e_w = np.asarray(e_omega, dtype=float)
    gamma = dist_su2(X_d, X)
    omega_sq = float(e_w @ e_w)
    rate_scale = 2.0 * gains.k_X / params.lam_max

    _, M2_pp, _ = translation_matrices(gains, params, domain.alpha)
    aa = attitude_gain_matrices(gains.attitude, params, domain.phi)
    e_X = attitude_error_vector(X_d.star() * X)
    z_p_sq = float(e_p @ e_p + e_v @ e_v)
    z_a_sq = float(e_X @ e_X) + omega_sq
    energy = sym2_eigvals(aa.M2_aa)[1] * z_a_sq + sym2_eigvals(M2_pp)[1] * z_p_sq

    in_D = (
        domain.phi < PHI_MAX
        and gamma <= domain.phi
        and omega_sq <= rate_scale * (domain.phi - gamma)
        and energy <= 0.5 * gains.k_p * domain.B_p**2
    )
    in_attractive = gamma <= domain.phi_attract and omega_sq <= rate_scale * (domain.phi_attract - gamma)
    return DomainMembership(bool(in_D), bool(in_attractive), gamma, omega_sq, energy)


__all__ = ["LyapunovValue", "DomainMembership", "bound_constants", "full_lyapunov", "domain_check_full"]
