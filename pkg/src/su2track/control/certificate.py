"""Gain certificate for the full-state tracking controller.

The translational matrices ``M1_pp, M2_pp, W_pp``, the attitude matrices
``M1_aa, M2_aa, W_aa`` and the coupling ``W_pa`` must satisfy positive
definiteness and ``B_z = 4 lmin(W_aa) lmin(W_pp) - |W_pa|^2 > 0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from su2track.control.attitude import (
    InertialParams,
    attitude_gain_matrices,
    is_pd2,
    sym2_eigvals,
)
from su2track.control.gains import DomainParams, GainSet

logger = logging.getLogger(__name__)

PHI_MAX = 0.125
E3 = np.array([0.0, 0.0, 1.0])
BF_MARGIN = 0.1


@dataclass(frozen=True)
class SufficientBounds:
    """Sufficient (not necessary) upper bounds on the cross weights ``c_a`` and ``c_p``."""

    c_a_terms: tuple[float, float, float]
    c_p_terms: tuple[float, float, float]

    @property
    def c_a(self) -> float:
        return min(self.c_a_terms)

    @property
    def c_p(self) -> float:
        return min(self.c_p_terms)


@dataclass(frozen=True, eq=False)
class CertificateReport:
    gains: GainSet
    domain: DomainParams
    M1_pp: np.ndarray
    M2_pp: np.ndarray
    W_pp: np.ndarray
    M1_aa: np.ndarray
    M2_aa: np.ndarray
    W_aa: np.ndarray
    W_pa: np.ndarray
    B_z: float
    pd: dict[str, bool]
    eigenvalues: dict[str, tuple[float, float]]
    bounds: SufficientBounds
    schur_pass: bool
    reasons: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.reasons

    @property
    def c1(self) -> float:
        return min(self.eigenvalues["M1_pp"][0], self.eigenvalues["M1_aa"][0])

    @property
    def c2(self) -> float:
        return max(self.eigenvalues["M2_pp"][1], self.eigenvalues["M2_aa"][1])

    @property
    def c3(self) -> float:
        return self.B_z

    @property
    def W_pa_norm(self) -> float:
        return float(np.linalg.norm(self.W_pa, 2))

    @property
    def reduced_rate(self) -> float:
        """``lmin([[lmin W_pp, -|W_pa|/2], [., lmin W_aa]])``, a lower bound on ``-dV/dt / |z|^2``."""

        red = np.array(
            [
                [self.eigenvalues["W_pp"][0], -0.5 * self.W_pa_norm],
                [-0.5 * self.W_pa_norm, self.eigenvalues["W_aa"][0]],
            ]
        )
        return sym2_eigvals(red)[0]

    @property
    def decay_rate(self) -> float:
        """Exponential rate of the envelope ``V(t) <= V(0) exp(-rate t)``."""

        return max(self.reduced_rate, 0.0) / self.c2


def translation_matrices(gains: GainSet, params: InertialParams, alpha: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k_p, k_v, c_p, m = gains.k_p, gains.k_v, gains.c_p, params.m
    M1 = 0.5 * np.array([[k_p, -c_p], [-c_p, m]])
    M2 = 0.5 * np.array([[k_p, c_p], [c_p, m]])
    off = -c_p * k_v * (1.0 + alpha) / (2.0 * m)
    W = np.array(
        [
            [c_p * k_p * (1.0 - alpha) / m, off],
            [off, k_v * (1.0 - alpha) - c_p],
        ]
    )
    return M1, M2, W


def coupling_matrix(gains: GainSet, params: InertialParams, domain: DomainParams) -> np.ndarray:
    return 4.0 * np.array(
        [
            [domain.B_f * gains.c_p / params.m, 0.0],
            [domain.B_f + gains.k_p * domain.B_p, 0.0],
        ]
    )


def sufficient_bounds(gains: GainSet, params: InertialParams, domain: DomainParams) -> SufficientBounds:
    k_X, k_w = gains.k_X, gains.k_omega
    k_p, k_v, m = gains.k_p, gains.k_v, params.m
    lmin, lmax = params.lam_min, params.lam_max
    a = domain.alpha

    ca_den = lmax * k_w * k_w + lmin * lmin * k_X
    c_a_terms = (
        4.0 * k_w,
        4.0 * k_w * k_X * lmin * lmin / ca_den if ca_den > 0.0 else 0.0,
        2.0 * math.sqrt(k_X * lmin),
    )
    cp_den = k_v * k_v * (1.0 + a) ** 2 + 4.0 * m * k_p * (1.0 - a)
    c_p_terms = (
        k_v * (1.0 - a),
        4.0 * m * k_p * k_v * (1.0 - a) ** 2 / cp_den if cp_den > 0.0 else 0.0,
        math.sqrt(k_p * m),
    )
    return SufficientBounds(c_a_terms, c_p_terms)


def gain_certificate(gains: GainSet, params: InertialParams, domain: DomainParams) -> CertificateReport:
    """Evaluate every positive-definiteness condition and ``B_z > 0``; failures are named in ``reasons``."""

    reasons: list[str] = []
    notes: list[str] = []
    if domain.phi >= PHI_MAX:
        reasons.append(f"domain bound phi < 1/8 violated: phi = {domain.phi:g}")

    for name, value in gains.as_dict().items():
        if value <= 0.0:
            reasons.append(f"gain {name} must be positive, got {value:g}")

    M1_pp, M2_pp, W_pp = translation_matrices(gains, params, domain.alpha)
    aa = attitude_gain_matrices(gains.attitude, params, domain.phi)
    W_pa = coupling_matrix(gains, params, domain)

    mats = {
        "M1_pp": M1_pp,
        "M2_pp": M2_pp,
        "W_pp": W_pp,
        "M1_aa": aa.M1_aa,
        "M2_aa": aa.M2_aa,
        "W_aa": aa.W_aa,
    }
    eig = {name: sym2_eigvals(M) for name, M in mats.items()}
    pd = {name: is_pd2(M) for name, M in mats.items()}
    for name, ok in pd.items():
        if not ok:
            reasons.append(f"{name} not positive definite (lambda_min = {eig[name][0]:.6g})")

    W_pa_norm = float(np.linalg.norm(W_pa, 2))
    B_z = 4.0 * eig["W_aa"][0] * eig["W_pp"][0] - W_pa_norm**2
    if not B_z > 0.0:
        reasons.append(f"B_z = 4 lmin(W_aa) lmin(W_pp) - |W_pa|^2 = {B_z:.6g} is not positive")

    schur_pass = False
    if pd["W_aa"]:
        S = W_pp - W_pa @ np.linalg.inv(aa.W_aa) @ W_pa.T
        schur_pass = is_pd2(S)

    bounds = sufficient_bounds(gains, params, domain)
    labels_a = ("c_a < 4 k_omega", "c_a < 4 k_omega k_X lmin^2 / (lmax k_omega^2 + lmin^2 k_X)", "c_a < 2 sqrt(k_X lmin)")
    labels_p = ("c_p < k_v (1 - alpha)", "c_p < 4 m k_p k_v (1 - alpha)^2 / (k_v^2 (1 + alpha)^2 + 4 m k_p (1 - alpha))", "c_p < sqrt(k_p m)")
    for label, bound in zip(labels_a, bounds.c_a_terms):
        if not gains.c_a < bound:
            notes.append(f"sufficient condition {label} violated ({gains.c_a:g} >= {bound:.6g})")
    for label, bound in zip(labels_p, bounds.c_p_terms):
        if not gains.c_p < bound:
            notes.append(f"sufficient condition {label} violated ({gains.c_p:g} >= {bound:.6g})")

    report = CertificateReport(
        gains=gains,
        domain=domain,
        M1_pp=M1_pp,
        M2_pp=M2_pp,
        W_pp=W_pp,
        M1_aa=aa.M1_aa,
        M2_aa=aa.M2_aa,
        W_aa=aa.W_aa,
        W_pa=W_pa,
        B_z=B_z,
        pd=pd,
        eigenvalues=eig,
        bounds=bounds,
        schur_pass=schur_pass,
        reasons=reasons,
        notes=notes,
    )
    logger.debug("Certificate %s: B_z=%.6g reasons=%s", "pass" if report.passed else "fail", B_z, reasons)
    return report


def bf_from_reference(accelerations: Iterable, params: InertialParams, margin: float = BF_MARGIN) -> float:
    """``max |m g e3 + m a_r|`` over the samples, inflated by ``margin``."""

    peak = 0.0
    for a in accelerations:
        peak = max(peak, float(np.linalg.norm(params.m * (params.g * E3 + np.asarray(a, dtype=float)))))
    if peak == 0.0:
        raise ValueError("no reference samples to bound")
    return peak * (1.0 + margin)


def format_report(report: CertificateReport) -> str:
    """Human-readable table of the certificate."""

    def _mat(M: np.ndarray) -> str:
        return "[" + "; ".join(" ".join(f"{x: .6g}" for x in row) for row in M) + "]"

    g = report.gains
    d = report.domain
    lines = [
        "gains:  " + "  ".join(f"{k}={v:g}" for k, v in g.as_dict().items()),
        f"domain: phi={d.phi:g} alpha={d.alpha:.6g} B_f={d.B_f:.6g} B_p={d.B_p:g}",
        "",
        f"{'matrix':<7}{'entries':<44}{'lmin':>14}{'lmax':>14}  PD",
    ]
    for name in ("M1_pp", "M2_pp", "W_pp", "M1_aa", "M2_aa", "W_aa"):
        lo, hi = report.eigenvalues[name]
        M = getattr(report, name)
        lines.append(f"{name:<7}{_mat(M):<44}{lo:>14.6g}{hi:>14.6g}  {'yes' if report.pd[name] else 'NO'}")
    lines += [
        f"{'W_pa':<7}{_mat(report.W_pa):<44}  |W_pa| = {report.W_pa_norm:.6g}",
        "",
        f"B_z = {report.B_z:.6g}",
        f"c1 = {report.c1:.6g}  c2 = {report.c2:.6g}  c3 = {report.c3:.6g}  envelope rate = {report.decay_rate:.6g}",
        f"sufficient bounds: c_a < {report.bounds.c_a:.6g} (c_a = {g.c_a:g}), c_p < {report.bounds.c_p:.6g} (c_p = {g.c_p:g})",
        f"Schur alternative W_pp - W_pa W_aa^-1 W_pa^T > 0: {'pass' if report.schur_pass else 'fail'}",
    ]
    lines += [f"note: {n}" for n in report.notes]
    lines.append("")
    lines.append("PASS" if report.passed else "FAIL")
    lines += [f"  - {r}" for r in report.reasons]
    return "\n".join(lines)


__all__ = [
    "PHI_MAX",
    "SufficientBounds",
    "CertificateReport",
    "translation_matrices",
    "coupling_matrix",
    "sufficient_bounds",
    "gain_certificate",
    "bf_from_reference",
    "format_report",
]
