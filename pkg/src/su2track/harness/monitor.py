"""Lyapunov monitor over a recorded trace.

Three checks per row:

* sandwich: ``c1 |z|^2 <= V`` everywhere, ``V <= c2 |z|^2`` where ``Gamma(X_d, X) <= phi``;
* increase: inside ``D`` (after the first entry) ``V`` does not grow;
* envelope: after entry at ``t0``, ``V(t) <= V(t0) exp(-rate (t - t0))``.

The envelope check allows ``rel_tol`` relative slack plus an absolute
``noise_floor``; the increase and sandwich checks allow only the floor and a
``1e-9`` relative round-off margin. A row that fails is skipped as the
comparison base for later rows.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from su2track.control.attitude import InertialParams
from su2track.control.certificate import CertificateReport, gain_certificate
from su2track.control.gains import DomainParams, GainSet
from su2track.harness.simulate import AttitudeRun
from su2track.harness.trace import SimTrace

logger = logging.getLogger(__name__)

SANDWICH_REL = 1e-9


@dataclass(frozen=True)
class Violation:
    row: int
    t: float
    kind: str
    detail: str


@dataclass(eq=False)
class MonitorReport:
    certificate: CertificateReport
    violations: list[Violation] = field(default_factory=list)
    entered_D_at: Optional[float] = None
    rows_checked: int = 0

    @property
    def precheck_failed(self) -> bool:
        return not self.certificate.passed

    @property
    def passed(self) -> bool:
        return self.certificate.passed and not self.violations

    @property
    def rows(self) -> list[int]:
        return sorted({v.row for v in self.violations})

    def lines(self) -> list[str]:
        if self.precheck_failed:
            return ["certificate pre-check failed:"] + [f"  - {r}" for r in self.certificate.reasons]
        out = [f"rows checked: {self.rows_checked}, entered D at: {self.entered_D_at}"]
        out += [f"row {v.row} t={v.t:.4f} {v.kind}: {v.detail}" for v in self.violations]
        out.append("PASS" if self.passed else f"FAIL ({len(self.rows)} rows flagged)")
        return out


def lyapunov_monitor(
    trace: SimTrace,
    gains: GainSet,
    params: InertialParams,
    domain: DomainParams,
    *,
    rel_tol: float = 0.05,
    noise_floor: float = 1e-9,
    transient: float = 0.0,
) -> MonitorReport:
    """Check a trace against the sandwich bounds, monotonicity in ``D`` and the envelope.

    Rows earlier than ``transient`` are skipped. The certificate is evaluated
    first; when it fails no row is checked.
    """

    cert = gain_certificate(gains, params, domain)
    report = MonitorReport(certificate=cert)
    if not cert.passed:
        logger.warning("Monitor pre-check: gains are not certified")
        return report

    t = trace.t
    V = trace["V"]
    in_D = trace["in_D"] > 0.5
    z_sq = sum(trace.norms(name) ** 2 for name in ("ep", "ev", "eX", "ew"))
    lower = cert.c1 * z_sq
    upper = cert.c2 * z_sq
    gamma_ok = trace["gamma_d"] <= domain.phi
    rate = cert.decay_rate

    base: Optional[tuple[float, float]] = None  # (t0, V0) at entry into D
    last_good: Optional[float] = None
    checked = 0
    for i in range(len(trace)):
        if t[i] < transient:
            continue
        checked += 1
        flagged = False

        def _flag(kind: str, detail: str) -> None:
            nonlocal flagged
            flagged = True
            report.violations.append(Violation(i, float(t[i]), kind, detail))

        slack = noise_floor + SANDWICH_REL * abs(V[i])
        if V[i] < lower[i] - slack:
            _flag("lower_bound", f"V={V[i]:.6g} < c1|z|^2={lower[i]:.6g}")
        if gamma_ok[i] and V[i] > upper[i] + slack:
            _flag("upper_bound", f"V={V[i]:.6g} > c2|z|^2={upper[i]:.6g}")

        if base is None and in_D[i]:
            base = (float(t[i]), float(V[i]))
            report.entered_D_at = base[0]
        if base is not None:
            if in_D[i] and last_good is not None and V[i] > last_good + slack:
                _flag("increase", f"V={V[i]:.6g} after {last_good:.6g}")
            envelope = base[1] * math.exp(-rate * (t[i] - base[0]))
            if V[i] > envelope * (1.0 + rel_tol) + noise_floor:
                _flag("envelope", f"V={V[i]:.6g} > {envelope:.6g}")

        if not flagged and base is not None:
            last_good = float(V[i])

    report.rows_checked = checked
    if report.violations:
        logger.warning("Monitor flagged %d rows", len(report.rows))
    return report


def attitude_run_violations(run: AttitudeRun, rel_tol: float = 0.05, noise_floor: float = 1e-12) -> list[int]:
    """Rows of an attitude-only run where ``V`` grows or leaves its exponential envelope.

    Only rows from the first in-domain sample onward are checked.
    """

    inside = np.flatnonzero(run.in_domain)
    if inside.size == 0:
        return []
    start = int(inside[0])
    V0, t0 = float(run.V[start]), float(run.t[start])
    bad: list[int] = []
    for i in range(start + 1, len(run.V)):
        grew = run.V[i] > run.V[i - 1] + noise_floor
        envelope = V0 * math.exp(-run.decay_rate * (run.t[i] - t0))
        if grew or run.V[i] > envelope * (1.0 + rel_tol) + noise_floor:
            bad.append(i)
    return bad


__all__ = ["Violation", "MonitorReport", "lyapunov_monitor", "attitude_run_violations"]
