"""Gain-file certification."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from su2track.control.attitude import InertialParams
from su2track.control.certificate import CertificateReport, format_report, gain_certificate
from su2track.control.gains import DomainParams, GainSet
from su2track.dynamics.sampling import FIXTURE_J
from su2track.errors import ParseError

logger = logging.getLogger(__name__)


def _inertia(params: Mapping[str, Any]) -> np.ndarray:
    """``J`` as a matrix, ``fixture``, or ``J_bounds: [lmin, lmax]`` (only the extremes matter)."""

    if "J_bounds" in params:
        lo, hi = (float(x) for x in params["J_bounds"])
        return np.diag([lo, lo, hi])
    J = params.get("J", "fixture")
    if J == "fixture":
        return FIXTURE_J.copy()
    return np.asarray(J, dtype=float)


def load_gains_file(path: str | Path) -> tuple[GainSet, InertialParams, DomainParams]:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"gains file not found: {path}")
    try:
        with path.open("r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ValueError("expected a mapping at the top level")
        gains = GainSet.from_mapping(data.get("gains") or {})
        params_raw = data.get("params") or {}
        params = InertialParams(float(params_raw.get("m", 0.1)), float(params_raw.get("g", 10.0)), _inertia(params_raw))
        dom = data.get("domain") or {}
        domain = DomainParams(
            float(dom.get("phi", 0.01)),
            float(dom.get("B_f", 1.9)),
            float(dom.get("B_p", 1.0)),
            float(dom.get("phi_attract", 1.999)),
        )
    except (yaml.YAMLError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return gains, params, domain


def certify(path: str | Path) -> CertificateReport:
    """Evaluate the certificate for a gains file and log the table."""

    gains, params, domain = load_gains_file(path)
    report = gain_certificate(gains, params, domain)
    logger.info("Certificate for %s:\n%s", path, format_report(report))
    return report


__all__ = ["load_gains_file", "certify"]
