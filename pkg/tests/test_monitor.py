import numpy as np
import pytest

from su2track.control.attitude import InertialParams
from su2track.control.certificate import gain_certificate
from su2track.control.gains import DomainParams, GainSet
from su2track.harness.monitor import lyapunov_monitor
from su2track.harness.trace import TRACE_COLUMNS, SimTrace

GAINS = GainSet.from_values(6.0, 3.0, 0.07, 600.0, 30.0, 0.1)
PARAMS = InertialParams(0.1, 10.0, np.diag([0.05, 0.05, 0.1]))


def _domain(**overrides):
    values = {"phi": 0.01, "B_f": 1.15, "B_p": 0.2}
    values.update(overrides)
    return DomainParams(**values)


def _decaying_trace(n=100, dt=0.01, corrupt=()):
    """Position error ``0.1 exp(-t)`` with ``V`` between the sandwich bounds, always inside ``D``."""

    cert = gain_certificate(GAINS, PARAMS, _domain())
    scale = np.sqrt(cert.c1 * cert.c2)
    data = np.zeros((n, len(TRACE_COLUMNS)))
    col = TRACE_COLUMNS.index
    t = np.arange(n) * dt
    e = 0.1 * np.exp(-t)
    data[:, col("t")] = t
    data[:, col("epx")] = e
    data[:, col("V")] = scale * e**2
    data[:, col("in_D")] = 1.0
    for row in corrupt:
        data[row, col("V")] *= 10.0
    return SimTrace(data)


def test_clean_trace_passes():
    report = lyapunov_monitor(_decaying_trace(), GAINS, PARAMS, _domain())
    assert report.passed
    assert report.entered_D_at == 0.0
    assert report.rows_checked == 100
    assert report.lines()[-1] == "PASS"


def test_corrupted_rows_are_flagged():
    report = lyapunov_monitor(_decaying_trace(corrupt=(30, 31)), GAINS, PARAMS, _domain())
    assert not report.passed
    assert not report.precheck_failed
    assert report.rows == [30, 31]
    kinds = {v.kind for v in report.violations}
    assert "increase" in kinds
    assert "envelope" in kinds
    assert report.lines()[-1] == "FAIL (2 rows flagged)"


def test_lower_bound_violation():
    trace = _decaying_trace()
    trace.data[50, TRACE_COLUMNS.index("V")] = 0.0
    report = lyapunov_monitor(trace, GAINS, PARAMS, _domain())
    assert report.rows == [50]
    assert report.violations[0].kind == "lower_bound"


def test_transient_rows_are_skipped():
    report = lyapunov_monitor(_decaying_trace(corrupt=(30, 31)), GAINS, PARAMS, _domain(), transient=0.5)
    assert report.passed
    assert report.rows_checked == 50
    assert report.entered_D_at == pytest.approx(0.5)


def test_uncertified_gains_fail_the_precheck():
    report = lyapunov_monitor(_decaying_trace(), GAINS, PARAMS, _domain(phi=0.2))
    assert report.precheck_failed
    assert not report.passed
    assert report.rows_checked == 0
    assert report.lines()[0] == "certificate pre-check failed:"


def test_slow_rise_inside_D_is_flagged():
    trace = _decaying_trace()
    V = trace.data[:, TRACE_COLUMNS.index("V")]
    V[50] = 1.049 * V[49]
    report = lyapunov_monitor(trace, GAINS, PARAMS, _domain(), rel_tol=0.05)
    assert report.rows == [50]
    assert [v.kind for v in report.violations] == ["increase"]


def test_round_off_growth_is_not_an_increase():
    trace = _decaying_trace()
    V = trace.data[:, TRACE_COLUMNS.index("V")]
    V[50] = V[49] * (1.0 + 1e-12)
    assert lyapunov_monitor(trace, GAINS, PARAMS, _domain()).passed
