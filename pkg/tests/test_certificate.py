import itertools
import math

import numpy as np
import pytest

from su2track.control.attitude import InertialParams
from su2track.control.certificate import bf_from_reference, format_report, gain_certificate
from su2track.control.gains import DomainParams, GainSet
from su2track.control.lyapunov import bound_constants, domain_check_full, full_lyapunov
from su2track.dynamics.references import CircleReference
from su2track.errors import InvalidPhi
from su2track.lie import Su2Element, exp_su2


def _base_gains(**overrides):
    values = {"k_p": 3.0, "k_v": 2.0, "c_p": 0.05, "k_X": 40000.0, "k_omega": 200.0, "c_a": 0.1}
    values.update(overrides)
    return GainSet.from_mapping(values)


def _base_domain(**overrides):
    values = {"phi": 0.01, "B_f": 1.9, "B_p": 1.0}
    values.update(overrides)
    return DomainParams(**values)


def _params():
    return InertialParams(0.1, 10.0, np.diag([0.05, 0.05, 0.1]))


def test_certified_gains_pass():
    report = gain_certificate(_base_gains(), _params(), _base_domain())
    assert report.passed, report.reasons
    assert all(report.pd.values())
    assert report.B_z > 0.0
    assert report.c1 > 0.0
    assert report.c2 >= report.c1
    assert report.decay_rate > 0.0
    assert "PASS" in format_report(report)


def test_large_cross_weight_breaks_translation_decay():
    report = gain_certificate(_base_gains(c_p=0.34), _params(), _base_domain())
    assert not report.passed
    assert not report.pd["W_pp"]
    assert any("W_pp" in reason for reason in report.reasons)
    assert "FAIL" in format_report(report)


def test_phi_above_one_eighth_is_rejected():
    report = gain_certificate(_base_gains(), _params(), _base_domain(phi=0.2))
    assert not report.passed
    assert any("phi < 1/8" in reason for reason in report.reasons)


def test_domain_rejects_phi_outside_interval():
    with pytest.raises(InvalidPhi):
        _base_domain(phi=0.0)
    with pytest.raises(InvalidPhi):
        _base_domain(phi_attract=2.5)


def test_gain_mapping_requires_all_gains():
    with pytest.raises(KeyError):
        GainSet.from_mapping({"k_p": 1.0})


def test_gain_mapping_accepts_k_c_alias():
    gains = GainSet.from_mapping({"k_p": 1, "k_v": 1, "c_p": 0.1, "k_X": 1, "k_omega": 1, "k_c": 0.2})
    assert gains.c_a == pytest.approx(0.2)


def test_coupling_matrix_entries():
    report = gain_certificate(_base_gains(), _params(), _base_domain())
    assert report.W_pa[0, 0] == pytest.approx(4.0 * 1.9 * 0.05 / 0.1)
    assert report.W_pa[1, 0] == pytest.approx(4.0 * (1.9 + 3.0 * 1.0))
    assert np.allclose(report.W_pa[:, 1], 0.0)


def test_bound_constants_match_report():
    gains, params, domain = _base_gains(), _params(), _base_domain()
    report = gain_certificate(gains, params, domain)
    c1, c2 = bound_constants(gains, params, domain)
    assert c1 == pytest.approx(report.c1)
    assert c2 == pytest.approx(report.c2)


def test_bf_from_circle_reference():
    params = _params()
    circle = CircleReference()
    accels = [circle.sample(t).a for t in np.linspace(0.0, 2.0 * math.pi, 50)]
    assert bf_from_reference(accels, params, margin=0.0) == pytest.approx(0.1 * math.sqrt(109.0))
    with pytest.raises(ValueError):
        bf_from_reference([], params)


def test_full_lyapunov_sandwich_and_domain():
    gains, params, domain = _base_gains(), _params(), _base_domain()
    X_d = Su2Element.identity()
    X = exp_su2(np.array([0.003, 0.0, 0.0]))
    e_p = np.array([0.05, -0.02, 0.01])
    e_v = np.array([0.01, 0.0, -0.02])
    e_w = np.array([0.002, 0.0, 0.001])
    val = full_lyapunov(e_p, e_v, X_d, X, e_w, gains, params, domain)
    assert val.V == pytest.approx(val.V_p + val.V_a)
    assert val.lower <= val.V + 1e-12
    assert val.V <= val.upper + 1e-12

    member = domain_check_full(e_p, e_v, X_d, X, e_w, gains, params, domain)
    assert member.in_D
    assert member.in_attractive

    far = domain_check_full(e_p, e_v, X_d, exp_su2(np.array([0.0, 0.5, 0.0])), e_w, gains, params, domain)
    assert not far.in_D
    assert far.in_attractive


def test_simulation_tuple_certifies_on_the_circle():
    gains = _base_gains(k_p=6.0, k_v=3.0, c_p=0.07, k_X=600.0, k_omega=30.0)
    domain = _base_domain(B_f=1.1 * 0.1 * math.sqrt(109.0), B_p=0.2)
    report = gain_certificate(gains, _params(), domain)
    assert report.passed, report.reasons
    assert report.eigenvalues["W_aa"][0] == pytest.approx(28.4005, rel=1e-4)
    assert report.eigenvalues["W_pp"][0] == pytest.approx(1.12168, rel=1e-4)
    assert report.B_z == pytest.approx(28.843, rel=1e-3)
    assert report.c1 == pytest.approx(0.0249979, rel=1e-4)
    assert report.c2 == pytest.approx(1206.03, rel=1e-4)

    # the same tuple cannot carry the larger force and position bounds
    assert not gain_certificate(gains, _params(), _base_domain()).passed


def _oracle_passes(k_p, k_v, c_p, k_X, k_w, c_a, *, m=0.1, lmin=0.05, lmax=0.1, phi=0.01, B_f=1.9, B_p=1.0):
    """``None`` when some eigenvalue or ``B_z`` sits too close to zero to call."""

    alpha = 2.0 * math.sqrt(2.0 * phi)
    off_p = -c_p * k_v * (1.0 + alpha) / (2.0 * m)
    off_a = -c_a * k_w / (2.0 * lmin)
    mats = [
        0.5 * np.array([[k_p, -c_p], [-c_p, m]]),
        0.5 * np.array([[k_p, c_p], [c_p, m]]),
        np.array([[c_p * k_p * (1.0 - alpha) / m, off_p], [off_p, k_v * (1.0 - alpha) - c_p]]),
        0.5 * np.array([[4.0 * k_X, -c_a], [-c_a, lmin]]),
        0.5 * np.array([[8.0 * k_X / (2.0 - phi), c_a], [c_a, lmax]]),
        np.array([[c_a * k_X / lmax, off_a], [off_a, k_w - c_a / 4.0]]),
    ]
    eigs = [np.linalg.eigvalsh(M) for M in mats]
    if any(abs(e[0]) < 1e-9 * abs(e[-1]) for e in eigs):
        return None
    W_pa_sq = 16.0 * ((B_f * c_p / m) ** 2 + (B_f + k_p * B_p) ** 2)
    B_z = 4.0 * eigs[5][0] * eigs[2][0] - W_pa_sq
    if abs(B_z) < 1e-9 * W_pa_sq:
        return None
    return all(e[0] > 0.0 for e in eigs) and B_z > 0.0


def test_certificate_matches_eigenvalue_oracle_on_a_gain_grid():
    grid = {
        "k_p": (0.5, 3.0, 6.0, 20.0, 60.0),
        "k_v": (0.5, 2.0, 3.0, 8.0, 20.0),
        "c_p": (0.01, 0.05, 0.07, 0.2, 0.5),
        "k_X": (5.0, 60.0, 600.0, 4e3, 4e4),
        "k_omega": (1.0, 10.0, 30.0, 200.0, 800.0),
        "c_a": (0.01, 0.1, 0.5, 2.0, 10.0),
    }
    params, domain = _params(), _base_domain()
    outcomes = {True: 0, False: 0}
    for values in itertools.product(*grid.values()):
        expected = _oracle_passes(*values)
        if expected is None:
            continue
        report = gain_certificate(GainSet.from_mapping(dict(zip(grid, values))), params, domain)
        assert report.passed == expected, values
        outcomes[expected] += 1
    assert outcomes[True] > 0
    assert outcomes[False] > 0
    assert sum(outcomes.values()) > 10_000
