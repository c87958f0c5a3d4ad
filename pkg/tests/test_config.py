import math

import numpy as np
import pytest

from su2track.config.loader import (
    _apply_env_overrides,
    config_path,
    load_config_file,
    load_defaults,
    merge_config,
)
from su2track.control.certificate import gain_certificate
from su2track.dynamics.sampling import J_EIG_MAX, J_EIG_MIN
from su2track.errors import ConfigError
from su2track.harness.config import SimConfig


def _base_mapping(**sections):
    mapping = load_config_file()
    for name, section in sections.items():
        mapping[name] = section
    return mapping


def _patched(section, **values):
    mapping = load_config_file()
    mapping[section] = {**mapping[section], **values}
    return mapping


def test_defaults_build_the_circle_experiment():
    cfg = SimConfig.from_mapping(load_defaults())
    assert cfg.trajectory.kind == "circle"
    assert cfg.gains.k_X == 600.0
    assert cfg.gains.k_omega == 30.0
    assert cfg.B_p == 0.2
    assert cfg.h == 1e-3
    assert cfg.n_steps == 15000
    assert cfg.record_every == 10
    assert cfg.control_every == 1
    assert cfg.B_f is None
    assert not cfg.estimator


def test_default_gains_are_certified_and_integrable_at_the_default_step():
    cfg = SimConfig.from_mapping(load_defaults())
    real = cfg.realization()
    params = cfg.params_for(real)
    report = gain_certificate(cfg.gains, params, cfg.domain_for(cfg.trajectory.build(), params))
    assert report.passed, report.reasons
    # rate mode stays stable with the torque held over two steps (500 Hz control)
    assert 2.0 * cfg.h * cfg.gains.k_omega / params.lam_min < 2.0


def test_flight_profile_turns_the_estimator_on():
    defaults = SimConfig.from_mapping(load_defaults())
    cfg = SimConfig.from_mapping(load_config_file(config_path("flight.yaml")))
    assert cfg.estimator
    assert cfg.h == 1e-3
    assert cfg.control_every == 2
    assert cfg.gains.as_dict() == defaults.gains.as_dict()
    assert cfg.trajectory.kind == "circle"


def test_env_overrides_use_double_underscore_paths():
    base = {"sim": {"horizon": 15.0}, "gains": {"k_p": 3.0}}
    out = _apply_env_overrides(
        base,
        {
            "SIM__HORIZON": "2.5",
            "GAINS__K_P": "4",
            "SIM__ESTIMATOR": "true",
            "ESTIMATOR__P0_STD": "[0.2, 0.2, 0.1]",
            "PATH": "/usr/bin",
            "HOME__DIR": "/root",
        },
    )
    assert out["sim"] == {"horizon": 2.5, "estimator": True}
    assert out["gains"]["k_p"] == 4
    assert "estimator" not in out
    assert "home" not in out
    assert base["sim"]["horizon"] == 15.0


def test_env_overrides_reach_the_loaded_file(monkeypatch):
    monkeypatch.setenv("SIM__HORIZON", "3")
    monkeypatch.setenv("ESTIMATOR__NOISE__POSE_STD", "0.01")
    mapping = load_config_file()
    assert mapping["sim"]["horizon"] == 3
    assert mapping["estimator"]["noise"]["pose_std"] == 0.01
    assert SimConfig.from_mapping(mapping).noise.pose_std == 0.01


def test_merge_config_is_recursive():
    base = {"sim": {"h": 1e-3, "horizon": 5.0}, "gains": {"k_p": 1.0}}
    merged = merge_config(base, {"sim": {"horizon": 2.0}, "output": {"dir": "out"}})
    assert merged == {"sim": {"h": 1e-3, "horizon": 2.0}, "gains": {"k_p": 1.0}, "output": {"dir": "out"}}
    assert base["sim"]["horizon"] == 5.0


def test_config_file_is_merged_over_defaults(tmp_path):
    path = tmp_path / "short.yaml"
    path.write_text("sim:\n  horizon: 0.5\ntrajectory:\n  kind: hover\n  heading: yaw\n", encoding="utf-8")
    cfg = SimConfig.from_mapping(load_config_file(path))
    assert cfg.horizon == 0.5
    assert cfg.h == 1e-3
    assert cfg.trajectory.kind == "hover"


def test_config_file_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config_file(path)
    with pytest.raises(FileNotFoundError):
        load_config_file(tmp_path / "missing.yaml")


@pytest.mark.parametrize(
    "mapping",
    [
        pytest.param({"trajectory": {"kind": "hover", "heading": "velocity"}}, id="hover-velocity-heading"),
        pytest.param({"trajectory": {"kind": "spline", "heading": "yaw", "spline": {"speed": 1.0}}}, id="no-waypoints"),
        pytest.param({"trajectory": {"kind": "samples", "samples": {"path": "/nonexistent.csv"}}}, id="missing-samples"),
        pytest.param({"trajectory": {"kind": "lemniscate"}}, id="unknown-kind"),
    ],
)
def test_invalid_trajectory_sections(mapping):
    with pytest.raises(ConfigError):
        SimConfig.from_mapping(_base_mapping(**mapping))


def test_invalid_values_name_their_key():
    with pytest.raises(ConfigError, match="sim.mode"):
        SimConfig.from_mapping(_patched("sim", mode="case4"))
    with pytest.raises(ConfigError, match="domain"):
        SimConfig.from_mapping(_patched("domain", phi=2.5))
    with pytest.raises(ConfigError, match="sim.h"):
        SimConfig.from_mapping(_patched("sim", h="fast"))
    with pytest.raises(ConfigError, match="gains"):
        SimConfig.from_mapping(_base_mapping(gains={"k_p": 1.0}))
    with pytest.raises(ConfigError, match="realization.seed"):
        SimConfig.from_mapping(_patched("realization", source="seed", seed=None))


def test_estimator_needs_commensurate_rates():
    mapping = _patched("sim", estimator=True, h=1e-3)
    with pytest.raises(ConfigError, match="control_hz"):
        SimConfig.from_mapping(mapping)
    mapping["rates"] = {**mapping["rates"], "control_hz": 300.0}
    with pytest.raises(ConfigError, match="rates"):
        SimConfig.from_mapping(mapping)
    mapping["rates"] = {**mapping["rates"], "control_hz": 500.0, "imu_hz": 50.0}
    with pytest.raises(ConfigError, match="imu_hz"):
        SimConfig.from_mapping(mapping)


def test_seeded_realizations_are_reproducible():
    cfg = SimConfig.from_mapping(load_defaults()).with_seed(7)
    a, b = cfg.realization(), cfg.realization()
    assert np.array_equal(a.J, b.J)
    assert np.array_equal(a.state.p, b.state.p)
    eig = np.linalg.eigvalsh(a.J)
    assert eig[0] == pytest.approx(J_EIG_MIN)
    assert eig[-1] == pytest.approx(J_EIG_MAX)
    assert a.seed == 7


def test_fixture_attitude_is_projected():
    real = SimConfig.from_mapping(load_defaults()).realization()
    assert real.seed is None
    assert real.metadata["R0_adjustment_fro"] < 0.05
    assert real.state.X.norm_error() < 1e-12


def test_auto_force_bound_follows_the_reference():
    cfg = SimConfig.from_mapping(load_defaults()).with_overrides(horizon=1.0)
    params = cfg.params_for(cfg.realization())
    domain = cfg.domain_for(cfg.trajectory.build(), params)
    assert domain.B_f == pytest.approx(1.1 * 0.1 * math.sqrt(109.0))
