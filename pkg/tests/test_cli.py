import logging

import numpy as np
import pytest
import yaml

from su2track.cli.main import EXIT_CERTIFICATE, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main
from su2track.config.exception_handler import exit_code_for, log_uncaught, run_guarded
from su2track.dynamics.sampling import FIXTURE_P0
from su2track.errors import ConfigError, DegenerateHeading, EmptyGyroBuffer, InvalidPhi, SimulationDiverged
from su2track.harness.plots import PANELS
from su2track.harness.trace import SimTrace


def _base_config(tmp_path, **sections):
    mapping = {
        "trajectory": {"kind": "hover", "heading": "yaw"},
        "realization": {"source": "reference"},
        "sim": {"horizon": 0.05},
    }
    mapping.update(sections)
    path = tmp_path / "hover.yaml"
    path.write_text(yaml.safe_dump(mapping), encoding="utf-8")
    return path


def _base_gains(tmp_path, **overrides):
    gains = {"k_p": 3.0, "k_v": 2.0, "c_p": 0.05, "k_X": 40000.0, "k_omega": 200.0, "c_a": 0.1}
    gains.update(overrides)
    doc = {
        "gains": gains,
        "params": {"m": 0.1, "g": 10.0, "J_bounds": [0.05, 0.1]},
        "domain": {"phi": 0.01, "B_f": 1.9, "B_p": 1.0},
    }
    path = tmp_path / "gains.yaml"
    path.write_text(yaml.safe_dump(doc), encoding="utf-8")
    return path


def test_certify_shipped_gains(capsys):
    assert main(["certify"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_certify_rejects_uncertified_gains(tmp_path):
    assert main(["certify", str(_base_gains(tmp_path, c_p=0.34))]) == EXIT_CERTIFICATE


def test_certify_missing_file_is_a_usage_error(tmp_path):
    assert main(["certify", str(tmp_path / "missing.yaml")]) == EXIT_USAGE


def test_unknown_command_exits_with_usage_code():
    with pytest.raises(SystemExit) as exc:
        main(["fly"])
    assert exc.value.code == EXIT_USAGE


def test_sim_monitor_and_plot_share_the_trace(tmp_path):
    config = _base_config(tmp_path)
    out = tmp_path / "run"
    assert main(["sim", "--config", str(config), "--out", str(out)]) == EXIT_OK

    summary = yaml.safe_load((out / "summary.yaml").read_text(encoding="utf-8"))
    assert summary["certificate_passed"] is True
    assert summary["entered_D_at"] == 0.0
    trace = SimTrace.read_csv(out / "trace.csv")
    assert len(trace) == 6

    trace_path = str(out / "trace.csv")
    assert main(["monitor", "--config", str(config), "--trace", trace_path]) == EXIT_OK
    assert main(["plot", "--trace", trace_path, "--out", str(tmp_path / "plots")]) == EXIT_OK
    assert sorted(p.stem for p in (tmp_path / "plots").glob("*.svg")) == sorted(PANELS)


def test_bad_config_is_a_usage_error(tmp_path):
    config = _base_config(tmp_path, sim={"horizon": 0.05, "mode": "case4"})
    assert main(["sim", "--config", str(config), "--out", str(tmp_path / "run")]) == EXIT_USAGE


def test_replay_ekf_writes_estimates(tmp_path):
    log = tmp_path / "flight.log"
    log.write_text(
        "POSE 0 1 2 3 0.02 0.02 0.02\nIMU 0.01 0 0 10 0 0 0\nIMU 0.02 0 0 10 0 0 0\n",
        encoding="utf-8",
    )
    out = tmp_path / "estimates.csv"
    assert main(["replay-ekf", str(log), "--out", str(out), "--predict-hz", "100"]) == EXIT_OK
    data = np.loadtxt(out, delimiter=",", skiprows=1, ndmin=2)
    assert data.shape == (2, 12)
    assert np.allclose(data[-1, 1:4], [1.0, 2.0, 3.0])


def test_paper_fixture_flag_starts_from_the_printed_state(tmp_path):
    config = _base_config(tmp_path, trajectory={"kind": "circle", "heading": "velocity"}, sim={"horizon": 0.02})
    out = tmp_path / "run"
    assert main(["sim", "--config", str(config), "--fixture", "paper", "--out", str(out)]) == EXIT_OK
    trace = SimTrace.read_csv(out / "trace.csv")
    assert np.allclose([trace["px"][0], trace["py"][0], trace["pz"][0]], FIXTURE_P0)

    with pytest.raises(SystemExit) as exc:
        main(["sim", "--fixture", "published"])
    assert exc.value.code == EXIT_USAGE


def test_divergence_maps_to_the_violation_code(tmp_path):
    config = _base_config(tmp_path, sim={"horizon": 0.05, "diverge_bound": 1e-3})
    assert main(["sim", "--config", str(config), "--out", str(tmp_path / "run")]) == EXIT_VIOLATION


@pytest.mark.parametrize(
    ("exc", "code"),
    [
        pytest.param(SimulationDiverged("norm"), EXIT_VIOLATION, id="diverged"),
        pytest.param(ConfigError("sim.h"), EXIT_USAGE, id="config"),
        pytest.param(InvalidPhi("phi"), EXIT_USAGE, id="phi"),
        pytest.param(DegenerateHeading("speed"), EXIT_USAGE, id="reference"),
        pytest.param(EmptyGyroBuffer("gyro"), EXIT_USAGE, id="estimator"),
        pytest.param(FileNotFoundError("gains.yaml"), EXIT_USAGE, id="missing-file"),
    ],
)
def test_known_errors_have_exit_codes(exc, code):
    assert exit_code_for(exc)[0] == code

    def _command():
        raise exc

    assert run_guarded(_command) == code


def test_unknown_errors_propagate_with_a_traceback(caplog):
    assert exit_code_for(KeyError("k_p")) is None

    def _command():
        raise KeyError("k_p")

    with pytest.raises(KeyError):
        run_guarded(_command)

    with caplog.at_level(logging.ERROR):
        log_uncaught(ConfigError, ConfigError("bad sim.h"), None)
        log_uncaught(KeyError, KeyError("k_p"), None)
    first, second = caplog.records[-2:]
    assert "exit code 1" in first.getMessage()
    assert "Traceback" not in first.getMessage()
    assert "KeyError" in second.getMessage()
