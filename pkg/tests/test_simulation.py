import time

import numpy as np
import pytest

from su2track.config.loader import config_path, load_config_file, merge_config
from su2track.errors import PlotError
from su2track.harness.config import SimConfig
from su2track.harness.monte_carlo import run_monte_carlo
from su2track.harness.plots import PANELS, emit_plots
from su2track.harness.simulate import run_single
from su2track.harness.trace import TRACE_COLUMNS, SimTrace

HOVER = {
    "trajectory": {"kind": "hover", "heading": "yaw"},
    "realization": {"source": "reference"},
    "sim": {"horizon": 0.05},
}


def _base_config(path=None, **sections):
    mapping = merge_config(load_config_file(path), HOVER)
    mapping = merge_config(mapping, sections)
    return SimConfig.from_mapping(mapping)


def test_hover_on_reference_stays_on_reference():
    trace = run_single(_base_config())
    assert len(trace) == 6
    assert np.allclose(trace.t, np.arange(6) * 0.01)
    for value in trace.summary["terminal"].values():
        assert value < 1e-12
    assert np.allclose(trace["f"], 1.0)
    assert np.all(trace["in_D"] == 1.0)
    assert trace.summary["certificate_passed"]
    assert trace.summary["entered_D_at"] == 0.0
    assert trace.summary["held_steps"] == 0
    assert trace.summary["B_f"] == pytest.approx(1.1)


def test_estimator_in_loop_follows_the_rate_table():
    cfg = _base_config(config_path("flight.yaml"), sim={"horizon": 0.1})
    trace = run_single(cfg, record_events=True)
    assert trace.summary["scheduler_counts"] == {"imu": 51, "predict": 11, "pose": 6, "control": 51}
    assert trace.summary["rejected_measurements"] == 0
    assert [job for step, job in trace.summary["events"][:4]] == ["imu", "predict", "pose", "control"]
    assert np.all(trace["est_pos_err"] < 1e-9)
    for value in trace.summary["terminal"].values():
        assert value < 1e-9


def test_seeded_runs_are_deterministic():
    cfg = _base_config(realization={"source": "seed", "seed": 11})
    a, b = run_single(cfg), run_single(cfg)
    assert np.array_equal(a.data, b.data)
    assert a.summary["seed"] == 11


def test_trace_csv_keeps_every_column(tmp_path):
    trace = run_single(_base_config(realization={"source": "seed", "seed": 3}))
    path = trace.write_csv(tmp_path / "trace.csv")
    loaded = SimTrace.read_csv(path)
    assert loaded.columns == TRACE_COLUMNS
    assert np.array_equal(loaded.data, trace.data)
    assert loaded.terminal_errors() == trace.terminal_errors()


def test_trace_csv_rejects_foreign_files(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("t,x\n0,1\n", encoding="utf-8")
    with pytest.raises(ValueError):
        SimTrace.read_csv(path)
    with pytest.raises(FileNotFoundError):
        SimTrace.read_csv(tmp_path / "missing.csv")


def test_single_run_sweep_matches_run_single():
    cfg = _base_config()
    summary = run_monte_carlo(cfg, n=1, base_seed=5)
    trace = run_single(cfg.with_seed(5))
    assert summary.n == 1
    assert summary.runs[0].seed == 5
    assert summary.runs[0].terminal == trace.summary["terminal"]


def test_sweep_records_failures_without_stopping():
    cfg = _base_config().with_overrides(diverge_bound=1e-3)
    summary = run_monte_carlo(cfg, n=3, base_seed=1, workers=1)
    assert [r.seed for r in summary.runs] == [1, 2, 3]
    assert len(summary.failures) == 3
    assert all(r.error.startswith("SimulationDiverged") for r in summary.runs)
    assert not summary.all_converged
    assert summary.quantiles() == {}
    assert summary.as_dict()["n"] == 3


def test_sweep_summary_counts():
    cfg = _base_config(monte_carlo={"converge_tol": 10.0})
    summary = run_monte_carlo(cfg, n=2, base_seed=1, workers=1)
    assert summary.converged == sum(r.converged for r in summary.runs)
    assert set(summary.quantiles()) == {"ep", "ev", "eX", "ew"}


def test_plots_written_for_every_panel(tmp_path):
    trace = run_single(_base_config(realization={"source": "seed", "seed": 2}))
    paths = emit_plots(trace, tmp_path / "plots")
    assert [p.stem for p in paths] == list(PANELS)
    assert all(p.exists() and p.stat().st_size > 0 for p in paths)


def test_plots_need_samples(tmp_path):
    with pytest.raises(PlotError):
        emit_plots(SimTrace.from_rows([]), tmp_path)


CIRCLE_FIXTURE = {
    "trajectory": {"kind": "circle", "heading": "velocity"},
    "realization": {"source": "fixture"},
}


def test_estimator_in_loop_tracks_like_true_state_feedback():
    flight = config_path("flight.yaml")
    with_filter = run_single(_base_config(flight, sim={"horizon": 2.5}, **CIRCLE_FIXTURE))
    true_state = run_single(_base_config(flight, sim={"horizon": 2.5, "estimator": False}, **CIRCLE_FIXTURE))

    for name in ("ep", "ev"):
        assert with_filter.summary["terminal"][name] <= 2.0 * true_state.summary["terminal"][name]
    settled = with_filter.t >= 2.0
    assert settled.any()
    assert np.all(with_filter["est_pos_err"][settled] <= 1e-3)
    assert with_filter.summary["rejected_measurements"] == 0


def test_fixture_on_the_circle_converges_and_enters_the_domain():
    trace = run_single(_base_config(sim={"horizon": 8.0}, **CIRCLE_FIXTURE))
    assert trace.summary["certificate_passed"]
    assert trace.summary["entered_D_at"] is not None
    for value in trace.summary["terminal"].values():
        assert value < 1e-2
    V_after_1s = trace["V"][int(np.searchsorted(trace.t, 1.0))]
    assert trace["V"][-1] < 1e-3 * V_after_1s


def test_seeded_sweep_on_the_circle_converges_at_a_usable_rate():
    cfg = _base_config(
        trajectory={"kind": "circle", "heading": "velocity"},
        realization={"source": "seed", "seed": 7},
        sim={"horizon": 3.0},
    )
    started = time.perf_counter()
    summary = run_monte_carlo(cfg, n=2, base_seed=7, workers=1)
    elapsed = time.perf_counter() - started

    assert summary.failures == []
    assert all(r.terminal["ep"] < 0.5 for r in summary.runs)
    assert 2 * cfg.n_steps / elapsed > 100.0
