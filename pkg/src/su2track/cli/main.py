"""``su2track`` command line: sim, mc, certify, monitor, plot, replay-ekf.

Exit codes: 0 success, 1 usage or configuration error, 2 divergence or
monitor violation, 3 certificate failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import yaml

from su2track.config.exception_handler import (
    EXIT_CERTIFICATE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
    run_guarded,
    setup_exception_hook,
)
from su2track.config.loader import config_path, load_config_file, merge_config
from su2track.control.certificate import format_report
from su2track.estimator.replay import read_replay_log, replay_ekf
from su2track.harness.certify import certify
from su2track.harness.config import SimConfig
from su2track.harness.monitor import lyapunov_monitor
from su2track.harness.monte_carlo import run_monte_carlo
from su2track.harness.plots import emit_plots
from su2track.harness.simulate import run_single
from su2track.harness.trace import SimTrace
from su2track.telemetry.logs import setup_logging

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---- helpers ---------------------------------------------------------------------

def _sim_config(args: argparse.Namespace) -> SimConfig:
    mapping = load_config_file(args.config)
    if getattr(args, "fixture", None) == "paper":
        mapping = merge_config(mapping, {"realization": {"source": "fixture"}})
    if getattr(args, "seed", None) is not None:
        mapping = merge_config(mapping, {"realization": {"source": "seed", "seed": args.seed}})
    return SimConfig.from_mapping(mapping)


def _out_dir(args: argparse.Namespace, cfg: Optional[SimConfig] = None) -> Path:
    if args.out:
        return Path(args.out)
    return cfg.output_dir if cfg is not None else Path("reports")


def _dump_yaml(path: Path, data: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        yaml.safe_dump(data, fh, sort_keys=False)


# ---- commands --------------------------------------------------------------------

def cmd_sim(args: argparse.Namespace) -> int:
    cfg = _sim_config(args)
    trace = run_single(cfg)
    out = _out_dir(args, cfg)
    trace.write_csv(out / "trace.csv")
    _dump_yaml(out / "summary.yaml", trace.summary)
    print(yaml.safe_dump(trace.summary, sort_keys=False).rstrip())
    return EXIT_OK


def cmd_mc(args: argparse.Namespace) -> int:
    cfg = _sim_config(argparse.Namespace(config=args.config))
    summary = run_monte_carlo(cfg, n=args.n, base_seed=args.seed, workers=args.workers)
    out = _out_dir(args, cfg)
    _dump_yaml(out / "mc_summary.yaml", summary.as_dict())
    print(f"converged {summary.converged}/{summary.n}, entered D {summary.entered_D}/{summary.n}")
    for run in summary.failures:
        print(f"  seed {run.seed}: {run.error or run.terminal}")
    return EXIT_OK if summary.all_converged else EXIT_VIOLATION


def cmd_certify(args: argparse.Namespace) -> int:
    report = certify(args.gains)
    print(format_report(report))
    return EXIT_OK if report.passed else EXIT_CERTIFICATE


def cmd_monitor(args: argparse.Namespace) -> int:
    cfg = _sim_config(args)
    trace = SimTrace.read_csv(args.trace) if args.trace else run_single(cfg)
    real = cfg.realization()
    params = cfg.params_for(real)
    domain = cfg.domain_for(cfg.trajectory.build(), params)
    report = lyapunov_monitor(
        trace,
        cfg.gains,
        params,
        domain,
        rel_tol=cfg.monitor.rel_tol,
        noise_floor=cfg.monitor.noise_floor,
        transient=cfg.monitor.transient,
    )
    print("\n".join(report.lines()))
    if report.precheck_failed:
        return EXIT_CERTIFICATE
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_plot(args: argparse.Namespace) -> int:
    if args.trace:
        trace = SimTrace.read_csv(args.trace)
        out = _out_dir(args)
    else:
        cfg = _sim_config(args)
        trace = run_single(cfg)
        out = _out_dir(args, cfg)
    for path in emit_plots(trace, out):
        print(path)
    return EXIT_OK


def cmd_replay_ekf(args: argparse.Namespace) -> int:
    cfg = _sim_config(argparse.Namespace(config=args.config))
    log = read_replay_log(args.log)
    rows = replay_ekf(log, cfg.ekf, predict_hz=args.predict_hz or cfg.rates.predict_hz)
    out = Path(args.out) if args.out else cfg.output_dir / "estimates.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    data = np.array([[r.t, *r.p, *r.v, *r.q, r.trace_P] for r in rows]).reshape(-1, 12)
    header = "t,px,py,pz,vx,vy,vz,q1,q2,q3,q4,trace_P"
    np.savetxt(out, data, fmt="%.17g", delimiter=",", header=header, comments="")
    print(f"{len(rows)} estimates written to {out} ({log.dropped} log lines dropped)")
    return EXIT_OK


# ---- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="su2track", description="SU(2) quadrotor tracking: simulate, certify, monitor.")
    parser.add_argument("--log-level", default="INFO", help="root log level (default INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=None, help="YAML file merged over config/defaults.yaml")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="sample a random realization with this seed")
        p.add_argument("--fixture", choices=["paper"], default=None, help="start from the printed initial condition")

    p = sub.add_parser("sim", help="run one closed-loop simulation")
    _common(p)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("mc", help="Monte-Carlo sweep over random realizations")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--n", type=int, default=None, help="number of runs")
    p.add_argument("--seed", type=int, default=None, help="base seed; run i uses seed + i")
    p.add_argument("--workers", type=int, default=None, help="process count (1 runs inline)")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("certify", help="check a gains file against the stability conditions")
    p.add_argument("gains", nargs="?", default=str(config_path("gains.yaml")))
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("monitor", help="check a trace against the Lyapunov bounds")
    _common(p)
    p.add_argument("--trace", default=None, help="trace CSV; simulated from the config when omitted")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("plot", help="write SVG panels for a trace")
    _common(p)
    p.add_argument("--trace", default=None, help="trace CSV; simulated from the config when omitted")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("replay-ekf", help="run the estimator over a replay log")
    p.add_argument("log", help="replay log (IMU / POSE / INIT records)")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--out", default=None, help="estimates CSV")
    p.add_argument("--predict-hz", type=float, default=None)
    p.set_defaults(func=cmd_replay_ekf)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level.upper())
    setup_exception_hook()
    return run_guarded(args.func, args)


if __name__ == "__main__":
    sys.exit(main())
