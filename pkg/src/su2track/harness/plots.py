"""SVG panels for a simulation trace."""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from su2track.errors import PlotError  # noqa: E402
from su2track.harness.trace import SimTrace  # noqa: E402

logger = logging.getLogger(__name__)

PANELS = (
    "forces",
    "torques",
    "position",
    "velocity",
    "attitude_distance",
    "lyapunov",
    "configuration_3d",
)
_AXES = ("x", "y", "z")


def _save(fig, path: Path) -> Path:
    try:
        fig.savefig(path, format="svg")
    except OSError as exc:
        raise PlotError(f"could not write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def _tracking_panel(trace: SimTrace, prefix: str, ref_prefix: str, unit: str):
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 6))
    t = trace.t
    actual, ref = trace.vec(prefix), trace.vec(ref_prefix)
    for i, ax in enumerate(axes):
        ax.plot(t, actual[:, i], label="actual")
        ax.plot(t, ref[:, i], "--", label="reference")
        ax.set_ylabel(f"{_AXES[i]} [{unit}]")
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper right")
    axes[-1].set_xlabel("t [s]")
    return fig


def _forces(trace: SimTrace):
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(trace.t, trace["f"], label="f")
    ax.plot(trace.t, trace.norms("fd"), "--", label="|f_d|")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("thrust [N]")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


def _torques(trace: SimTrace):
    fig, ax = plt.subplots(figsize=(7, 3.5))
    tau = trace.vec("tau")
    for i in range(3):
        ax.plot(trace.t, tau[:, i], label=f"tau_{_AXES[i]}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("torque [N m]")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


def _attitude_distance(trace: SimTrace):
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(trace.t, trace["gamma_d"], label="Gamma(X_d, X)")
    ax.plot(trace.t, trace["gamma_r"], "--", label="Gamma(X_r, X)")
    ax.plot(trace.t, trace["psi_r"], ":", label="Psi(R_r, R)")
    ax.set_xlabel("t [s]")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


def _lyapunov(trace: SimTrace):
    fig, ax = plt.subplots(figsize=(7, 3.5))
    tiny = np.finfo(float).tiny
    ax.plot(trace.t, np.maximum(trace["V"], tiny), label="V")
    ax.plot(trace.t, np.maximum(trace["lower"], tiny), "--", label="c1 |z|^2")
    ax.plot(trace.t, np.maximum(trace["upper"], tiny), "--", label="c2 |z|^2")
    ax.set_yscale("log", base=10)
    ax.set_xlabel("t [s]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


def _configuration(trace: SimTrace):
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    p, pr = trace.vec("p"), trace.vec("pr")
    ax.plot(p[:, 0], p[:, 1], p[:, 2], label="actual")
    ax.plot(pr[:, 0], pr[:, 1], pr[:, 2], "--", label="reference")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_zlabel("z [m]")
    ax.legend()
    return fig


def emit_plots(trace: SimTrace, out_dir: str | Path) -> list[Path]:
    """Write one SVG per entry of ``PANELS`` into ``out_dir``."""

    if len(trace) == 0:
        raise PlotError("trace has no samples to plot")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise PlotError(f"could not create {out}: {exc}") from exc

    builders = {
        "forces": lambda: _forces(trace),
        "torques": lambda: _torques(trace),
        "position": lambda: _tracking_panel(trace, "p", "pr", "m"),
        "velocity": lambda: _tracking_panel(trace, "v", "vr", "m/s"),
        "attitude_distance": lambda: _attitude_distance(trace),
        "lyapunov": lambda: _lyapunov(trace),
        "configuration_3d": lambda: _configuration(trace),
    }
    written = [_save(builders[name](), out / f"{name}.svg") for name in PANELS]
    logger.info("📈 %d plots written to %s", len(written), out)
    return written


__all__ = ["PANELS", "emit_plots"]
