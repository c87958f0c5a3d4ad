"""Seeded Monte-Carlo sweeps over random inertia and initial state."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import numpy as np

from su2track.harness.config import SimConfig
from su2track.harness.simulate import run_single

logger = logging.getLogger(__name__)

ERROR_NAMES = ("ep", "ev", "eX", "ew")


@dataclass(frozen=True)
class RunSummary:
    seed: int
    terminal: dict[str, float] = field(default_factory=dict)
    converged: bool = False
    entered_D: bool = False
    entered_D_at: Optional[float] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class MonteCarloSummary:
    n: int
    runs: tuple[RunSummary, ...]
    converge_tol: float

    @property
    def converged(self) -> int:
        return sum(r.converged for r in self.runs)

    @property
    def entered_D(self) -> int:
        return sum(r.entered_D for r in self.runs)

    @property
    def failures(self) -> list[RunSummary]:
        return [r for r in self.runs if r.error is not None or not r.converged]

    @property
    def all_converged(self) -> bool:
        return self.converged == self.n

    def quantiles(self, qs: tuple[float, ...] = (0.5, 0.95, 1.0)) -> dict[str, list[float]]:
        ok = [r for r in self.runs if r.error is None]
        if not ok:
            return {}
        return {
            name: [float(x) for x in np.quantile([r.terminal[name] for r in ok], qs)] for name in ERROR_NAMES
        }

    def as_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "converged": self.converged,
            "entered_D": self.entered_D,
            "converge_tol": self.converge_tol,
            "terminal_quantiles": self.quantiles(),
            "failures": [asdict(r) for r in self.failures],
            "runs": [asdict(r) for r in self.runs],
        }


def _run_one(cfg: SimConfig, seed: int) -> RunSummary:
    try:
        trace = run_single(cfg.with_seed(seed))
    except Exception as exc:
        logger.exception("❌ Run seed %d failed: %s", seed, exc)
        return RunSummary(seed=seed, error=f"{type(exc).__name__}: {exc}")
    terminal = trace.summary["terminal"]
    tol = cfg.monte_carlo.converge_tol
    entered = trace.summary["entered_D_at"]
    return RunSummary(
        seed=seed,
        terminal=terminal,
        converged=all(terminal[name] < tol for name in ERROR_NAMES),
        entered_D=entered is not None,
        entered_D_at=entered,
    )


def run_monte_carlo(
    cfg: SimConfig,
    n: Optional[int] = None,
    base_seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> MonteCarloSummary:
    """``n`` independent runs seeded ``base_seed + i``; results sorted by seed.

    ``workers=1`` runs inline; otherwise a process pool is used. A failing run
    is logged and recorded without stopping the sweep.
    """

    mc = cfg.monte_carlo
    n = mc.n if n is None else int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    base_seed = mc.base_seed if base_seed is None else int(base_seed)
    workers = mc.workers if workers is None else workers
    seeds = [base_seed + i for i in range(n)]

    logger.info("🚀 Monte-Carlo sweep: %d runs from seed %d", n, base_seed)
    if workers == 1 or n == 1:
        results = [_run_one(cfg, s) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, [cfg] * n, seeds))

    summary = MonteCarloSummary(n=n, runs=tuple(sorted(results, key=lambda r: r.seed)), converge_tol=mc.converge_tol)
    logger.info(
        "✅ Monte-Carlo done: %d/%d converged, %d entered D, %d failures",
        summary.converged,
        n,
        summary.entered_D,
        len(summary.failures),
    )
    return summary


__all__ = ["RunSummary", "MonteCarloSummary", "run_monte_carlo"]
