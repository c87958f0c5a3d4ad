"""Fixed-step multi-rate job table for the closed-loop simulation.

Every job runs on integer multiples of the integrator step. Jobs due on the
same step run in table order: sensing first, then prediction, then the pose
fix, then control, so the controller always sees the freshest estimate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional

from su2track.lib.timeutils import is_tick, steps_per_tick

logger = logging.getLogger(__name__)

JOB_ORDER = ("imu", "predict", "pose", "control")


@dataclass
class RateJob:
    name: str
    rate_hz: Optional[float]  # None: every integrator step
    enabled: bool = True
    every: int = 1
    runs: int = 0
    last_step: Optional[int] = None

    def bind(self, h: float) -> None:
        self.every = 1 if self.rate_hz is None else steps_per_tick(self.rate_hz, h)


def _due(job: RateJob, step: int) -> bool:
    return job.enabled and is_tick(step, job.every)


@dataclass(frozen=True)
class Event:
    step: int
    t: float
    job: str


@dataclass
class MultiRateScheduler:
    """Step-indexed job table with an optional event log.

    Usage:
      sched = MultiRateScheduler.from_rates(h=1e-3, rates={"imu": 500, "predict": 100, "pose": 50, "control": 500})
      for name in sched.due(step):
          ...
    """

    h: float
    jobs: Dict[str, RateJob] = field(default_factory=dict)
    record: bool = False
    events: list[Event] = field(default_factory=list)

    @classmethod
    def from_rates(
        cls,
        h: float,
        rates: Mapping[str, Optional[float]],
        *,
        enabled: Iterable[str] | None = None,
        record: bool = False,
    ) -> "MultiRateScheduler":
        active = set(rates) if enabled is None else set(enabled)
        jobs: Dict[str, RateJob] = {}
        for name in JOB_ORDER:
            if name not in rates:
                continue
            job = RateJob(name=name, rate_hz=rates[name], enabled=name in active)
            job.bind(h)
            jobs[name] = job
        unknown = set(rates) - set(JOB_ORDER)
        if unknown:
            raise ValueError(f"unknown scheduler jobs: {sorted(unknown)}")
        sched = cls(h=float(h), jobs=jobs, record=record)
        logger.debug(
            "Scheduler table: %s",
            ", ".join(f"{j.name}/{j.every}" for j in jobs.values() if j.enabled),
        )
        return sched

    def due(self, step: int) -> list[str]:
        names: list[str] = []
        for job in self.jobs.values():
            if not _due(job, step):
                continue
            job.runs += 1
            job.last_step = step
            names.append(job.name)
            if self.record:
                self.events.append(Event(step, step * self.h, job.name))
        return names

    def counts(self) -> dict[str, int]:
        return {name: job.runs for name, job in self.jobs.items()}


__all__ = ["JOB_ORDER", "RateJob", "Event", "MultiRateScheduler"]
