"""Line-oriented replay logs for the estimator.

Records, whitespace separated, one per line:

    IMU  t ax ay az gx gy gz
    POSE t px py pz sx sy sz
    INIT t px py pz vx vy vz q1 q2 q3 q4     (optional, first record)

Blank lines and ``#`` comments are ignored. Malformed lines are dropped with
a warning; a record older than the previous record of its stream is rejected.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from su2track.dynamics.state import RigidBodyState
from su2track.errors import EmptyGyroBuffer, ParseError
from su2track.estimator.mekf import EkfConfig, MultiplicativeEkf
from su2track.lie import Su2Element
from su2track.lib.timeutils import period_s
from su2track.providers.measurement import ImuSample, PoseMeasurement

logger = logging.getLogger(__name__)

Record = Union[ImuSample, PoseMeasurement]
_FIELDS = {"IMU": 7, "POSE": 7, "INIT": 11}


@dataclass
class ReplayLog:
    records: list[Record] = field(default_factory=list)
    init: Optional[RigidBodyState] = None
    t0: float = 0.0
    dropped: int = 0


@dataclass(frozen=True, eq=False)
class EstimateRow:
    t: float
    p: np.ndarray
    v: np.ndarray
    q: np.ndarray
    trace_P: float


def _floats(parts: Sequence[str], expected: int) -> list[float]:
    if len(parts) != expected:
        raise ValueError(f"expected {expected} fields, got {len(parts)}")
    values = [float(x) for x in parts]
    if not all(math.isfinite(x) for x in values):
        raise ValueError("non-finite value")
    return values


def parse_replay_log(lines: Iterable[str]) -> ReplayLog:
    log = ReplayLog()
    last_t: dict[str, float] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, *rest = line.split()
        kind = kind.upper()
        try:
            if kind not in _FIELDS:
                raise ValueError(f"unknown record type {kind!r}")
            values = _floats(rest, _FIELDS[kind])
            t = values[0]
            if kind == "INIT":
                if log.init is not None or log.records:
                    raise ValueError("INIT must be the first record")
                X = Su2Element.from_quaternion(values[7:11], normalize=True)
                log.init = RigidBodyState(values[1:4], values[4:7], X, np.zeros(3))
                log.t0 = t
                continue
            if kind in last_t and t < last_t[kind]:
                logger.warning("Line %d: out-of-order %s record at t=%.6f rejected", lineno, kind, t)
                log.dropped += 1
                continue
            if kind == "IMU":
                record: Record = ImuSample(values[1:4], values[4:7], t)
            else:
                record = PoseMeasurement(values[1:4], values[4:7], t)
        except ValueError as exc:
            logger.warning("Dropping line %d: %s", lineno, exc)
            log.dropped += 1
            continue
        last_t[kind] = t
        log.records.append(record)
    return log


def read_replay_log(path: str | Path) -> ReplayLog:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Replay log not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        return parse_replay_log(fh)


def _fmt(values: Iterable[float]) -> str:
    return " ".join(f"{x:.17g}" for x in values)


def write_replay_log(path: str | Path, records: Iterable[Record], init: Optional[RigidBodyState] = None, t0: float = 0.0) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        if init is not None:
            fh.write(f"INIT {_fmt([t0, *init.p, *init.v, *init.X.q])}\n")
        for rec in records:
            if isinstance(rec, ImuSample):
                fh.write(f"IMU {_fmt([rec.timestamp, *rec.accel, *rec.gyro])}\n")
            else:
                fh.write(f"POSE {_fmt([rec.timestamp, *rec.position, *rec.noise_std])}\n")
            count += 1
    return count


def replay_ekf(log: ReplayLog, config: EkfConfig | None = None, predict_hz: float = 100.0) -> list[EstimateRow]:
    """Run the filter over ``log``; one row per prediction.

    Predictions fire on the first IMU sample at or after each tick of
    ``predict_hz``. Without an ``INIT`` record the filter starts level and at
    rest at the first pose fix.
    """

    config = config or EkfConfig()
    init = log.init
    t0 = log.t0
    if init is None:
        first_pose = next((r for r in log.records if isinstance(r, PoseMeasurement)), None)
        if first_pose is None:
            raise ParseError("replay log has neither an INIT record nor a POSE record")
        init = RigidBodyState(first_pose.position, np.zeros(3), Su2Element.identity(), np.zeros(3))
        t0 = first_pose.timestamp

    ekf = MultiplicativeEkf.from_state(init, config, t0)
    period = period_s(predict_hz)
    next_tick = t0 + period
    rows: list[EstimateRow] = []
    for rec in log.records:
        if isinstance(rec, ImuSample):
            if rec.timestamp <= t0:
                continue
            ekf.push_imu(rec)
            if rec.timestamp >= next_tick - 1e-9:
                try:
                    ekf.predict(rec.timestamp)
                except EmptyGyroBuffer:
                    continue
                while next_tick <= rec.timestamp + 1e-9:
                    next_tick += period
                est = ekf.externalize()
                rows.append(EstimateRow(ekf.t, est.p, est.v, est.X.q.copy(), float(np.trace(ekf.state.P))))
        else:
            ekf.update_pose(rec)
    logger.info("Replayed %d records into %d estimates (%d rejected)", len(log.records), len(rows), ekf.rejected)
    return rows


__all__ = [
    "ReplayLog",
    "EstimateRow",
    "parse_replay_log",
    "read_replay_log",
    "write_replay_log",
    "replay_ekf",
]
