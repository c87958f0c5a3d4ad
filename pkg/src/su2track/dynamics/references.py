"""Flat-output trajectories: hover, circle, linear splines and sampled CSV data."""

from __future__ import annotations

import bisect
import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from su2track.dynamics.flatness import FlatSample
from su2track.errors import DegenerateSegment, ParseError
from su2track.lib.validators import ensure_monotone, require_positive

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HoverReference:
    p: np.ndarray
    psi: float = 0.0
    duration: Optional[float] = None

    def sample(self, t: float) -> FlatSample:
        return FlatSample(t=t, p=np.asarray(self.p, dtype=float), psi=self.psi)


def hover_reference(p=(0.0, 0.0, 0.0), psi: float = 0.0) -> HoverReference:
    return HoverReference(np.asarray(p, dtype=float).reshape(3), float(psi))


@dataclass(frozen=True)
class CircleReference:
    """``p_r(t) = (R sin wt, R cos wt, z)``; the heading follows the velocity, ``psi = -wt``."""

    radius: float = 3.0
    rate: float = 1.0
    altitude: float = 0.0
    duration: Optional[float] = None

    def sample(self, t: float) -> FlatSample:
        r, w = self.radius, self.rate
        s, c = math.sin(w * t), math.cos(w * t)
        return FlatSample(
            t=t,
            p=np.array([r * s, r * c, self.altitude]),
            v=r * w * np.array([c, -s, 0.0]),
            a=-r * w**2 * np.array([s, c, 0.0]),
            j=-r * w**3 * np.array([c, -s, 0.0]),
            s=r * w**4 * np.array([s, c, 0.0]),
            psi=-w * t,
            psi_dot=-w,
        )


def circle_reference(t: float, radius: float = 3.0, rate: float = 1.0) -> FlatSample:
    return CircleReference(radius, rate).sample(t)


class SplineReference:
    """Piecewise-linear waypoint path flown at constant speed.

    Velocity jumps at the knots; after the last knot the path holds the final
    waypoint. ``yaw`` is a constant or one heading per waypoint, interpolated
    linearly in time along each segment.
    """

    def __init__(self, waypoints: Sequence[Sequence[float]], speed: float, yaw: float | Sequence[float] = 0.0):
        pts = np.asarray(waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
            raise DegenerateSegment("a spline needs at least two 3-D waypoints")
        self.speed = require_positive("speed", speed)
        deltas = np.diff(pts, axis=0)
        lengths = np.linalg.norm(deltas, axis=1)
        bad = np.flatnonzero(lengths < 1e-12)
        if bad.size:
            raise DegenerateSegment(f"waypoint {int(bad[0]) + 1} repeats waypoint {int(bad[0])}")

        if np.isscalar(yaw):
            yaws = np.full(len(pts), float(yaw))
        else:
            yaws = np.asarray(yaw, dtype=float).reshape(-1)
            if len(yaws) != len(pts):
                raise ValueError(f"expected {len(pts)} yaw values, got {len(yaws)}")

        self.waypoints = pts
        self.yaws = yaws
        self.durations = lengths / self.speed
        self.velocities = deltas / self.durations[:, None]
        self.knots = np.concatenate([[0.0], np.cumsum(self.durations)])
        self.duration: Optional[float] = float(self.knots[-1])

    def segment(self, t: float) -> int:
        """Index of the segment active at ``t``; a knot belongs to the segment it starts."""

        return min(bisect.bisect_right(self.knots.tolist(), t) - 1, len(self.durations) - 1)

    def sample(self, t: float) -> FlatSample:
        if t >= self.knots[-1]:
            return FlatSample(t=t, p=self.waypoints[-1], psi=float(self.yaws[-1]))
        i = max(self.segment(t), 0)
        tau = max(t - self.knots[i], 0.0)
        yaw_rate = (self.yaws[i + 1] - self.yaws[i]) / self.durations[i]
        return FlatSample(
            t=t,
            p=self.waypoints[i] + self.velocities[i] * tau,
            v=self.velocities[i],
            psi=float(self.yaws[i] + yaw_rate * tau),
            psi_dot=float(yaw_rate),
        )


def spline_reference(waypoints, speed: float = 1.0, yaw: float | Sequence[float] = 0.0) -> SplineReference:
    return SplineReference(waypoints, speed, yaw)


_SAMPLED_COLUMNS = (
    ("p", ("px", "py", "pz")),
    ("v", ("vx", "vy", "vz")),
    ("a", ("ax", "ay", "az")),
    ("j", ("jx", "jy", "jz")),
    ("s", ("sx", "sy", "sz")),
)


class SampledFlatReference:
    """Custom flat samples, linearly interpolated in time.

    Columns: ``t, px, py, pz`` required; ``vx..sz`` and ``psi, psi_dot,
    psi_ddot`` optional (zero when absent). Outside the sampled span the end
    values are held.
    """

    def __init__(self, t: Sequence[float], columns: dict[str, np.ndarray]):
        self.t = np.asarray(t, dtype=float)
        if self.t.size < 2:
            raise ParseError("sampled reference needs at least two rows")
        ensure_monotone(self.t.tolist(), strict=True)
        self.columns = {key: np.asarray(val, dtype=float) for key, val in columns.items()}
        self.duration: Optional[float] = float(self.t[-1] - self.t[0])

    @classmethod
    def from_csv(cls, path: str | Path) -> "SampledFlatReference":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Reference file not found: {path}")
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            fields = set(reader.fieldnames or ())
            missing = {"t", "px", "py", "pz"} - fields
            if missing:
                raise ParseError(f"{path}: missing columns {sorted(missing)}")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                try:
                    rows.append({key: float(val) for key, val in row.items() if key})
                except (TypeError, ValueError) as exc:
                    raise ParseError(f"{path}:{lineno}: {exc}") from exc
        t = [row["t"] for row in rows]
        columns = {key: np.array([row.get(key, 0.0) for row in rows]) for key in fields if key != "t"}
        logger.info("Loaded %d reference samples from %s", len(rows), path)
        return cls(t, columns)

    def _col(self, name: str, t: float) -> float:
        data = self.columns.get(name)
        if data is None:
            return 0.0
        return float(np.interp(t, self.t, data))

    def sample(self, t: float) -> FlatSample:
        t_abs = self.t[0] + t
        kwargs = {
            attr: np.array([self._col(name, t_abs) for name in names]) for attr, names in _SAMPLED_COLUMNS
        }
        return FlatSample(
            t=t,
            psi=self._col("psi", t_abs),
            psi_dot=self._col("psi_dot", t_abs),
            psi_ddot=self._col("psi_ddot", t_abs),
            **kwargs,
        )


__all__ = [
    "HoverReference",
    "hover_reference",
    "CircleReference",
    "circle_reference",
    "SplineReference",
    "spline_reference",
    "SampledFlatReference",
]
