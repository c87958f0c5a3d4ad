"""IMU sample accumulation between filter predictions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from su2track.errors import EmptyGyroBuffer
from su2track.providers.measurement import ImuSample


@dataclass
class ImuWindow:
    samples: list[ImuSample] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.samples)

    @property
    def t_first(self) -> float:
        return self.samples[0].timestamp

    @property
    def t_last(self) -> float:
        return self.samples[-1].timestamp

    @property
    def accel(self) -> np.ndarray:
        return np.mean([s.accel for s in self.samples], axis=0)

    @property
    def gyro(self) -> np.ndarray:
        return np.mean([s.gyro for s in self.samples], axis=0)


class ImuAccumulator:
    """Time-ordered IMU samples; ``flush`` hands the window over and starts a new one.

    Usage:
      acc = ImuAccumulator()
      acc.add(sample)
      window = acc.flush()   # every sample since the previous flush, oldest first

    Samples older than the last one added are dropped.
    """

    def __init__(self) -> None:
        self._window: Optional[ImuWindow] = None
        self._last_t: Optional[float] = None

    def __len__(self) -> int:
        return 0 if self._window is None else self._window.count

    def add(self, sample: ImuSample) -> bool:
        if self._last_t is not None and sample.timestamp < self._last_t:
            return False
        self._last_t = sample.timestamp
        if self._window is None:
            self._window = ImuWindow()
        self._window.samples.append(sample)
        return True

    def peek(self) -> Optional[ImuWindow]:
        return self._window

    def flush(self) -> ImuWindow:
        if self._window is None:
            raise EmptyGyroBuffer("no IMU samples since the last flush")
        out, self._window = self._window, None
        return out


__all__ = ["ImuWindow", "ImuAccumulator"]
