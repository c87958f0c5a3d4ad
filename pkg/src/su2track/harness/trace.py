"""Uniformly sampled simulation trace and its CSV form."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def _xyz(prefix: str) -> tuple[str, str, str]:
    return (f"{prefix}x", f"{prefix}y", f"{prefix}z")


def _quat(prefix: str) -> tuple[str, str, str, str]:
    return tuple(f"{prefix}{i}" for i in range(1, 5))  # type: ignore[return-value]


TRACE_COLUMNS: tuple[str, ...] = (
    "t",
    *_xyz("p"),
    *_xyz("v"),
    *_quat("q"),
    *_xyz("w"),
    *_xyz("pr"),
    *_xyz("vr"),
    *_quat("qr"),
    *_quat("qd"),
    "f",
    *_xyz("tau"),
    *_xyz("fd"),
    *_xyz("ep"),
    *_xyz("ev"),
    *_xyz("eX"),
    *_xyz("ew"),
    "gamma_d",
    "gamma_r",
    "psi_r",
    "V",
    "V_p",
    "V_a",
    "lower",
    "upper",
    "in_D",
    "in_attract",
    "held",
    "neg_thrust",
    "est_pos_err",
    "est_gamma",
)


@dataclass(eq=False)
class SimTrace:
    """Rows sampled every ``record_dt``; one column per ``TRACE_COLUMNS`` entry.

    Boolean flags are stored as 0.0 / 1.0.
    """

    data: np.ndarray
    columns: tuple[str, ...] = TRACE_COLUMNS
    summary: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(self.columns))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], summary: dict[str, Any] | None = None) -> "SimTrace":
        data = np.array(rows, dtype=float) if rows else np.empty((0, len(TRACE_COLUMNS)))
        return cls(data, TRACE_COLUMNS, dict(summary or {}))

    def __len__(self) -> int:
        return int(self.data.shape[0])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def vec(self, prefix: str) -> np.ndarray:
        """``(N, 3)`` block ``<prefix>x, <prefix>y, <prefix>z``."""

        return np.column_stack([self[c] for c in _xyz(prefix)])

    def quat(self, prefix: str) -> np.ndarray:
        return np.column_stack([self[c] for c in _quat(prefix)])

    @property
    def t(self) -> np.ndarray:
        return self["t"]

    def norms(self, prefix: str) -> np.ndarray:
        return np.linalg.norm(self.vec(prefix), axis=1)

    def terminal_errors(self) -> dict[str, float]:
        if not len(self):
            return {}
        return {name: float(self.norms(name)[-1]) for name in ("ep", "ev", "eX", "ew")}

    def copy(self) -> "SimTrace":
        return SimTrace(self.data.copy(), self.columns, dict(self.summary))

    # ---- files -----------------------------------------------------------------

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, self.data, fmt="%.17g", delimiter=",", header=",".join(self.columns), comments="")
        logger.info("📝 Trace written: %s (%d rows)", path, len(self))
        return path

    @classmethod
    def read_csv(cls, path: str | Path) -> "SimTrace":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Trace not found: {path}")
        with path.open("r", encoding="utf-8") as fh:
            header = fh.readline().strip()
        columns = tuple(header.split(","))
        missing = [c for c in TRACE_COLUMNS if c not in columns]
        if missing:
            raise ValueError(f"{path}: missing trace columns {missing}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.size == 0:
            data = np.empty((0, len(columns)))
        return cls(data, columns)


__all__ = ["TRACE_COLUMNS", "SimTrace"]
