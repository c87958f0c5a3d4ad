"""Typed simulation configuration built from the merged YAML mapping."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from su2track.control.attitude import InertialParams
from su2track.control.certificate import bf_from_reference
from su2track.control.gains import DomainParams, GainSet
from su2track.control.tracking import AttitudeMode
from su2track.dynamics.flatness import FlatTrajectory
from su2track.dynamics.references import (
    CircleReference,
    SampledFlatReference,
    SplineReference,
    hover_reference,
)
from su2track.dynamics.sampling import FIXTURE_J, RealizationSample, paper_fixture, sample_realization
from su2track.errors import ConfigError
from su2track.estimator.mekf import EkfConfig
from su2track.lib.timeutils import num_steps, steps_per_tick, uniform_grid

logger = logging.getLogger(__name__)

TRAJECTORY_KINDS = ("hover", "circle", "spline", "samples")
REALIZATION_SOURCES = ("fixture", "seed", "reference")
_BF_GRID_DT = 0.01


def _section(cfg: Mapping[str, Any], name: str) -> Mapping[str, Any]:
    value = cfg.get(name) or {}
    if not isinstance(value, Mapping):
        raise ConfigError(f"'{name}' must be a mapping")
    return value


def _number(section: str, data: Mapping[str, Any], key: str, default: Any = None, *, positive: bool = False) -> Any:
    value = data.get(key, default)
    if value is None:
        return None
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{section}.{key}' must be a number, got {value!r}") from exc
    if positive and not out > 0.0:
        raise ConfigError(f"'{section}.{key}' must be positive, got {value!r}")
    return out


@dataclass(frozen=True)
class TrajectoryConfig:
    kind: str = "circle"
    heading: str = "velocity"
    construction: str = "tilt_yaw"
    options: Mapping[str, Any] = field(default_factory=dict)

    def build(self) -> FlatTrajectory:
        opts = self.options
        if self.kind == "hover":
            return hover_reference(opts.get("p", (0.0, 0.0, 0.0)), float(opts.get("psi", 0.0)))
        if self.kind == "circle":
            return CircleReference(
                float(opts.get("radius", 3.0)),
                float(opts.get("rate", 1.0)),
                float(opts.get("altitude", 0.0)),
            )
        if self.kind == "spline":
            return SplineReference(opts["waypoints"], float(opts.get("speed", 1.0)), opts.get("yaw", 0.0))
        return SampledFlatReference.from_csv(opts["path"])


@dataclass(frozen=True)
class RatesConfig:
    control_hz: Optional[float] = None
    predict_hz: float = 100.0
    pose_hz: float = 50.0
    imu_hz: float = 500.0

    def as_mapping(self) -> dict[str, Optional[float]]:
        return {"imu": self.imu_hz, "predict": self.predict_hz, "pose": self.pose_hz, "control": self.control_hz}


@dataclass(frozen=True)
class SensorNoise:
    accel_std: float = 0.0
    gyro_std: float = 0.0
    pose_std: float = 0.0


@dataclass(frozen=True)
class MonitorConfig:
    rel_tol: float = 0.05
    noise_floor: float = 1e-9
    transient: float = 0.0


@dataclass(frozen=True)
class MonteCarloConfig:
    n: int = 1000
    base_seed: int = 1
    workers: Optional[int] = None
    converge_tol: float = 1e-2


@dataclass(frozen=True, eq=False)
class SimConfig:
    trajectory: TrajectoryConfig
    gains: GainSet
    phi: float = 0.01
    B_p: float = 0.2
    B_f: Optional[float] = None  # None: derived from the reference
    phi_attract: float = 1.999
    m: float = 0.1
    g: float = 10.0
    J: Optional[np.ndarray] = None
    source: str = "fixture"
    seed: Optional[int] = None
    mode: AttitudeMode = AttitudeMode.CASE3
    zero_omega_d_dot: bool = False
    clamp_thrust: bool = False
    estimator: bool = False
    h: float = 1e-3
    horizon: float = 15.0
    record_dt: float = 0.01
    diverge_bound: float = 1e6
    rates: RatesConfig = field(default_factory=RatesConfig)
    ekf: EkfConfig = field(default_factory=EkfConfig)
    noise: SensorNoise = field(default_factory=SensorNoise)
    monitor: MonitorConfig = field(default_factory=MonitorConfig)
    monte_carlo: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    output_dir: Path = Path("reports")

    # ---- construction ------------------------------------------------------------

    @classmethod
    def from_mapping(cls, cfg: Mapping[str, Any]) -> "SimConfig":
        """Validate the merged configuration; raises ``ConfigError`` naming the key."""

        traj = _section(cfg, "trajectory")
        kind = str(traj.get("kind", "circle"))
        if kind not in TRAJECTORY_KINDS:
            raise ConfigError(f"'trajectory.kind' must be one of {TRAJECTORY_KINDS}, got {kind!r}")
        heading = str(traj.get("heading", "velocity"))
        if heading not in ("yaw", "velocity"):
            raise ConfigError(f"'trajectory.heading' must be 'yaw' or 'velocity', got {heading!r}")
        if kind == "hover" and heading == "velocity":
            raise ConfigError("'trajectory.heading' must be 'yaw' for a hover reference")
        construction = str(traj.get("construction", "tilt_yaw"))
        if construction not in ("tilt_yaw", "projection"):
            raise ConfigError(f"'trajectory.construction' must be 'tilt_yaw' or 'projection', got {construction!r}")
        options = dict(traj.get(kind) or {})
        if kind == "spline" and "waypoints" not in options:
            raise ConfigError("'trajectory.spline.waypoints' is required")
        if kind == "samples":
            path = options.get("path")
            if not path or not Path(path).exists():
                raise ConfigError(f"'trajectory.samples.path' does not exist: {path!r}")
        trajectory = TrajectoryConfig(kind, heading, construction, options)

        try:
            gains = GainSet.from_mapping(_section(cfg, "gains"))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"'gains': {exc}") from exc

        domain = _section(cfg, "domain")
        B_f = domain.get("B_f", "auto")
        B_f = None if B_f in (None, "auto") else _number("domain", domain, "B_f", positive=True)

        params = _section(cfg, "params")
        J = params.get("J")
        if J is not None:
            J = np.asarray(J, dtype=float)
            if J.shape != (3, 3):
                raise ConfigError("'params.J' must be a 3x3 matrix")

        real = _section(cfg, "realization")
        source = str(real.get("source", "fixture"))
        if source not in REALIZATION_SOURCES:
            raise ConfigError(f"'realization.source' must be one of {REALIZATION_SOURCES}, got {source!r}")
        seed = real.get("seed")
        if source == "seed" and seed is None:
            raise ConfigError("'realization.seed' is required when source is 'seed'")

        sim = _section(cfg, "sim")
        try:
            mode = AttitudeMode(str(sim.get("mode", "case3")))
        except ValueError as exc:
            raise ConfigError(f"'sim.mode' must be case1, case2 or case3, got {sim.get('mode')!r}") from exc

        rates_raw = _section(cfg, "rates")
        rates = RatesConfig(
            control_hz=_number("rates", rates_raw, "control_hz", None, positive=True),
            predict_hz=_number("rates", rates_raw, "predict_hz", 100.0, positive=True),
            pose_hz=_number("rates", rates_raw, "pose_hz", 50.0, positive=True),
            imu_hz=_number("rates", rates_raw, "imu_hz", 500.0, positive=True),
        )

        est = dict(_section(cfg, "estimator"))
        noise_raw = est.pop("noise", None) or {}
        try:
            ekf = EkfConfig.from_mapping(est)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"'estimator': {exc}") from exc
        noise = SensorNoise(
            accel_std=_number("estimator.noise", noise_raw, "accel_std", 0.0),
            gyro_std=_number("estimator.noise", noise_raw, "gyro_std", 0.0),
            pose_std=_number("estimator.noise", noise_raw, "pose_std", 0.0),
        )

        mon = _section(cfg, "monitor")
        monitor = MonitorConfig(
            rel_tol=_number("monitor", mon, "rel_tol", 0.05),
            noise_floor=_number("monitor", mon, "noise_floor", 1e-9),
            transient=_number("monitor", mon, "transient", 0.0),
        )
        mc = _section(cfg, "monte_carlo")
        workers = mc.get("workers")
        monte_carlo = MonteCarloConfig(
            n=int(mc.get("n", 1000)),
            base_seed=int(mc.get("base_seed", 1)),
            workers=None if workers is None else int(workers),
            converge_tol=_number("monte_carlo", mc, "converge_tol", 1e-2, positive=True),
        )
        if monte_carlo.n < 1:
            raise ConfigError("'monte_carlo.n' must be at least 1")

        out = _section(cfg, "output")
        config = cls(
            trajectory=trajectory,
            gains=gains,
            phi=_number("domain", domain, "phi", 0.01, positive=True),
            B_p=_number("domain", domain, "B_p", 0.2, positive=True),
            B_f=B_f,
            phi_attract=_number("domain", domain, "phi_attract", 1.999, positive=True),
            m=_number("params", params, "m", 0.1, positive=True),
            g=_number("params", params, "g", 10.0, positive=True),
            J=J,
            source=source,
            seed=None if seed is None else int(seed),
            mode=mode,
            zero_omega_d_dot=bool(sim.get("zero_omega_d_dot", False)),
            clamp_thrust=bool(sim.get("clamp_thrust", False)),
            estimator=bool(sim.get("estimator", False)),
            h=_number("sim", sim, "h", 1e-3, positive=True),
            horizon=_number("sim", sim, "horizon", 15.0, positive=True),
            record_dt=_number("sim", sim, "record_dt", 0.01, positive=True),
            diverge_bound=_number("sim", sim, "diverge_bound", 1e6, positive=True),
            rates=rates,
            ekf=ekf,
            noise=noise,
            monitor=monitor,
            monte_carlo=monte_carlo,
            output_dir=Path(out.get("dir", "reports")),
        )
        try:
            DomainParams(config.phi, config.B_f or 1.0, config.B_p, config.phi_attract)
        except ValueError as exc:
            raise ConfigError(f"'domain': {exc}") from exc
        config._check_steps()
        return config

    def _check_steps(self) -> None:
        try:
            _ = (self.record_every, self.control_every)
            if self.estimator:
                for name, rate in self.rates.as_mapping().items():
                    if rate is not None:
                        steps_per_tick(rate, self.h)
        except ValueError as exc:
            raise ConfigError(f"rates: {exc}") from exc
        if self.estimator:
            r = self.rates
            if r.imu_hz < r.predict_hz:
                raise ConfigError("'rates.imu_hz' must be at least 'rates.predict_hz'")
            if r.control_hz is None or r.control_hz > r.imu_hz:
                raise ConfigError("'rates.control_hz' must be set and at most 'rates.imu_hz' with the estimator on")

    # ---- derived -----------------------------------------------------------------

    @property
    def n_steps(self) -> int:
        return num_steps(self.horizon, self.h)

    @property
    def record_every(self) -> int:
        return steps_per_tick(1.0 / self.record_dt, self.h)

    @property
    def control_every(self) -> int:
        rate = self.rates.control_hz
        return 1 if rate is None else steps_per_tick(rate, self.h)

    def with_seed(self, seed: int) -> "SimConfig":
        return replace(self, source="seed", seed=int(seed))

    def with_overrides(self, **changes: Any) -> "SimConfig":
        return replace(self, **changes)

    def realization(self) -> RealizationSample:
        if self.source == "seed":
            real = sample_realization(int(self.seed))  # type: ignore[arg-type]
        elif self.source == "fixture":
            real = paper_fixture()
        else:
            real = replace(paper_fixture(), J=FIXTURE_J.copy())
        if self.J is not None:
            real = replace(real, J=np.asarray(self.J, dtype=float))
        return real

    def params_for(self, real: RealizationSample) -> InertialParams:
        return real.params(self.m, self.g)

    def domain_for(self, trajectory: FlatTrajectory, params: InertialParams) -> DomainParams:
        B_f = self.B_f
        if B_f is None:
            grid = uniform_grid(self.horizon, _BF_GRID_DT)
            B_f = bf_from_reference((trajectory.sample(float(t)).a for t in grid), params)
            logger.debug("B_f derived from the reference: %.6g", B_f)
        return DomainParams(self.phi, B_f, self.B_p, self.phi_attract)


__all__ = [
    "TRAJECTORY_KINDS",
    "TrajectoryConfig",
    "RatesConfig",
    "SensorNoise",
    "MonitorConfig",
    "MonteCarloConfig",
    "SimConfig",
]
