"""Random realizations of inertia and initial state, and the printed fixture."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from scipy.spatial.transform import Rotation

from su2track.control.attitude import InertialParams
from su2track.dynamics.state import RigidBodyState
from su2track.lie import Su2Element, project_to_so3, su2_from_so3

logger = logging.getLogger(__name__)

J_EIG_MIN = 0.05
J_EIG_MAX = 0.1
P0_MEAN = np.array([0.0, 0.0, -2.0])
RATE_VAR = 5.0

# initial condition and inertia printed to two decimals
FIXTURE_R0 = np.array(
    [
        [0.51, -0.05, -0.86],
        [-0.78, 0.41, -0.48],
        [0.37, 0.91, 0.17],
    ]
)
FIXTURE_J = np.array(
    [
        [0.08, 0.01, 0.02],
        [0.01, 0.07, 0.01],
        [0.02, 0.01, 0.07],
    ]
)
FIXTURE_P0 = np.array([0.08, -0.16, -1.63])
FIXTURE_V0 = np.array([-0.59, 0.76, -0.95])
FIXTURE_W0 = np.array([-1.81, 1.80, 2.81])


@dataclass(frozen=True, eq=False)
class RealizationSample:
    J: np.ndarray
    state: RigidBodyState
    seed: Optional[int]
    metadata: dict[str, Any] = field(default_factory=dict)

    def params(self, m: float = 0.1, g: float = 10.0) -> InertialParams:
        return InertialParams(m, g, self.J)


def sample_inertia(rng: np.random.Generator) -> np.ndarray:
    """``Q^T D Q`` with ``Q`` uniform on SO(3) and ``D = diag(0.05, u, 0.1)``."""

    Q = Rotation.random(random_state=rng).as_matrix()
    D = np.diag([J_EIG_MIN, rng.uniform(J_EIG_MIN, J_EIG_MAX), J_EIG_MAX])
    J = Q.T @ D @ Q
    return 0.5 * (J + J.T)


def sample_attitude(rng: np.random.Generator) -> Su2Element:
    """Uniform on SU(2): a normalized standard Gaussian 4-vector."""

    return Su2Element.from_quaternion(rng.standard_normal(4), normalize=True)


def sample_realization(rng_seed: int) -> RealizationSample:
    rng = np.random.default_rng(rng_seed)
    J = sample_inertia(rng)
    X0 = sample_attitude(rng)
    p0 = rng.multivariate_normal(P0_MEAN, np.eye(3))
    v0 = rng.multivariate_normal(np.zeros(3), RATE_VAR * np.eye(3))
    w0 = rng.multivariate_normal(np.zeros(3), RATE_VAR * np.eye(3))
    return RealizationSample(J=J, state=RigidBodyState(p0, v0, X0, w0), seed=int(rng_seed))


def paper_fixture() -> RealizationSample:
    """Printed initial condition with ``R(t0)`` projected to the nearest rotation."""

    R0 = project_to_so3(FIXTURE_R0)
    adjustment = float(np.linalg.norm(R0 - FIXTURE_R0))
    logger.debug("Fixture R(t0) projected onto SO(3); Frobenius adjustment %.3e", adjustment)
    state = RigidBodyState(FIXTURE_P0.copy(), FIXTURE_V0.copy(), su2_from_so3(R0), FIXTURE_W0.copy())
    return RealizationSample(
        J=FIXTURE_J.copy(),
        state=state,
        seed=None,
        metadata={
            "R0_printed": FIXTURE_R0.tolist(),
            "R0_projected": R0.tolist(),
            "R0_adjustment_fro": adjustment,
        },
    )


__all__ = [
    "RealizationSample",
    "sample_inertia",
    "sample_attitude",
    "sample_realization",
    "paper_fixture",
    "J_EIG_MIN",
    "J_EIG_MAX",
]
