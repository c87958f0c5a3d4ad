"""SO(3) primitives: hat/vee, Rodrigues exponential, logarithm and the Psi distance."""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import polar

from su2track.errors import NotSkew

SKEW_TOL = 1e-9
_SMALL_ANGLE = 1e-6
_NEAR_PI = 1e-3


def hat_so3(w) -> np.ndarray:
    """Return the skew matrix ``S(w)`` with ``S(a) @ b == np.cross(a, b)``."""

    x, y, z = (float(c) for c in w)
    return np.array(
        [
            [0.0, -z, y],
            [z, 0.0, -x],
            [-y, x, 0.0],
        ]
    )


def vee_so3(K, tol: float = SKEW_TOL) -> np.ndarray:
    K = np.asarray(K, dtype=float)
    asym = float(np.linalg.norm(K + K.T))
    if asym > tol:
        raise NotSkew(f"matrix is not skew-symmetric (||K + K^T|| = {asym:.3e})")
    return np.array([K[2, 1], K[0, 2], K[1, 0]])


def exp_so3(w) -> np.ndarray:
    """Rodrigues formula; Taylor coefficients below ``1e-6`` rad."""

    w = np.asarray(w, dtype=float)
    theta = float(np.linalg.norm(w))
    K = hat_so3(w)
    if theta < _SMALL_ANGLE:
        t2 = theta * theta
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
    else:
        a = math.sin(theta) / theta
        b = (1.0 - math.cos(theta)) / (theta * theta)
    return np.eye(3) + a * K + b * (K @ K)


def log_so3(R) -> np.ndarray:
    """Rotation vector ``theta * u`` with ``theta`` in ``[0, pi]``."""

    R = np.asarray(R, dtype=float)
    cos_t = min(1.0, max(-1.0, 0.5 * (float(np.trace(R)) - 1.0)))
    s = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    sin_t = float(np.linalg.norm(s))
    theta = math.atan2(sin_t, cos_t)

    if theta < _SMALL_ANGLE:
        return s * (1.0 + theta * theta / 6.0)

    if math.pi - theta < _NEAR_PI:
        # sin(theta) carries no axis information here; read it from the symmetric part
        B = (0.5 * (R + R.T) - cos_t * np.eye(3)) / (1.0 - cos_t)
        col = int(np.argmax(np.diag(B)))
        u = B[:, col] / math.sqrt(max(B[col, col], 1e-300))
        u = u / np.linalg.norm(u)
        if float(u @ s) < 0.0:
            u = -u
        return theta * u

    return (theta / sin_t) * s


def dist_so3(R1, R2) -> float:
    """Psi(R1, R2) = 0.5 * trace(I - R1^T R2), in ``[0, 2]``."""

    R1 = np.asarray(R1, dtype=float)
    R2 = np.asarray(R2, dtype=float)
    return 0.5 * (3.0 - float(np.trace(R1.T @ R2)))


def is_rotation(R, tol: float = 1e-9) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        return False
    ortho = float(np.linalg.norm(R.T @ R - np.eye(3)))
    return ortho <= tol and abs(float(np.linalg.det(R)) - 1.0) <= tol


def project_to_so3(M) -> np.ndarray:
    """Nearest rotation in the Frobenius sense (polar factor, det fixed to +1)."""

    M = np.asarray(M, dtype=float)
    U, _ = polar(M)
    if np.linalg.det(U) < 0.0:
        # reflect the weakest singular direction
        u, _, vt = np.linalg.svd(M)
        u[:, -1] = -u[:, -1]
        U = u @ vt
    return U


__all__ = [
    "SKEW_TOL",
    "hat_so3",
    "vee_so3",
    "exp_so3",
    "log_so3",
    "dist_so3",
    "is_rotation",
    "project_to_so3",
]
