"""SU(2) attitude representation stored as a unit quaternion.

``q = (q1, q2, q3, q4)`` with ``q1`` the scalar part embeds as

    X = [[q1 + i q4, -q3 + i q2],
         [q3 + i q2,  q1 - i q4]]

which equals ``q1 I + q2 L1 + q3 L2 + q4 L3`` for the su(2) basis produced by
:func:`hat_su2`. Group products therefore coincide with Hamilton products, and
``X`` and ``-X`` cover the same rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from su2track.errors import NotInAlgebra, NotUnit

ALGEBRA_TOL = 1e-9
UNIT_TOL = 1e-6
RENORMALIZE_EVERY = 64
_SMALL_ANGLE = 1e-6
_I2 = np.eye(2, dtype=complex)


def _sinc(x: float) -> float:
    if x < _SMALL_ANGLE:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def _hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a1, a2, a3, a4 = a
    b1, b2, b3, b4 = b
    return np.array(
        [
            a1 * b1 - a2 * b2 - a3 * b3 - a4 * b4,
            a1 * b2 + a2 * b1 + a3 * b4 - a4 * b3,
            a1 * b3 - a2 * b4 + a3 * b1 + a4 * b2,
            a1 * b4 + a2 * b3 - a3 * b2 + a4 * b1,
        ]
    )


@dataclass(frozen=True, eq=False, slots=True)
class Su2Element:
    q: np.ndarray
    compositions: int = 0

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=float).reshape(4)
        if not np.all(np.isfinite(q)):
            raise NotUnit(f"non-finite quaternion {q!r}")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    # ---- constructors --------------------------------------------------------

    @classmethod
    def identity(cls) -> "Su2Element":
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_quaternion(cls, q, *, normalize: bool = False) -> "Su2Element":
        q = np.asarray(q, dtype=float).reshape(4)
        norm = float(np.linalg.norm(q))
        if normalize:
            if norm == 0.0:
                raise NotUnit("cannot normalize a zero quaternion")
            return cls(q / norm)
        if abs(norm - 1.0) > UNIT_TOL:
            raise NotUnit(f"quaternion norm {norm:.9f} deviates from 1 by more than {UNIT_TOL:g}")
        return cls(q)

    # ---- views ---------------------------------------------------------------

    @property
    def matrix(self) -> np.ndarray:
        q1, q2, q3, q4 = self.q
        return np.array(
            [
                [complex(q1, q4), complex(-q3, q2)],
                [complex(q3, q2), complex(q1, -q4)],
            ]
        )

    @property
    def scalar(self) -> float:
        return float(self.q[0])

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.q[1:])

    def rotation(self) -> np.ndarray:
        return embed_su2_to_so3(self)

    def norm_error(self) -> float:
        return abs(float(np.linalg.norm(self.q)) - 1.0)

    # ---- algebra -------------------------------------------------------------

    def star(self) -> "Su2Element":
        """Conjugate transpose ``X*`` (the group inverse)."""

        q1, q2, q3, q4 = self.q
        return Su2Element(np.array([q1, -q2, -q3, -q4]), self.compositions)

    def normalized(self) -> "Su2Element":
        return Su2Element(self.q / np.linalg.norm(self.q))

    def __mul__(self, other: "Su2Element") -> "Su2Element":
        if not isinstance(other, Su2Element):
            return NotImplemented
        return compose(self, other)

    def __neg__(self) -> "Su2Element":
        return Su2Element(-self.q, self.compositions)

    def allclose(self, other: "Su2Element", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.q, other.q, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        q1, q2, q3, q4 = self.q
        return f"Su2Element(q=({q1:.6g}, {q2:.6g}, {q3:.6g}, {q4:.6g}))"


@dataclass(frozen=True)
class AxisAngle:
    u: np.ndarray
    theta: float

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float).reshape(3)
        if abs(float(np.linalg.norm(u)) - 1.0) > 1e-12:
            raise ValueError(f"axis must be unit norm, got ||u|| = {np.linalg.norm(u)!r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "theta", float(self.theta))


def compose(a: Su2Element, b: Su2Element, *, renormalize: bool = True) -> Su2Element:
    """Group product ``a b``; re-normalized once per ``RENORMALIZE_EVERY`` products."""

    q = _hamilton(a.q, b.q)
    depth = max(a.compositions, b.compositions) + 1
    if renormalize and depth >= RENORMALIZE_EVERY:
        return Su2Element(q / np.linalg.norm(q), 0)
    return Su2Element(q, depth)


# ---- hat / vee ------------------------------------------------------------------

def hat_su2(w) -> np.ndarray:
    w1, w2, w3 = (float(c) for c in w)
    return np.array(
        [
            [complex(0.0, w3), complex(-w2, w1)],
            [complex(w2, w1), complex(0.0, -w3)],
        ]
    )


def vee_su2(K, tol: float = ALGEBRA_TOL) -> np.ndarray:
    K = np.asarray(K, dtype=complex)
    herm = float(np.linalg.norm(K + K.conj().T))
    trace = abs(complex(K[0, 0] + K[1, 1]))
    if herm > tol or trace > tol:
        raise NotInAlgebra(
            f"matrix is not in su(2) (||K + K^H|| = {herm:.3e}, |tr K| = {trace:.3e})"
        )
    return 0.5 * np.array(
        [
            (K[0, 1] + K[1, 0]).imag,
            (K[1, 0] - K[0, 1]).real,
            (K[0, 0] - K[1, 1]).imag,
        ]
    )


def project_su2_algebra(K) -> np.ndarray:
    """Anti-Hermitian traceless part of ``K``."""

    K = np.asarray(K, dtype=complex)
    A = 0.5 * (K - K.conj().T)
    return A - 0.5 * (A[0, 0] + A[1, 1]) * _I2


# ---- exponential / logarithm ------------------------------------------------------

def exp_su2(w) -> Su2Element:
    """``cos|w| I + sin|w| hat(w)/|w|``; ``exp_su2(w/2)`` covers ``exp_so3(w)``."""

    w = np.asarray(w, dtype=float)
    n = float(np.linalg.norm(w))
    s = _sinc(n)
    return Su2Element(np.array([math.cos(n), s * w[0], s * w[1], s * w[2]]))


def log_su2(X: Su2Element) -> np.ndarray:
    """Inverse of :func:`exp_su2` with ``|w|`` in ``[0, pi]``."""

    qv = X.vector
    n = float(np.linalg.norm(qv))
    angle = math.atan2(n, X.scalar)
    if n < _SMALL_ANGLE and X.scalar > 0.0:
        return qv * (1.0 + n * n / 6.0)
    if n == 0.0:
        # X = -I: any axis, pick e3
        return np.array([0.0, 0.0, math.pi])
    return (angle / n) * qv


def axis_angle(X: Su2Element) -> AxisAngle:
    """Rotation ``(u, theta)`` with ``X = cos(theta/2) I + sin(theta/2) hat(u)``, theta in [0, 2 pi]."""

    qv = X.vector
    n = float(np.linalg.norm(qv))
    theta = 2.0 * math.atan2(n, X.scalar)
    if n == 0.0:
        return AxisAngle(np.array([0.0, 0.0, 1.0]), theta)
    return AxisAngle(qv / n, theta)


# ---- embeddings -------------------------------------------------------------------

def embed_quat_to_su2(q) -> Su2Element:
    return Su2Element.from_quaternion(q)


def embed_su2_to_so3(X: Su2Element) -> np.ndarray:
    q1, q2, q3, q4 = X.q
    return np.array(
        [
            [q1 * q1 + q2 * q2 - q3 * q3 - q4 * q4, 2.0 * (q2 * q3 - q1 * q4), 2.0 * (q2 * q4 + q1 * q3)],
            [2.0 * (q2 * q3 + q1 * q4), q1 * q1 - q2 * q2 + q3 * q3 - q4 * q4, 2.0 * (q3 * q4 - q1 * q2)],
            [2.0 * (q2 * q4 - q1 * q3), 2.0 * (q3 * q4 + q1 * q2), q1 * q1 - q2 * q2 - q3 * q3 + q4 * q4],
        ]
    )


def su2_from_so3(R) -> Su2Element:
    """One of the two covering elements of ``R`` (the one with ``q1 >= 0``)."""

    R = np.asarray(R, dtype=float)
    tr = float(np.trace(R))
    d = np.diag(R)
    if tr > d.max():
        q1 = 0.5 * math.sqrt(1.0 + tr)
        k = 0.25 / q1
        q = [q1, (R[2, 1] - R[1, 2]) * k, (R[0, 2] - R[2, 0]) * k, (R[1, 0] - R[0, 1]) * k]
    elif d[0] >= d[1] and d[0] >= d[2]:
        q2 = 0.5 * math.sqrt(max(0.0, 1.0 + d[0] - d[1] - d[2]))
        k = 0.25 / q2
        q = [(R[2, 1] - R[1, 2]) * k, q2, (R[0, 1] + R[1, 0]) * k, (R[0, 2] + R[2, 0]) * k]
    elif d[1] >= d[2]:
        q3 = 0.5 * math.sqrt(max(0.0, 1.0 - d[0] + d[1] - d[2]))
        k = 0.25 / q3
        q = [(R[0, 2] - R[2, 0]) * k, (R[0, 1] + R[1, 0]) * k, q3, (R[1, 2] + R[2, 1]) * k]
    else:
        q4 = 0.5 * math.sqrt(max(0.0, 1.0 - d[0] - d[1] + d[2]))
        k = 0.25 / q4
        q = [(R[1, 0] - R[0, 1]) * k, (R[0, 2] + R[2, 0]) * k, (R[1, 2] + R[2, 1]) * k, q4]
    qa = np.array(q)
    if qa[0] < 0.0:
        qa = -qa
    return Su2Element(qa / np.linalg.norm(qa))


def rotate_via_su2(X: Su2Element, b) -> np.ndarray:
    """``[X hat(b) X*]^vee``, i.e. ``R(X) b``."""

    M = X.matrix
    return vee_su2(M @ hat_su2(b) @ M.conj().T)


# ---- distances --------------------------------------------------------------------

def dist_su2(X1: Su2Element, X2: Su2Element) -> float:
    """Gamma(X1, X2) = 0.5 Re trace(I - X1* X2) = 1 - cos(theta/2)."""

    M = X1.matrix.conj().T @ X2.matrix
    value = 0.5 * complex(2.0 - M[0, 0] - M[1, 1])
    if abs(value.imag) > ALGEBRA_TOL:
        raise NotUnit(f"Gamma has imaginary part {value.imag:.3e}; inputs are not in SU(2)")
    return value.real


def attitude_error_vector(Xe: Su2Element) -> np.ndarray:
    """``e_X = 0.5 [Xe - tr(Xe) I / 2]^vee = 0.5 sin(theta/2) u``."""

    M = Xe.matrix
    return 0.5 * vee_su2(M - 0.5 * (M[0, 0] + M[1, 1]) * _I2)


__all__ = [
    "Su2Element",
    "AxisAngle",
    "compose",
    "hat_su2",
    "vee_su2",
    "project_su2_algebra",
    "exp_su2",
    "log_su2",
    "axis_angle",
    "embed_quat_to_su2",
    "embed_su2_to_so3",
    "su2_from_so3",
    "rotate_via_su2",
    "dist_su2",
    "attitude_error_vector",
]
