"""Exact SU(2)/SO(3) representations, maps and distances."""

from su2track.lie.so3 import (
    dist_so3,
    exp_so3,
    hat_so3,
    is_rotation,
    log_so3,
    project_to_so3,
    vee_so3,
)
from su2track.lie.su2 import (
    AxisAngle,
    Su2Element,
    attitude_error_vector,
    axis_angle,
    compose,
    dist_su2,
    embed_quat_to_su2,
    embed_su2_to_so3,
    exp_su2,
    hat_su2,
    log_su2,
    project_su2_algebra,
    rotate_via_su2,
    su2_from_so3,
    vee_su2,
)

__all__ = [
    "AxisAngle",
    "Su2Element",
    "attitude_error_vector",
    "axis_angle",
    "compose",
    "dist_so3",
    "dist_su2",
    "embed_quat_to_su2",
    "embed_su2_to_so3",
    "exp_so3",
    "exp_su2",
    "hat_so3",
    "hat_su2",
    "is_rotation",
    "log_so3",
    "log_su2",
    "project_su2_algebra",
    "project_to_so3",
    "rotate_via_su2",
    "su2_from_so3",
    "vee_so3",
    "vee_su2",
]
