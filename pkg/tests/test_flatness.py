import math

import numpy as np
import pytest

from su2track.control.attitude import InertialParams
from su2track.dynamics.flatness import FlatSample, ReferenceExpander, flat_to_reference
from su2track.dynamics.integrator import rk4_step
from su2track.dynamics.references import (
    CircleReference,
    SampledFlatReference,
    hover_reference,
    spline_reference,
)
from su2track.dynamics.state import ControlInput, RigidBodyState
from su2track.errors import DegenerateHeading, DegenerateSegment, DegenerateThrust, ParseError
from su2track.lie import dist_su2, embed_su2_to_so3


def _params():
    return InertialParams(0.1, 10.0, np.diag([0.05, 0.06, 0.1]))


def test_circle_thrust_magnitude():
    params = _params()
    for t in (0.0, 0.7, 2.5):
        ref = flat_to_reference(CircleReference().sample(t), params)
        assert ref.f_r == pytest.approx(0.1 * math.sqrt(109.0))


def test_circle_thrust_axis_and_heading():
    params = _params()
    flat = CircleReference().sample(1.3)
    ref = flat_to_reference(flat, params, heading="velocity")
    R = embed_su2_to_so3(ref.X_r)
    u = params.m * (flat.a + params.g * np.array([0.0, 0.0, 1.0]))
    assert np.allclose(R[:, 2], u / np.linalg.norm(u), atol=1e-12)
    assert ref.psi == pytest.approx(math.atan2(flat.v[1], flat.v[0]))


@pytest.mark.parametrize("construction", ["tilt_yaw", "projection"])
def test_reference_inputs_reproduce_the_circle(construction):
    params = _params()
    circle = CircleReference()
    expander = ReferenceExpander(circle, params, construction=construction)
    h = 1e-3
    ref0 = expander.at(0.0)
    s = RigidBodyState(ref0.p, ref0.v, ref0.X_r, ref0.omega_r)

    def feedforward(t):
        ref = expander.peek(t)
        return ControlInput(ref.f_r, ref.tau_r)

    for k in range(500):
        s = rk4_step(s, feedforward, params, h, k * h)
    end = expander.at(500 * h)
    assert np.linalg.norm(s.p - end.p) < 1e-6
    assert np.linalg.norm(s.v - end.v) < 1e-6
    assert dist_su2(end.X_r, s.X) < 1e-9
    assert np.linalg.norm(s.omega - end.omega_r) < 1e-6


def test_free_fall_is_degenerate():
    flat = FlatSample(t=0.0, p=np.zeros(3), a=np.array([0.0, 0.0, -10.0]))
    with pytest.raises(DegenerateThrust):
        flat_to_reference(flat, _params())


def test_velocity_heading_needs_motion():
    flat = hover_reference().sample(0.0)
    with pytest.raises(DegenerateHeading):
        flat_to_reference(flat, _params(), heading="velocity")


def test_hover_reference_is_level():
    ref = flat_to_reference(hover_reference([1.0, 2.0, 3.0], psi=0.4).sample(5.0), _params())
    assert ref.f_r == pytest.approx(1.0)
    assert np.allclose(ref.omega_r, 0.0)
    assert np.allclose(embed_su2_to_so3(ref.X_r)[:, 2], [0.0, 0.0, 1.0])


def test_expander_keeps_cover_continuous():
    params = _params()
    expander = ReferenceExpander(CircleReference(rate=2.0), params)
    prev = expander.at(0.0).X_r
    for k in range(1, 200):
        X = expander.at(0.05 * k).X_r
        assert dist_su2(prev, X) < 0.5
        prev = X


def test_spline_corner_velocity_jump():
    speed = 1.5
    spline = spline_reference([[0, 0, 0], [1, 0, 0], [1, 1, 0]], speed=speed)
    corner = spline.knots[1]
    before = spline.sample(corner - 1e-9).v
    after = spline.sample(corner).v
    assert np.linalg.norm(after - before) == pytest.approx(math.sqrt(2.0) * speed)
    assert spline.duration == pytest.approx(2.0 / speed)


def test_spline_holds_last_waypoint():
    spline = spline_reference([[0, 0, 0], [0, 0, 2]], speed=1.0, yaw=[0.0, 1.0])
    end = spline.sample(10.0)
    assert np.allclose(end.p, [0.0, 0.0, 2.0])
    assert np.allclose(end.v, 0.0)
    assert end.psi == pytest.approx(1.0)
    assert spline.sample(1.0).psi == pytest.approx(0.5)


def test_spline_rejects_repeated_waypoint():
    with pytest.raises(DegenerateSegment):
        spline_reference([[0, 0, 0], [1, 0, 0], [1, 0, 0]])


def test_sampled_reference_from_csv(tmp_path):
    path = tmp_path / "ref.csv"
    path.write_text("t,px,py,pz,vx\n0,0,0,0,1\n1,1,0,0,1\n2,2,0,0,1\n", encoding="utf-8")
    ref = SampledFlatReference.from_csv(path)
    sample = ref.sample(0.5)
    assert np.allclose(sample.p, [0.5, 0.0, 0.0])
    assert np.allclose(sample.v, [1.0, 0.0, 0.0])
    assert np.allclose(sample.a, 0.0)


def test_sampled_reference_missing_columns(tmp_path):
    path = tmp_path / "ref.csv"
    path.write_text("t,px\n0,0\n1,1\n", encoding="utf-8")
    with pytest.raises(ParseError):
        SampledFlatReference.from_csv(path)
