import math

import numpy as np
import pytest

from admittance_sim.errors import ParameterError
from admittance_sim.geometry import (
    IDENTITY,
    AxisAngle,
    as_vec3,
    inverse,
    rodrigues_rotate,
    rotation_matrix,
    to_base_frame,
    to_sensor_frame,
    vec3,
)


def test_identity_rotation():
    np.testing.assert_allclose(rodrigues_rotate(AxisAngle((0, 0, 1), 0.0), [3, -1, 2]), [3, -1, 2])


def test_quarter_turn_about_z():
    np.testing.assert_allclose(rodrigues_rotate(AxisAngle((0, 0, 1), math.pi / 2), [1, 0, 0]), [0, 1, 0], atol=1e-12)


def test_eighth_turn_about_z():
    out = rodrigues_rotate(AxisAngle((0, 0, 1), math.pi / 4), [1, 0, 0])
    np.testing.assert_allclose(out, [0.7071068, 0.7071068, 0.0], atol=1e-7)


def test_half_turn_about_x_flips_gravity():
    out = to_base_frame(AxisAngle((1, 0, 0), math.pi), [0, 0, -9.81])
    np.testing.assert_allclose(out, [0, 0, 9.81], atol=1e-12)


def test_identity_frame():
    np.testing.assert_allclose(to_base_frame(IDENTITY, [0, 0, -9.81]), [0, 0, -9.81])


def test_axis_normalized_and_angle_canonical():
    r = AxisAngle((0, 0, 2), 3 * math.pi)
    assert np.linalg.norm(r.axis) == pytest.approx(1.0, abs=1e-12)
    assert -math.pi < r.angle <= math.pi
    assert AxisAngle((1, 0, 0), -math.pi).angle == pytest.approx(math.pi)


def test_zero_axis_rejected():
    with pytest.raises(ParameterError):
        AxisAngle((0, 0, 0), 1.0)


def test_non_finite_vectors_rejected():
    with pytest.raises(ParameterError):
        vec3(0.0, math.nan, 1.0)
    with pytest.raises(ParameterError):
        as_vec3([math.inf, 0, 0])


def test_random_rotations_are_isometries_and_invertible():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        r = AxisAngle(tuple(rng.normal(size=3)), rng.uniform(-10, 10))
        v = rng.normal(size=3) * 5
        out = rodrigues_rotate(r, v)
        assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(v), rel=1e-10)
        np.testing.assert_allclose(rodrigues_rotate(r, rodrigues_rotate(inverse(r), v)), v, atol=1e-10)
        np.testing.assert_allclose(rotation_matrix(r) @ v, out, atol=1e-10)
        np.testing.assert_allclose(to_sensor_frame(r, to_base_frame(r, v)), v, atol=1e-10)


def test_zero_angle_is_identity_for_any_axis():
    v = np.array([0.3, -2.0, 1.1])
    for axis in [(1, 0, 0), (0, 1, 1), (-3, 2, 5)]:
        np.testing.assert_allclose(rodrigues_rotate(AxisAngle(axis, 0.0), v), v)
