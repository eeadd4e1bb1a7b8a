import numpy as np
import pytest

from admittance_sim.geometry import AxisAngle, to_base_frame
from admittance_sim.models import BiasModel, InnerLoopModel, NoiseModel, TableContact
from admittance_sim.plant import PlantState, contact_force, plant_step, read_accel, read_ft, set_gripper

TABLE = TableContact()
INNER = InnerLoopModel()
BIAS = BiasModel(gripper_mass=1.0)
QUIET = NoiseModel(ft_sigma=0.0, accel_sigma=0.0)
HOVER = (0.45, 0.0, 0.30)


def test_rest_is_fixed_point():
    state = PlantState.at_rest(HOVER)
    out = plant_step(state, np.zeros(3), TABLE, INNER, 0.002)
    np.testing.assert_array_equal(out.p, state.p)
    np.testing.assert_array_equal(out.v, np.zeros(3))
    np.testing.assert_array_equal(out.a, np.zeros(3))


def test_velocity_tracks_command_within_five_time_constants():
    state = PlantState.at_rest(HOVER)
    v_cmd = np.array([0.1, 0.0, -0.05])
    for _ in range(125):
        state = plant_step(state, v_cmd, TABLE, INNER, 0.002)
    np.testing.assert_allclose(state.v, v_cmd, rtol=0.01)


def test_bounded_command_gives_bounded_velocity():
    rng = np.random.default_rng(4)
    state = PlantState.at_rest(HOVER)
    for _ in range(2000):
        state = plant_step(state, rng.uniform(-1, 1, size=3), TABLE, INNER, 0.002)
        assert np.all(np.abs(state.v) <= 1.0 + 1e-12)


def test_hover_readings():
    state = PlantState.at_rest(HOVER)
    assert read_ft(state, TABLE, BIAS, QUIET, 0).force[2] == pytest.approx(-9.81, abs=1e-9)
    loaded = set_gripper(state, True, 1.5)
    assert read_ft(loaded, TABLE, BIAS, QUIET, 0).force[2] == pytest.approx(-24.525, abs=1e-9)


def test_free_fall_reads_zero():
    state = PlantState(np.array(HOVER), np.zeros(3), np.array(BIAS.gravity), True, 1.5)
    np.testing.assert_allclose(read_ft(state, TABLE, BIAS, QUIET, 0).force, np.zeros(3), atol=1e-12)


def test_contact_force_in_reading():
    pressed = set_gripper(PlantState.at_rest((0.45, 0.0, TABLE.tool_length - 0.001)), True, 1.5)
    reading = read_ft(pressed, TABLE, BIAS, QUIET, 0).force[2]
    assert reading - (-24.525) == pytest.approx(100.0, abs=1e-6)


def test_contact_needs_payload_and_is_unilateral():
    low = PlantState.at_rest((0.45, 0.0, TABLE.tool_length - 0.001))
    assert not contact_force(low, TABLE).any()
    rising = PlantState(low.p, np.array([0.0, 0.0, 5.0]), np.zeros(3), True, 1.5)
    assert contact_force(rising, TABLE)[2] == 0.0
    above = set_gripper(PlantState.at_rest(HOVER), True, 1.5)
    assert not contact_force(above, TABLE).any()


def test_contact_pushes_body_up():
    pressed = set_gripper(PlantState.at_rest((0.45, 0.0, TABLE.tool_length - 0.001)), True, 1.5)
    assert plant_step(pressed, np.zeros(3), TABLE, INNER, 0.002).v[2] > 0


def test_sensor_mount_rotation():
    mount = AxisAngle((1, 0, 0), np.pi / 3)
    reading = read_ft(PlantState.at_rest(HOVER), TABLE, BIAS, QUIET, 0, mount).force
    np.testing.assert_allclose(to_base_frame(mount, reading), [0, 0, -9.81], atol=1e-12)


def test_accelerometer_is_coordinate_acceleration():
    state = PlantState.at_rest(HOVER)
    np.testing.assert_array_equal(read_accel(state, QUIET, 0).accel, np.zeros(3))
    up = PlantState(state.p, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    np.testing.assert_array_equal(read_accel(up, QUIET, 3).accel, [0, 0, 1])


def test_accelerometer_noise_std():
    noise = NoiseModel(ft_sigma=0.0, accel_sigma=0.05, seed=9)
    state = PlantState.at_rest(HOVER)
    samples = np.concatenate([read_accel(state, noise, t).accel for t in range(20_000)])
    assert np.std(samples) == pytest.approx(0.05, rel=0.02)


def test_gripper_attach_release():
    state = PlantState.at_rest(HOVER)
    loaded = set_gripper(state, True, 1.5)
    extra = read_ft(loaded, TABLE, BIAS, QUIET, 0).force[2] - read_ft(state, TABLE, BIAS, QUIET, 0).force[2]
    assert extra == pytest.approx(-14.715)
    assert set_gripper(loaded, True, 1.5) is loaded
    released = set_gripper(loaded, False)
    assert not released.payload_attached and released.payload_mass == 0.0
    assert read_ft(released, TABLE, BIAS, QUIET, 0).force[2] == pytest.approx(-9.81)
