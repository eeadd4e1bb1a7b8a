import numpy as np
import pytest

from admittance_sim.errors import ParameterError
from admittance_sim.mission import MissionStatus, default_waypoints, in_workspace, mission_tick
from admittance_sim.models import TableContact, Waypoint

EPS = 0.0035


def test_single_waypoint_completes_immediately():
    wps = [Waypoint(p_0=(0.3, 0.0, 0.4))]
    status = mission_tick(MissionStatus(), np.array([0.3, 0.0, 0.4]), wps, EPS, 0.002, 10.0)
    assert status.state == "completed"
    assert status.arrival_times == (0.002,)


def test_persistent_offset_times_out():
    wps = [Waypoint(p_0=(0.45, 0.0, 0.2)), Waypoint(p_0=(0.15, 0.0, 0.32))]
    sagging = np.array([0.45, 0.0, 0.2 - 0.0081])
    status = MissionStatus()
    t = 0.0
    while not status.done:
        t += 0.002
        status = mission_tick(status, sagging, wps, EPS, t, 10.0)
    assert status.state == "failed_timeout"
    assert status.current_index == 0
    assert t == pytest.approx(10.002, abs=0.003)


def test_dwell_then_event_fires_once():
    wps = [Waypoint(p_0=(0.45, 0.0, 0.1), event="grasp", mass=1.5, dwell=1.0), Waypoint(p_0=(0.45, 0.0, 0.2))]
    p = np.array(wps[0].p_0)
    status, fired, indices = MissionStatus(), [], []
    for tick in range(1, 1000):
        status = mission_tick(status, p, wps, EPS, tick * 0.002, 10.0)
        indices.append(status.current_index)
        if status.fired_event:
            fired.append((tick, status.fired_event))
    assert len(fired) == 1 and fired[0][1] == "grasp"
    assert fired[0][0] in (501, 502)
    assert indices == sorted(indices)
    assert status.current_index == 1 and status.state == "moving"


def test_arrival_waits_for_settle_time():
    wps = [Waypoint(p_0=(0.45, 0.0, 0.2)), Waypoint(p_0=(0.15, 0.0, 0.32))]
    inside = np.array([0.45, 0.0, 0.2 - 0.001])
    status = mission_tick(MissionStatus(), inside, wps, EPS, 1.0, 10.0, settle=0.25)
    assert status.arrived_at is None and status.entered_at == 1.0
    status = mission_tick(status, inside, wps, EPS, 1.2, 10.0, settle=0.25)
    assert status.current_index == 0
    status = mission_tick(status, inside, wps, EPS, 1.25, 10.0, settle=0.25)
    assert status.current_index == 1
    assert status.arrival_times == (1.25,)


def test_passing_through_the_ball_is_not_arrival():
    wps = [Waypoint(p_0=(0.45, 0.0, 0.2)), Waypoint(p_0=(0.15, 0.0, 0.32))]
    status, t = MissionStatus(), 0.0
    # body overshoots through the ball for 0.1 s, then settles 6 mm low
    for tick in range(1, 2000):
        t = tick * 0.002
        z = 0.2 if 0.5 <= t < 0.6 else 0.2 - 0.006
        status = mission_tick(status, np.array([0.45, 0.0, z]), wps, EPS, t, 3.0, settle=0.25)
        if status.done:
            break
    assert status.state == "failed_timeout"
    assert status.current_index == 0
    assert status.arrival_times == ()


def test_timeout_counts_from_last_advance():
    wps = [Waypoint(p_0=(0.0, 0.0, 0.3)), Waypoint(p_0=(0.0, 0.0, 0.5))]
    status = mission_tick(MissionStatus(), np.array([0.0, 0.0, 0.3]), wps, EPS, 5.0, 10.0)
    assert status.current_index == 1 and status.last_advance_t == 5.0
    status = mission_tick(status, np.zeros(3), wps, EPS, 14.9, 10.0)
    assert status.state == "moving"
    assert mission_tick(status, np.zeros(3), wps, EPS, 15.1, 10.0).state == "failed_timeout"


def test_finished_mission_is_frozen():
    done = MissionStatus(state="completed", fired_event="release")
    out = mission_tick(done, np.zeros(3), [Waypoint(p_0=(0, 0, 0))], EPS, 1.0, 10.0)
    assert out.state == "completed" and out.fired_event is None


def test_bad_arguments():
    with pytest.raises(ParameterError):
        mission_tick(MissionStatus(), np.zeros(3), [Waypoint(p_0=(0, 0, 0))], 0.0, 0.0, 10.0)
    with pytest.raises(ParameterError):
        mission_tick(MissionStatus(), np.zeros(3), [], EPS, 0.0, 10.0)


def test_default_waypoints():
    wps = default_waypoints()
    assert len(wps) == 6
    assert [i for i, wp in enumerate(wps) if wp.event == "grasp"] == [2]
    assert [i for i, wp in enumerate(wps) if wp.event == "release"] == [5]
    assert wps[2].mass == 1.5
    assert all(wp.p_0[1] == 0.0 for wp in wps)
    assert all(in_workspace(wp.p_0) for wp in wps)


def test_grasp_height_matches_table():
    table = TableContact(z_table=0.02, tool_length=0.12)
    grasp = default_waypoints(table)[2]
    assert grasp.p_0[2] == pytest.approx(table.z_table + table.tool_length - 0.0005)
