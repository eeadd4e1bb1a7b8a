"""Waypoint sequencing with ε-threshold arrival, dwell, grasp/release events and timeout failure."""

import logging
from dataclasses import dataclass, replace
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np

from .config import PAYLOAD_MASS
from .errors import ParameterError
from .geometry import Vec3
from .models import TableContact, Waypoint

logger = logging.getLogger("admittance_sim.mission")

MissionState = Literal["moving", "completed", "failed_timeout"]

# x, y, z bounds (m) of the reachable box in front of the robot base
WORKSPACE_BOX = ((-0.2, 0.8), (-0.5, 0.5), (0.0, 0.8))
GRASP_PRESS = 0.0005


@dataclass(frozen=True)
class MissionStatus:
    current_index: int = 0
    state: MissionState = "moving"
    arrival_times: Tuple[float, ...] = ()
    last_advance_t: float = 0.0
    arrived_at: Optional[float] = None
    fired_event: Optional[str] = None
    entered_at: Optional[float] = None

    @property
    def done(self) -> bool:
        return self.state != "moving"


def mission_tick(
    status: MissionStatus,
    p_measured: Vec3,
    waypoints: Sequence[Waypoint],
    eps: float,
    t: float,
    timeout: float,
    settle: float = 0.0,
) -> MissionStatus:
    """Advances the mission by one control tick.

    Arrival counts once the body has stayed inside the ε-ball for `settle`
    seconds; leaving the ball restarts that clock.

    `fired_event` on the returned status names the event ("grasp"/"release")
    fired on this tick, if any; the caller applies it to the plant.
    """
    if eps <= 0:
        raise ParameterError(f"Waypoint threshold must be positive, got {eps}")
    if not waypoints:
        raise ParameterError("Mission needs at least one waypoint")
    if status.done:
        return replace(status, fired_event=None) if status.fired_event else status

    index = status.current_index
    wp = waypoints[index]
    status = replace(status, fired_event=None)

    if status.arrived_at is None:
        error = float(np.linalg.norm(np.asarray(p_measured) - np.asarray(wp.p_0)))
        entered_at = None
        if error < eps:
            entered_at = status.entered_at if status.entered_at is not None else t
        status = replace(status, entered_at=entered_at)
        if entered_at is not None and t - entered_at >= settle:
            logger.info(f"Reached waypoint {index} at t={t:.3f}s")
            status = replace(status, arrived_at=t, arrival_times=status.arrival_times + (t,))
        elif entered_at is None and t - status.last_advance_t > timeout:
            logger.warning(f"Waypoint {index} not reached within {timeout:.1f}s, error {error * 1e3:.3f} mm > {eps * 1e3:.2f} mm")
            return replace(status, state="failed_timeout")
        else:
            return status

    if t - status.arrived_at < wp.dwell:
        return status

    fired = wp.event if wp.event != "none" else None
    if index == len(waypoints) - 1:
        logger.info(f"Mission completed at t={t:.3f}s")
        return replace(status, state="completed", fired_event=fired)
    logger.debug(f"Advancing to waypoint {index + 1} {tuple(waypoints[index + 1].p_0)}")
    return MissionStatus(index + 1, "moving", status.arrival_times, t, None, fired)


def default_waypoints(
    table: TableContact = TableContact(),
    grasp_press: float = GRASP_PRESS,
    payload_mass: Optional[float] = PAYLOAD_MASS,
) -> List[Waypoint]:
    """Bin-to-shelf pick-and-place path in the x–z plane.

    With `payload_mass` None the grasp leaves the mass to the scenario.

    The grasp point sits `grasp_press` lower than the payload resting on the
    table, so closing the gripper there starts with the payload pressed into it.
    """
    grasp_z = table.z_table + table.tool_length - grasp_press
    return [
        Waypoint(p_0=(0.30, 0.0, 0.40)),
        Waypoint(p_0=(0.45, 0.0, 0.20)),
        Waypoint(p_0=(0.45, 0.0, grasp_z), event="grasp", mass=payload_mass, dwell=1.0),
        Waypoint(p_0=(0.45, 0.0, 0.20), dwell=2.0),
        Waypoint(p_0=(0.15, 0.0, 0.32)),
        Waypoint(p_0=(0.05, 0.0, 0.32), event="release"),
    ]


def in_workspace(p, box=WORKSPACE_BOX) -> bool:
    return all(lo <= c <= hi for c, (lo, hi) in zip(p, box))
