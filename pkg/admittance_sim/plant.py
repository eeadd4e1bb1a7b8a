"""Simulated end-effector: inner velocity loop, gripper, table contact and synthetic sensors."""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .geometry import IDENTITY, ZERO, Z_HAT, AxisAngle, Vec3, to_sensor_frame
from .models import BiasModel, InnerLoopModel, NoiseModel, TableContact
from .signals import sample_noise

logger = logging.getLogger("admittance_sim.plant")


@dataclass(frozen=True)
class PlantState:
    p: Vec3
    v: Vec3 = field(default_factory=lambda: ZERO.copy())
    a: Vec3 = field(default_factory=lambda: ZERO.copy())
    payload_attached: bool = False
    m_u_true: float = 0.0

    @classmethod
    def at_rest(cls, p) -> "PlantState":
        return cls(np.array(p, dtype=np.float64))

    @property
    def payload_mass(self) -> float:
        return self.m_u_true if self.payload_attached else 0.0


@dataclass(frozen=True)
class FtReading:
    tick: int
    force: Vec3  # sensor frame, N
    noise: Vec3
    offset: Vec3


@dataclass(frozen=True)
class AccelReading:
    tick: int
    accel: Vec3  # base frame, m/s²
    noise: Vec3


def contact_force(state: PlantState, world: TableContact) -> Vec3:
    """Unilateral penalty force of the table on the bottom of a held payload."""
    if not state.payload_attached:
        return ZERO.copy()
    penetration = world.z_table - (state.p[2] - world.tool_length)
    if penetration <= 0.0:
        return ZERO.copy()
    magnitude = world.k_contact * penetration - world.d_contact * state.v[2]
    return Z_HAT * max(magnitude, 0.0)


def plant_step(state: PlantState, v_cmd: Vec3, world: TableContact, inner: InnerLoopModel, dt: float) -> PlantState:
    """First-order velocity tracking R(s) = 1/(τ_v·s + 1) plus the contact push on the body."""
    if dt <= 0:
        raise ParameterError(f"Time step must be positive, got {dt}")
    f_contact = contact_force(state, world)
    v = state.v + (dt / inner.tau_v) * (np.asarray(v_cmd) - state.v) + dt * f_contact / inner.apparent_mass
    p = state.p + v * dt
    return replace(state, p=p, v=v, a=(v - state.v) / dt)


def read_ft(
    state: PlantState,
    world: TableContact,
    bias: BiasModel,
    noise: NoiseModel,
    tick: int,
    mount: AxisAngle = IDENTITY,
) -> FtReading:
    """Load the tool puts on the wrist, (m_g + m_u)·(g − a) minus the table's push, in the sensor frame."""
    ft_noise, _ = sample_noise(noise, tick)
    offset = np.asarray(bias.ft_offset, dtype=np.float64)
    carried = bias.gripper_mass + state.payload_mass
    load = carried * (np.asarray(bias.gravity) - state.a) + contact_force(state, world)
    return FtReading(tick, to_sensor_frame(mount, load + offset + ft_noise), ft_noise, offset)


def read_accel(state: PlantState, noise: NoiseModel, tick: int) -> AccelReading:
    """Coordinate acceleration (gravity excluded) in the base frame."""
    _, accel_noise = sample_noise(noise, tick)
    return AccelReading(tick, state.a + accel_noise, accel_noise)


def set_gripper(state: PlantState, attach: bool, m_u: float = 0.0) -> PlantState:
    if m_u < 0:
        raise ParameterError(f"Payload mass must be non-negative, got {m_u}")
    if attach:
        if state.payload_attached:
            return state
        logger.info(f"Gripper closed on {m_u:.3f} kg payload at z={state.p[2]:.4f} m")
        return replace(state, payload_attached=True, m_u_true=m_u)
    if state.payload_attached:
        logger.info(f"Gripper released payload at z={state.p[2]:.4f} m")
    return replace(state, payload_attached=False, m_u_true=0.0)
