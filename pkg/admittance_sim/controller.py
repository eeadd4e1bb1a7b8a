"""Admittance control law: virtual mass-spring-damper driven by measured and excitation forces."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ParameterError
from .geometry import ZERO, Z_HAT, Vec3
from .models import AdmittanceParams


@dataclass(frozen=True)
class AdmittanceState:
    p_a: Vec3
    v_a: Vec3 = field(default_factory=lambda: ZERO.copy())

    @classmethod
    def at_rest(cls, p) -> "AdmittanceState":
        return cls(np.array(p, dtype=np.float64), ZERO.copy())


@dataclass(frozen=True)
class ExcitationForce:
    f_exc: Vec3 = field(default_factory=lambda: ZERO.copy())


NO_EXCITATION = ExcitationForce()


def critical_damping(m_a: float, k_a: float) -> float:
    """b = 2·sqrt(m·k)."""
    if m_a <= 0:
        raise ParameterError(f"Virtual mass must be positive, got {m_a}")
    if k_a < 0:
        raise ParameterError(f"Virtual stiffness must be non-negative, got {k_a}")
    return 2.0 * math.sqrt(m_a * k_a)


def admittance_accel(
    params: AdmittanceParams,
    state: AdmittanceState,
    p_0: Vec3,
    f_ext: Vec3,
    f_exc: ExcitationForce = NO_EXCITATION,
) -> Vec3:
    """p̈_a = (f_ext + f_exc − b·v_a − k·(p_a − p_0)) / m, for a static reference p_0."""
    return (
        np.asarray(f_ext) + f_exc.f_exc - params.b_a * state.v_a - params.k_a * (state.p_a - np.asarray(p_0))
    ) / params.m_a


def integrate_step(state: AdmittanceState, accel: Vec3, dt: float) -> AdmittanceState:
    """Semi-implicit Euler: velocity first, then position with the new velocity."""
    if dt <= 0:
        raise ParameterError(f"Time step must be positive, got {dt}")
    v = state.v_a + np.asarray(accel) * dt
    return AdmittanceState(state.p_a + v * dt, v)


def rk4_step(
    params: AdmittanceParams,
    state: AdmittanceState,
    p_0: Vec3,
    f_ext: Vec3,
    dt: float,
    f_exc: ExcitationForce = NO_EXCITATION,
) -> AdmittanceState:
    """Classic RK4 step of the same dynamics with forces held over the step (reference integrator)."""
    if dt <= 0:
        raise ParameterError(f"Time step must be positive, got {dt}")

    def deriv(p, v):
        return v, admittance_accel(params, AdmittanceState(p, v), p_0, f_ext, f_exc)

    p, v = state.p_a, state.v_a
    k1p, k1v = deriv(p, v)
    k2p, k2v = deriv(p + 0.5 * dt * k1p, v + 0.5 * dt * k1v)
    k3p, k3v = deriv(p + 0.5 * dt * k2p, v + 0.5 * dt * k2v)
    k4p, k4v = deriv(p + dt * k3p, v + dt * k3v)
    return AdmittanceState(
        p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p),
        v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v),
    )


def excitation_from_estimate(m_u_hat: float, accel_z_grav: float) -> ExcitationForce:
    """Upward force m̂·p̈_z that cancels the payload's weight term in the admittance equation.

    Base frame is z-up and the payload load enters f_ext with negative z, so the
    excitation is taken positive along ẑ.
    """
    if m_u_hat < 0:
        raise ParameterError(f"Excitation requires a non-negative mass estimate, got {m_u_hat}")
    return ExcitationForce(Z_HAT * (m_u_hat * accel_z_grav))


def command_velocity(
    state: AdmittanceState,
    p_true: Vec3,
    tracking_gain: float,
    accel: Optional[Vec3] = None,
    lead: float = 0.0,
) -> Vec3:
    """Velocity sent to the robot: admittance velocity plus a pull of the body toward p_a.

    `lead`·`accel` feeds the admittance acceleration forward so a first-order
    velocity loop with time constant `lead` follows p_a without lag; the
    tracking error then obeys lead·ë + ė + gain·e = 0.
    """
    if lead < 0:
        raise ParameterError(f"Velocity lead must be non-negative, got {lead}")
    v_cmd = state.v_a + tracking_gain * (state.p_a - np.asarray(p_true))
    if accel is not None:
        v_cmd = v_cmd + lead * np.asarray(accel)
    return v_cmd
