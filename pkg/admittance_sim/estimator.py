"""Online payload mass estimation from vertical force and gravity-corrected acceleration."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .geometry import Z_HAT, Vec3
from .models import EstimatorConfig

logger = logging.getLogger("admittance_sim.estimator")


@dataclass(frozen=True)
class MassEstimate:
    m_u_hat: float = 0.0
    m_u_applied: float = 0.0
    valid: bool = False
    raw_ratio: float = 0.0


INITIAL_ESTIMATE = MassEstimate()


def vertical_projections(f_base: Vec3, accel_base: Vec3, g: Vec3) -> Tuple[float, float]:
    """(f·ẑ, (p̈ − g)·ẑ)."""
    f_z = float(np.dot(f_base, Z_HAT))
    accel_z_grav = float(np.dot(np.asarray(accel_base) - np.asarray(g), Z_HAT))
    return f_z, accel_z_grav


class MassEstimator:
    """Guarded m_u = f_z/p̈_z − m_g with a moving average over raw ratios and hold-last gating.

    `f_z` is the vertical support (reaction) force on the tool. The ratio filter
    restarts at every grasp; when `gate_after_grasp_only` is set nothing is
    estimated before the first grasp.
    """

    def __init__(self, cfg: EstimatorConfig):
        self.cfg = cfg
        self._ratios = np.zeros(cfg.estimate_filter_window)
        self._next = 0
        self._count = 0
        self.enabled = not cfg.gate_after_grasp_only
        self.last = INITIAL_ESTIMATE

    def on_grasp(self):
        self.enabled = True
        self._ratios[:] = 0.0
        self._next = 0
        self._count = 0

    def filter_ratio(self, ratio: float) -> float:
        self._ratios[self._next] = ratio
        self._next = (self._next + 1) % len(self._ratios)
        self._count += 1
        n = min(self._count, len(self._ratios))
        return float(self._ratios[:n].sum() / n)

    def update(self, f_z: float, accel_z_grav: float, m_g: float = 0.0) -> MassEstimate:
        if not self.enabled:
            return self.last
        self.last = estimate_mass(f_z, accel_z_grav, m_g, self.cfg, self.last, self)
        return self.last


def estimate_mass(
    f_z: float,
    accel_z_grav: float,
    m_g: float,
    cfg: EstimatorConfig,
    prev: MassEstimate,
    estimator: Optional[MassEstimator] = None,
) -> MassEstimate:
    """One estimator update; without an `estimator` the ratio is used unfiltered."""
    if abs(accel_z_grav) < cfg.accel_floor:
        logger.debug(f"Estimate gated: |p̈_z| = {abs(accel_z_grav):.3f} below floor {cfg.accel_floor}")
        return MassEstimate(prev.m_u_hat, prev.m_u_applied, False, prev.raw_ratio)

    raw_ratio = f_z / accel_z_grav - m_g
    m_u_hat = estimator.filter_ratio(raw_ratio) if estimator is not None else raw_ratio
    return MassEstimate(m_u_hat, max(m_u_hat, 0.0), True, raw_ratio)
