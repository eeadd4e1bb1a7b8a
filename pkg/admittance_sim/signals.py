"""Sensor bias compensation, moving-average filtering and seeded noise."""

from typing import Optional, Tuple

import numpy as np

from .errors import ParameterError
from .geometry import ZERO, Vec3, as_vec3
from .models import BiasModel, NoiseModel


class MovingAverage:
    """Mean of the most recent `window` vectors; before the buffer fills, the mean of what has arrived."""

    def __init__(self, window: int = 50):
        if window < 1:
            raise ParameterError(f"Moving average window must be positive, got {window}")
        self.window = window
        self._buffer = np.zeros((window, 3))
        self._next = 0
        self.samples_seen = 0

    def reset(self):
        self._buffer[:] = 0.0
        self._next = 0
        self.samples_seen = 0

    @property
    def filled(self) -> int:
        return min(self.window, self.samples_seen)

    def mean(self) -> Vec3:
        if self.samples_seen == 0:
            return ZERO.copy()
        return self._buffer[: self.filled].sum(axis=0) / self.filled

    def step(self, sample: Vec3) -> Vec3:
        self._buffer[self._next] = sample
        self._next = (self._next + 1) % self.window
        self.samples_seen += 1
        return self.mean()


def filter_step(f: MovingAverage, sample: Vec3) -> Vec3:
    return f.step(as_vec3(sample))


def compensate(raw_ft_base: Vec3, bias: BiasModel, accel: Optional[Vec3] = None) -> Vec3:
    """Removes sensor offset and the gripper's gravity (and, given `accel`, inertial) load.

    What remains is the load of the unknown payload plus any contact force.
    """
    gravity = np.asarray(bias.gravity)
    a = ZERO if accel is None else np.asarray(accel)
    return np.asarray(raw_ft_base) - np.asarray(bias.ft_offset) - bias.gripper_mass * (gravity - a)


def sample_noise(model: NoiseModel, tick: int) -> Tuple[Vec3, Vec3]:
    """Zero-mean Gaussian (FT noise, accel noise) for one tick; a pure function of (seed, tick)."""
    if model.ft_sigma == 0.0 and model.accel_sigma == 0.0:
        return ZERO.copy(), ZERO.copy()
    rng = np.random.default_rng([model.seed, tick])
    draws = rng.standard_normal(6)
    return draws[:3] * model.ft_sigma, draws[3:] * model.accel_sigma
