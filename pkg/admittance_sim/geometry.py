"""Vectors, axis-angle rotations and sensor-to-base frame transforms."""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import ParameterError

Vec3 = NDArray[np.float64]


def vec3(x: float = 0.0, y: float = 0.0, z: float = 0.0) -> Vec3:
    """Builds a finite 3-vector."""
    v = np.array([x, y, z], dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ParameterError(f"Vector components must be finite, got {v.tolist()}")
    return v


ZERO = vec3()
Z_HAT = vec3(z=1.0)


def as_vec3(values) -> Vec3:
    """Coerces any 3-sequence into a finite float vector."""
    v = np.asarray(values, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ParameterError(f"Vector components must be finite, got {v.tolist()}")
    return v


@dataclass(frozen=True)
class AxisAngle:
    """Rotation by `angle` radians about a unit `axis`; normalized on construction."""

    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    angle: float = 0.0

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=np.float64).reshape(3)
        norm = float(np.linalg.norm(axis))
        if not math.isfinite(norm) or norm == 0.0:
            raise ParameterError(f"Rotation axis must be a non-zero finite vector, got {axis.tolist()}")
        if not math.isfinite(self.angle):
            raise ParameterError(f"Rotation angle must be finite, got {self.angle}")
        angle = math.remainder(self.angle, 2.0 * math.pi)
        if angle <= -math.pi:
            angle = math.pi
        object.__setattr__(self, "axis", tuple(float(c) for c in axis / norm))
        object.__setattr__(self, "angle", angle)

    @property
    def unit_axis(self) -> Vec3:
        return np.array(self.axis)


IDENTITY = AxisAngle((0.0, 0.0, 1.0), 0.0)


def inverse(r: AxisAngle) -> AxisAngle:
    return AxisAngle(r.axis, -r.angle)


def rotation_matrix(r: AxisAngle) -> NDArray[np.float64]:
    """Rodrigues rotation matrix I + sin(θ)K + (1 − cos(θ))K²."""
    kx, ky, kz = r.axis
    k = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.identity(3) + k * math.sin(r.angle) + (k @ k) * (1.0 - math.cos(r.angle))


def rodrigues_rotate(r: AxisAngle, v: Vec3) -> Vec3:
    """Rotates `v` about `r.axis` by `r.angle`."""
    k = r.unit_axis
    v = np.asarray(v, dtype=np.float64)
    c, s = math.cos(r.angle), math.sin(r.angle)
    return v * c + np.cross(k, v) * s + k * float(np.dot(k, v)) * (1.0 - c)


def to_base_frame(r: AxisAngle, reading: Vec3) -> Vec3:
    """Expresses a sensor-frame reading in the base frame, `r` being the sensor-to-base rotation."""
    return rodrigues_rotate(r, reading)


def to_sensor_frame(r: AxisAngle, vector: Vec3) -> Vec3:
    return rodrigues_rotate(inverse(r), vector)
