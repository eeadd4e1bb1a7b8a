import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import (
    DT,
    EPSILON,
    GRAVITY,
    GRIPPER_MASS,
    PAYLOAD_MASS,
    SAG_WINDOW,
    SCHEMA_VERSION,
    SETTLE_TIME,
    VIRTUAL_MASS,
    WAYPOINT_TIMEOUT,
)

Triple = Tuple[float, float, float]


class SimModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


# --- Controller ---
class AdmittanceParams(SimModel):
    """Virtual mass, damping and stiffness, applied uniformly on every Cartesian axis."""

    m_a: float = Field(VIRTUAL_MASS, gt=0)
    b_a: float = Field(..., ge=0)
    k_a: float = Field(..., ge=0)

    @classmethod
    def critically_damped(cls, m_a: float, k_a: float) -> "AdmittanceParams":
        from .controller import critical_damping

        return cls(m_a=m_a, b_a=critical_damping(m_a, k_a), k_a=k_a)


class AdmittanceSpec(SimModel):
    """Scenario form of AdmittanceParams; `b_a` may be the string "critical"."""

    m_a: float = Field(VIRTUAL_MASS, gt=0)
    k_a: float = Field(..., ge=0)
    b_a: Union[float, Literal["critical"]] = "critical"

    @field_validator("b_a")
    @classmethod
    def _non_negative(cls, v):
        if v != "critical" and v < 0:
            raise ValueError("b_a must be >= 0")
        return v

    def resolve(self) -> AdmittanceParams:
        if self.b_a == "critical":
            return AdmittanceParams.critically_damped(self.m_a, self.k_a)
        return AdmittanceParams(m_a=self.m_a, b_a=self.b_a, k_a=self.k_a)


# --- Signal chain ---
class BiasModel(SimModel):
    ft_offset: Triple = (0.0, 0.0, 0.0)
    gripper_mass: float = Field(GRIPPER_MASS, ge=0)
    gravity: Triple = GRAVITY
    gravity_band: Tuple[float, float] = (9.0, 10.5)

    @model_validator(mode="after")
    def _gravity_in_band(self):
        lo, hi = self.gravity_band
        g = math.sqrt(sum(c * c for c in self.gravity))
        if not lo <= g <= hi:
            raise ValueError(f"|gravity| = {g:.3f} outside sanity band [{lo}, {hi}]")
        return self


class NoiseModel(SimModel):
    ft_sigma: float = Field(4.0, ge=0)
    accel_sigma: float = Field(0.02, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)


class EstimatorConfig(SimModel):
    accel_floor: float = Field(1.0, gt=0)
    estimate_filter_window: int = Field(10, gt=0)
    gate_after_grasp_only: bool = True


# --- Plant ---
class InnerLoopModel(SimModel):
    tau_v: float = Field(0.05, gt=0)
    apparent_mass: float = Field(20.0, gt=0)


class TableContact(SimModel):
    z_table: float = 0.0
    k_contact: float = Field(1e5, ge=0)
    d_contact: float = Field(1e3, ge=0)
    tool_length: float = Field(0.10, ge=0)


# --- Mission ---
class Waypoint(SimModel):
    p_0: Triple
    event: Literal["none", "grasp", "release"] = "none"
    mass: Optional[float] = Field(None, ge=0)
    dwell: float = Field(0.0, ge=0)


def _default_waypoints():
    from .mission import default_waypoints

    return default_waypoints(payload_mass=None)


class SensorMount(SimModel):
    axis: Triple = (0.0, 0.0, 1.0)
    angle: float = 0.0

    @field_validator("axis")
    @classmethod
    def _non_zero(cls, v):
        if all(c == 0.0 for c in v):
            raise ValueError("rotation axis must be non-zero")
        return v


# --- Harness ---
class Scenario(SimModel):
    schema_version: Literal[SCHEMA_VERSION] = SCHEMA_VERSION
    name: str = "scenario"
    admittance: AdmittanceSpec
    compensation_enabled: bool = False
    payload_mass: float = Field(PAYLOAD_MASS, ge=0)
    noise: NoiseModel = NoiseModel()
    bias: BiasModel = BiasModel()
    inner: InnerLoopModel = InnerLoopModel()
    table: TableContact = TableContact()
    sensor_mount: SensorMount = SensorMount()
    waypoints: List[Waypoint] = Field(default_factory=_default_waypoints, min_length=1)
    estimator: EstimatorConfig = EstimatorConfig()
    filter_window: int = Field(50, gt=0)
    tracking_gain: float = Field(5.0, ge=0)
    eps: float = Field(EPSILON, gt=0)
    waypoint_timeout: float = Field(WAYPOINT_TIMEOUT, gt=0)
    settle_time: float = Field(SETTLE_TIME, ge=0)
    sag_window: float = Field(SAG_WINDOW, gt=0)
    dt: float = Field(DT, gt=0, le=0.01)
    duration_max: float = Field(60.0, gt=0)

    @model_validator(mode="after")
    def _event_order(self):
        holding = False
        for i, wp in enumerate(self.waypoints):
            if wp.event == "grasp":
                if holding:
                    raise ValueError(f"waypoint {i}: grasp while a payload is already held")
                holding = True
            elif wp.event == "release":
                if not holding:
                    raise ValueError(f"waypoint {i}: release without a preceding grasp")
                holding = False
        return self

    @property
    def params(self) -> AdmittanceParams:
        return self.admittance.resolve()


class ExperimentPreset(SimModel):
    exp_id: int
    label: str
    stiffness: float = Field(..., gt=0)
    compensation: bool
    hardware_completion: Literal["Success", "Fail"]
    hardware_sag_mm: Optional[float] = None
    hardware_rmse_mm: Optional[float] = None


class PresetOverrides(SimModel):
    schema_version: Literal[SCHEMA_VERSION] = SCHEMA_VERSION
    experiments: List[dict] = Field(default_factory=list)


class StabilitySweep(SimModel):
    m_a: float = Field(VIRTUAL_MASS, gt=0)
    m_u: float = Field(PAYLOAD_MASS, ge=0)
    k_values: List[float] = [100.0, 300.0, 1800.0, 2500.0]
    tau_values: List[float] = [0.01, 0.05, 0.1]
    tf_values: List[float] = [0.0, 0.05]
    gain_values: List[float] = [0.0, 0.75, 1.5]
    b_values: Optional[List[float]] = None
    margin: float = 0.0

    @field_validator("tau_values", "tf_values")
    @classmethod
    def _non_negative(cls, v):
        if any(x < 0 for x in v):
            raise ValueError("time constants must be >= 0")
        return v


class StabilityFile(SimModel):
    schema_version: Literal[SCHEMA_VERSION] = SCHEMA_VERSION
    stability: StabilitySweep = StabilitySweep()


class RunReport(BaseModel):
    name: str
    completed: bool
    status: str
    sag_mm: float = Field(..., ge=0)
    rmse_mm: float = Field(..., ge=0)
    rmse_pre_grasp_mm: Optional[float] = None
    estimate_mean_g: float
    estimate_std_g: float
    waypoint_times: List[float]
    grasp_tick: Optional[int] = None
    duration: float


# --- CLI ---
class CliConfig(BaseModel):
    command: Literal["run", "suite", "stability", "waypoints-dump"]
    scenario_path: Optional[Path] = None
    out_dir: Path
    seed_override: Optional[int] = None
    plot: bool = False
