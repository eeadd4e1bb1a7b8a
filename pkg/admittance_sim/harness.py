"""Scenario assembly, the closed-loop run, tracking metrics and the four-experiment suite."""

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from .config import EPSILON, RMSE_WINDOW_TICKS, SUITE_WORKERS
from .controller import (
    NO_EXCITATION,
    AdmittanceState,
    admittance_accel,
    command_velocity,
    excitation_from_estimate,
    integrate_step,
)
from .errors import ParameterError, ScenarioError
from .estimator import INITIAL_ESTIMATE, MassEstimator, vertical_projections
from .geometry import ZERO, AxisAngle, Vec3, to_base_frame
from .mission import MissionStatus, in_workspace, mission_tick
from .models import (
    AdmittanceSpec,
    ExperimentPreset,
    NoiseModel,
    PresetOverrides,
    RunReport,
    Scenario,
)
from .plant import AccelReading, FtReading, PlantState, plant_step, read_accel, read_ft, set_gripper
from .signals import MovingAverage, compensate, filter_step

logger = logging.getLogger("admittance_sim.harness")

# hold-phase scatter band of the mass estimate, g
ESTIMATE_SCATTER_G = 30.0

TRACE_COLUMNS = [
    "t", "px", "py", "pz", "pax", "pay", "paz", "p0x", "p0y", "p0z",
    "vcx", "vcy", "vcz", "fx", "fy", "fz", "fexcz", "mu_hat", "mu_applied", "wp_index",
]
REPORT_COLUMNS = [
    "name", "completed", "status", "sag_mm", "rmse_mm", "rmse_pre_grasp_mm",
    "estimate_mean_g", "estimate_std_g", "waypoint_times", "grasp_tick", "duration",
]
SUITE_COLUMNS = [
    "exp_id", "k", "compensation", "completed", "sag_sim_mm", "sag_eq6_mm", "rmse_mm",
    "estimate_mean_g", "status", "hardware_completion", "hardware_sag_mm", "hardware_rmse_mm", "note",
]


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".10g")
    if value is None:
        return ""
    return str(value)


@dataclass(frozen=True)
class TraceRecord:
    t: float
    p_true: Vec3
    p_a: Vec3
    p_0: Vec3
    p_ref: Vec3
    v_cmd: Vec3
    f_ext_filtered: Vec3
    f_exc: Vec3
    m_u_hat: float
    m_u_applied: float
    mission_index: int
    payload_attached: bool = False

    def as_row(self) -> Dict[str, str]:
        values = [self.t, *self.p_true, *self.p_a, *self.p_0, *self.v_cmd, *self.f_ext_filtered,
                  self.f_exc[2], self.m_u_hat, self.m_u_applied, self.mission_index]
        return {column: _fmt(float(v) if column != "wp_index" else v) for column, v in zip(TRACE_COLUMNS, values)}


# --- Scenario files ---
def load_scenario(path: str) -> Scenario:
    """Reads and validates a scenario JSON file; any problem is a ScenarioError."""
    data = read_json(path)
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        raise ScenarioError.from_validation(e) from e


def load_overrides(path: str) -> PresetOverrides:
    data = read_json(path)
    try:
        return PresetOverrides.model_validate(data)
    except ValidationError as e:
        raise ScenarioError.from_validation(e) from e


def read_json(path: str) -> Any:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}", os.path.basename(path)) from e
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file: {e.strerror}", os.path.basename(path)) from e


# --- Sensor chain ---
class SensorPipeline:
    """Sensor frame → base frame → bias/gripper compensation → moving average, for force and acceleration."""

    def __init__(self, scenario: Scenario):
        self.bias = scenario.bias
        self.mount = AxisAngle(scenario.sensor_mount.axis, scenario.sensor_mount.angle)
        self.force_filter = MovingAverage(scenario.filter_window)
        self.accel_filter = MovingAverage(scenario.filter_window)


def sensor_pipeline_step(pipeline: SensorPipeline, ft: FtReading, acc: AccelReading) -> Tuple[Vec3, Vec3]:
    """One tick of the chain; returns (filtered payload force, filtered acceleration) in the base frame."""
    f_base = to_base_frame(pipeline.mount, ft.force)
    f_comp = compensate(f_base, pipeline.bias, acc.accel)
    return filter_step(pipeline.force_filter, f_comp), filter_step(pipeline.accel_filter, acc.accel)


# --- Closed loop ---
def run_scenario(s: Scenario) -> Tuple[List[TraceRecord], RunReport]:
    """Runs plant → sensors → filters → estimator → admittance → plant until the mission ends.

    A payload-free twin of the admittance model is driven by the same waypoints
    with zero force; its position is the tracking reference `p_ref`.
    """
    params = s.params
    g = np.asarray(s.bias.gravity)
    waypoints = s.waypoints
    home = np.array(waypoints[0].p_0, dtype=np.float64)
    for i, wp in enumerate(waypoints):
        if not in_workspace(wp.p_0):
            logger.warning(f"Waypoint {i} {tuple(wp.p_0)} lies outside the robot workspace")

    plant = PlantState.at_rest(home)
    adm = AdmittanceState.at_rest(home)
    ref = AdmittanceState.at_rest(home)
    pipeline = SensorPipeline(s)
    estimator = MassEstimator(s.estimator)
    estimate = INITIAL_ESTIMATE
    status = MissionStatus()
    grasp_tick: Optional[int] = None
    grasp_index: Optional[int] = None
    trace: List[TraceRecord] = []

    logger.info(
        f"Running '{s.name}': k={params.k_a:g} b={params.b_a:.3f} m={params.m_a:g} "
        f"compensation={'on' if s.compensation_enabled else 'off'} seed={s.noise.seed}"
    )
    n_ticks = int(round(s.duration_max / s.dt))
    for tick in range(n_ticks):
        t = tick * s.dt
        ft = read_ft(plant, s.table, s.bias, s.noise, tick, pipeline.mount)
        acc = read_accel(plant, s.noise, tick)
        f_filtered, acc_filtered = sensor_pipeline_step(pipeline, ft, acc)

        # the estimator wants the support force, the negated wrist load
        f_z, accel_z_grav = vertical_projections(-f_filtered, acc_filtered, g)
        estimate = estimator.update(f_z, accel_z_grav)
        f_exc = excitation_from_estimate(estimate.m_u_applied, accel_z_grav) if s.compensation_enabled else NO_EXCITATION

        index = status.current_index
        p_0 = np.asarray(waypoints[index].p_0, dtype=np.float64)
        accel = admittance_accel(params, adm, p_0, f_filtered, f_exc)
        adm = integrate_step(adm, accel, s.dt)
        ref = integrate_step(ref, admittance_accel(params, ref, p_0, ZERO), s.dt)
        v_cmd = command_velocity(adm, plant.p, s.tracking_gain, accel, s.inner.tau_v)

        trace.append(TraceRecord(
            t, plant.p, adm.p_a, p_0, ref.p_a, v_cmd, f_filtered, f_exc.f_exc,
            estimate.m_u_hat, estimate.m_u_applied, index, plant.payload_attached,
        ))

        plant = plant_step(plant, v_cmd, s.table, s.inner, s.dt)
        status = mission_tick(status, plant.p, waypoints, s.eps, t + s.dt, s.waypoint_timeout, s.settle_time)
        if status.fired_event == "grasp":
            wp = waypoints[index]
            plant = set_gripper(plant, True, wp.mass if wp.mass is not None else s.payload_mass)
            estimator.on_grasp()
            grasp_tick, grasp_index = tick + 1, index
        elif status.fired_event == "release":
            plant = set_gripper(plant, False)
        if status.done:
            break

    report = build_report(s, trace, status, grasp_tick, grasp_index)
    logger.info(
        f"'{s.name}' finished: {report.status} after {report.duration:.3f}s, "
        f"sag {report.sag_mm:.3f} mm, RMSE {report.rmse_mm:.3f} mm"
    )
    return trace, report


def build_report(
    s: Scenario,
    trace: Sequence[TraceRecord],
    status: MissionStatus,
    grasp_tick: Optional[int],
    grasp_index: Optional[int],
) -> RunReport:
    state = status.state if status.done else "incomplete"

    hold = _hold_records(trace, grasp_index, s.sag_window, s.dt)
    sag_mm = abs(float(np.mean([r.p_0[2] - r.p_true[2] for r in hold]))) * 1e3 if hold else 0.0
    estimates_g = np.array([r.m_u_hat for r in hold]) * 1e3
    estimate_mean_g = float(estimates_g.mean()) if hold else 0.0
    estimate_std_g = float(estimates_g.std()) if hold else 0.0

    start = grasp_tick if grasp_tick is not None else 0
    length = min(RMSE_WINDOW_TICKS, len(trace) - start)
    rmse_mm = rmse_z(trace, start, length) if length > 0 else 0.0
    rmse_pre = None
    if grasp_tick is not None and grasp_tick >= RMSE_WINDOW_TICKS:
        rmse_pre = rmse_z(trace, grasp_tick - RMSE_WINDOW_TICKS, RMSE_WINDOW_TICKS)

    return RunReport(
        name=s.name,
        completed=state == "completed",
        status=state,
        sag_mm=sag_mm,
        rmse_mm=rmse_mm,
        rmse_pre_grasp_mm=rmse_pre,
        estimate_mean_g=estimate_mean_g,
        estimate_std_g=estimate_std_g,
        waypoint_times=list(status.arrival_times),
        grasp_tick=grasp_tick,
        duration=trace[-1].t if trace else 0.0,
    )


def _hold_records(
    trace: Sequence[TraceRecord], grasp_index: Optional[int], window: float, dt: float
) -> List[TraceRecord]:
    """Last `window` seconds spent with the payload at the waypoint following the grasp."""
    if grasp_index is None:
        return []
    held = [r for r in trace if r.mission_index == grasp_index + 1 and r.payload_attached]
    n = max(1, int(round(window / dt)))
    return held[-n:]


# --- Metrics ---
def predicted_sag(m_u: float, g_mag: float, k_zz: float) -> float:
    """Static vertical offset m·g/K of a spring loaded by a hanging mass (m)."""
    if k_zz <= 0:
        raise ParameterError(f"Vertical stiffness must be positive, got {k_zz}")
    return m_u * g_mag / k_zz


def rmse_z(
    trace: Sequence[TraceRecord], window_start_tick: int, window_len: int, reference: str = "p_ref"
) -> float:
    """Root-mean-square of p_a,z − reference_z over the window, in mm.

    `reference` is "p_ref" (payload-free twin) or "p_0" (static waypoint).
    """
    if window_len <= 0:
        raise ParameterError("RMSE window is empty")
    if window_start_tick < 0 or window_start_tick + window_len > len(trace):
        raise ParameterError(
            f"RMSE window [{window_start_tick}, {window_start_tick + window_len}) outside trace of {len(trace)} ticks"
        )
    if reference not in ("p_ref", "p_0"):
        raise ParameterError(f"Unknown RMSE reference '{reference}'")
    window = trace[window_start_tick: window_start_tick + window_len]
    errors = np.array([r.p_a[2] - getattr(r, reference)[2] for r in window])
    return float(np.sqrt(np.mean(errors ** 2))) * 1e3


# --- Experiment suite ---
def experiment_presets() -> List[ExperimentPreset]:
    """Medium, high and low stiffness without compensation, and low stiffness with it."""
    return [
        ExperimentPreset(exp_id=1, label="medium stiffness", stiffness=1800.0, compensation=False,
                         hardware_completion="Fail", hardware_sag_mm=8.1, hardware_rmse_mm=9.530),
        ExperimentPreset(exp_id=2, label="high stiffness", stiffness=2500.0, compensation=False,
                         hardware_completion="Success", hardware_sag_mm=3.5, hardware_rmse_mm=4.705),
        ExperimentPreset(exp_id=3, label="low stiffness, compensated", stiffness=300.0, compensation=True,
                         hardware_completion="Success", hardware_sag_mm=None, hardware_rmse_mm=1.988),
        ExperimentPreset(exp_id=4, label="low stiffness", stiffness=300.0, compensation=False,
                         hardware_completion="Fail", hardware_sag_mm=46.8, hardware_rmse_mm=20.584),
    ]


def preset_scenario(preset: ExperimentPreset, noise: NoiseModel = NoiseModel()) -> Scenario:
    return Scenario(
        name=f"exp{preset.exp_id}",
        admittance=AdmittanceSpec(k_a=preset.stiffness),
        compensation_enabled=preset.compensation,
        noise=noise,
    )


@dataclass(frozen=True)
class SuiteRow:
    exp_id: int
    k: float
    compensation: bool
    completed: Optional[bool]
    sag_sim_mm: Optional[float]
    sag_eq6_mm: Optional[float]
    rmse_mm: Optional[float]
    estimate_mean_g: Optional[float]
    status: str
    hardware_completion: str = ""
    hardware_sag_mm: Optional[float] = None
    hardware_rmse_mm: Optional[float] = None
    note: str = ""

    def as_row(self) -> Dict[str, str]:
        return {column: _fmt(getattr(self, column)) for column in SUITE_COLUMNS}


def apply_overrides(overrides: Optional[PresetOverrides]) -> List[Tuple[Dict[str, Any], Optional[ExperimentPreset], Optional[str]]]:
    """Merges override entries into the presets by exp_id; invalid results carry their error text."""
    by_id = {entry.get("exp_id"): entry for entry in (overrides.experiments if overrides else [])}
    merged = []
    for preset in experiment_presets():
        data = {**preset.model_dump(), **by_id.get(preset.exp_id, {})}
        try:
            merged.append((data, ExperimentPreset.model_validate(data), None))
        except ValidationError as e:
            err = ScenarioError.from_validation(e, prefix=f"experiments[{preset.exp_id}]")
            logger.error(f"Preset {preset.exp_id} rejected: {err}")
            merged.append((data, None, str(err)))
    return merged


def _suite_row(preset: ExperimentPreset, report: RunReport, m_u: float, g_mag: float, window: int) -> SuiteRow:
    sag_eq6_mm = predicted_sag(m_u, g_mag, preset.stiffness) * 1e3
    notes = []
    if report.completed != (preset.hardware_completion == "Success"):
        notes.append(
            f"verdict differs from hardware ({preset.hardware_completion}); static sag prediction "
            f"{sag_eq6_mm:.3f} mm vs threshold {EPSILON * 1e3:.1f} mm"
        )
    if not preset.compensation and preset.hardware_sag_mm is not None:
        gap = abs(report.sag_mm - preset.hardware_sag_mm) / preset.hardware_sag_mm * 100.0
        notes.append(f"hardware sag {preset.hardware_sag_mm:g} mm ({gap:.1f}% gap)")
    if report.estimate_std_g > ESTIMATE_SCATTER_G:
        notes.append(
            f"estimate scatter {report.estimate_std_g:.0f} g above {ESTIMATE_SCATTER_G:g} g with a {window}-ratio estimator window"
        )
    for note in notes:
        logger.warning(f"Exp {preset.exp_id}: {note}")
    return SuiteRow(
        exp_id=preset.exp_id,
        k=preset.stiffness,
        compensation=preset.compensation,
        completed=report.completed,
        sag_sim_mm=round(report.sag_mm, 6),
        sag_eq6_mm=round(sag_eq6_mm, 6),
        rmse_mm=round(report.rmse_mm, 6),
        estimate_mean_g=round(report.estimate_mean_g, 3),
        status=report.status,
        hardware_completion=preset.hardware_completion,
        hardware_sag_mm=preset.hardware_sag_mm,
        hardware_rmse_mm=preset.hardware_rmse_mm,
        note="; ".join(notes),
    )


def run_experiment_suite(
    overrides: Optional[PresetOverrides] = None,
    noise: NoiseModel = NoiseModel(),
    workers: int = SUITE_WORKERS,
) -> Tuple[List[SuiteRow], Dict[int, Tuple[List[TraceRecord], RunReport]]]:
    """Runs the four presets in parallel; returns the comparison rows and each run's trace and report."""
    merged = apply_overrides(overrides)
    valid = [preset for _, preset, _ in merged if preset is not None]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = list(executor.map(lambda p: run_scenario(preset_scenario(p, noise)), valid))
    runs = {preset.exp_id: result for preset, result in zip(valid, results)}

    rows = []
    for data, preset, error in merged:
        if preset is None:
            rows.append(SuiteRow(
                exp_id=data.get("exp_id"), k=data.get("stiffness"), compensation=data.get("compensation"),
                completed=None, sag_sim_mm=None, sag_eq6_mm=None, rmse_mm=None, estimate_mean_g=None,
                status="config-error", note=error or "",
            ))
            continue
        scenario = preset_scenario(preset, noise)
        g_mag = float(np.linalg.norm(scenario.bias.gravity))
        rows.append(_suite_row(
            preset, runs[preset.exp_id][1], scenario.payload_mass, g_mag, scenario.estimator.estimate_filter_window
        ))
    return rows, runs


def suite_checks(rows: Sequence[SuiteRow]) -> List[str]:
    """Acceptance checks over the suite; returns the failed ones (empty means pass)."""
    failures = [f"exp {r.exp_id}: config-error" for r in rows if r.status == "config-error"]
    by_id = {r.exp_id: r for r in rows if r.status != "config-error"}
    if failures or set(by_id) != {1, 2, 3, 4}:
        return failures or ["suite incomplete"]

    if by_id[1].completed:
        failures.append("exp 1 expected to fail")
    if not by_id[3].completed or by_id[3].sag_sim_mm >= 3.5:
        failures.append("exp 3 expected to succeed with sag < 3.5 mm")
    if by_id[3].rmse_mm >= 2.5:
        failures.append(f"exp 3 RMSE {by_id[3].rmse_mm:.3f} mm not below 2.5 mm")
    if by_id[4].completed or by_id[4].rmse_mm <= 15.0:
        failures.append("exp 4 expected to fail with RMSE > 15 mm")
    rmse = [by_id[i].rmse_mm for i in (3, 2, 1, 4)]
    if not all(a < b for a, b in zip(rmse, rmse[1:])):
        failures.append(f"RMSE ordering 3 < 2 < 1 < 4 violated: {rmse}")
    for r in by_id.values():
        if not r.compensation and not math.isclose(r.sag_sim_mm, r.sag_eq6_mm, rel_tol=0.02):
            failures.append(f"exp {r.exp_id}: sag {r.sag_sim_mm:.3f} mm not within 2% of {r.sag_eq6_mm:.3f} mm")
    return failures


def format_suite_table(rows: Sequence[SuiteRow]) -> str:
    header = f"{'exp':>3} {'k':>7} {'comp':>5} {'result':>14} {'sag sim':>9} {'sag pred':>9} {'RMSE':>8} {'m̂ [g]':>8}"
    lines = [header, "-" * len(header)]
    for r in rows:
        if r.status == "config-error":
            lines.append(f"{r.exp_id!s:>3} {'':>7} {'':>5} {'config-error':>14}  {r.note}")
            continue
        lines.append(
            f"{r.exp_id:>3} {r.k:>7g} {'yes' if r.compensation else 'no':>5} {r.status:>14} "
            f"{r.sag_sim_mm:>9.3f} {r.sag_eq6_mm:>9.3f} {r.rmse_mm:>8.3f} {r.estimate_mean_g:>8.1f}"
        )
    return "\n".join(lines)


# --- Writers ---
def _write_rows(path: str, fieldnames: List[str], rows: List[Dict[str, str]]):
    with open(path, "w", newline="") as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_trace_csv(path: str, trace: Sequence[TraceRecord]):
    _write_rows(path, TRACE_COLUMNS, [r.as_row() for r in trace])


def write_report_csv(path: str, report: RunReport):
    row = report.model_dump()
    row["waypoint_times"] = ";".join(format(t, ".6f") for t in report.waypoint_times)
    _write_rows(path, REPORT_COLUMNS, [{k: _fmt(v) for k, v in row.items()}])


def write_suite_csv(path: str, rows: Sequence[SuiteRow]):
    _write_rows(path, SUITE_COLUMNS, [r.as_row() for r in rows])
