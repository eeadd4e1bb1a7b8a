"""Command line: run a scenario, run the experiment suite, sweep stability, dump the canonical waypoints."""

import argparse
import csv
import json
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from .config import OUT_DIR, PAYLOAD_MASS, SUITE_WORKERS, setup_logging
from .errors import ParameterError, ScenarioError
from .harness import (
    format_suite_table,
    load_overrides,
    load_scenario,
    read_json,
    run_experiment_suite,
    run_scenario,
    suite_checks,
    write_report_csv,
    write_suite_csv,
    write_trace_csv,
)
from .mission import default_waypoints
from .models import CliConfig, NoiseModel, Scenario, StabilityFile
from .stability import stability_sweep

logger = logging.getLogger("admittance_sim.cli")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_MISSION_FAIL = 2

STABILITY_COLUMNS = ["k_a", "b_a", "tau_v", "T_f", "m_u_hat_gain", "max_real_part", "stable", "method_agreement", "degenerate"]


def _seeded(noise: NoiseModel, seed: Optional[int]) -> NoiseModel:
    if seed is None:
        return noise
    try:
        return NoiseModel.model_validate({**noise.model_dump(), "seed": seed})
    except ValidationError as e:
        raise ScenarioError.from_validation(e, prefix="noise") from e


def _plot(trace, report, out_dir: str, prefix: str = "", true_mass: Optional[float] = None):
    try:
        from .plotting import plot_mass_estimate, plot_z_trajectory

        plot_z_trajectory(trace, os.path.join(out_dir, f"{prefix}z_trajectory.svg"), report.grasp_tick)
        plot_mass_estimate(trace, os.path.join(out_dir, f"{prefix}mass_estimate.svg"), true_mass)
    except Exception as e:
        logger.exception(f"Plotting failed: {e}")


def cmd_run(cfg: CliConfig) -> int:
    scenario = load_scenario(str(cfg.scenario_path))
    scenario = scenario.model_copy(update={"noise": _seeded(scenario.noise, cfg.seed_override)})
    os.makedirs(cfg.out_dir, exist_ok=True)
    trace, report = run_scenario(scenario)
    write_trace_csv(os.path.join(cfg.out_dir, "trace.csv"), trace)
    write_report_csv(os.path.join(cfg.out_dir, "report.csv"), report)
    if cfg.plot:
        _plot(trace, report, str(cfg.out_dir), true_mass=scenario.payload_mass)
    print(f"{report.name}: {report.status}, sag {report.sag_mm:.3f} mm, RMSE {report.rmse_mm:.3f} mm")
    return EXIT_OK if report.completed else EXIT_MISSION_FAIL


def cmd_suite(cfg: CliConfig) -> int:
    overrides = load_overrides(str(cfg.scenario_path)) if cfg.scenario_path else None
    noise = _seeded(NoiseModel(), cfg.seed_override)
    os.makedirs(cfg.out_dir, exist_ok=True)
    rows, runs = run_experiment_suite(overrides, noise=noise, workers=SUITE_WORKERS)
    write_suite_csv(os.path.join(cfg.out_dir, "suite_report.csv"), rows)
    if cfg.plot:
        for exp_id, (trace, report) in sorted(runs.items()):
            _plot(trace, report, str(cfg.out_dir), prefix=f"exp{exp_id}_", true_mass=PAYLOAD_MASS)
    print(format_suite_table(rows))

    if any(r.status == "config-error" for r in rows):
        return EXIT_CONFIG
    failures = suite_checks(rows)
    for failure in failures:
        logger.warning(f"Suite check failed: {failure}")
    return EXIT_OK if not failures else EXIT_MISSION_FAIL


def cmd_stability(cfg: CliConfig) -> int:
    data = read_json(str(cfg.scenario_path))
    try:
        sweep = StabilityFile.model_validate(data).stability
    except ValidationError as e:
        raise ScenarioError.from_validation(e) from e
    os.makedirs(cfg.out_dir, exist_ok=True)
    rows = stability_sweep(sweep)
    path = os.path.join(cfg.out_dir, "stability_map.csv")
    with open(path, "w", newline="") as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=STABILITY_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({
                "k_a": format(r.k_a, ".10g"),
                "b_a": format(r.b_a, ".10g"),
                "tau_v": format(r.tau_v, ".10g"),
                "T_f": format(r.t_f, ".10g"),
                "m_u_hat_gain": format(r.m_u_hat_gain, ".10g"),
                "max_real_part": format(r.max_real_part, ".10g"),
                "stable": str(r.stable).lower(),
                "method_agreement": str(r.method_agreement).lower(),
                "degenerate": str(r.degenerate).lower(),
            })
    print(f"{len(rows)} grid points, {sum(not r.stable for r in rows)} unstable -> {path}")
    return EXIT_OK


def cmd_waypoints_dump(cfg: CliConfig) -> int:
    print(json.dumps([wp.model_dump() for wp in default_waypoints()], indent=2))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "suite": cmd_suite,
    "stability": cmd_stability,
    "waypoints-dump": cmd_waypoints_dump,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="admittance_sim", description="Mass-adaptive admittance control simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one scenario and write trace.csv and report.csv.")
    run.add_argument("--scenario", required=True, help="Scenario JSON file.")
    run.add_argument("--out", default=OUT_DIR, help="Output directory.")
    run.add_argument("--seed", type=int, help="Override the scenario noise seed.")
    run.add_argument("--plot", action="store_true", help="Also write the SVG figures.")

    suite = sub.add_parser("suite", help="Run the four canonical experiments and write suite_report.csv.")
    suite.add_argument("--out", default=OUT_DIR, help="Output directory.")
    suite.add_argument("--scenario", help="Optional preset overrides JSON file.")
    suite.add_argument("--seed", type=int, help="Noise seed for every experiment.")
    suite.add_argument("--plot", action="store_true", help="Also write per-experiment SVG figures.")

    stability = sub.add_parser("stability", help="Sweep the characteristic polynomial and write stability_map.csv.")
    stability.add_argument("--scenario", required=True, help="JSON file with a 'stability' section.")
    stability.add_argument("--out", default=OUT_DIR, help="Output directory.")

    sub.add_parser("waypoints-dump", help="Print the canonical six-waypoint path as JSON.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    cfg = CliConfig(
        command=args.command,
        scenario_path=getattr(args, "scenario", None),
        out_dir=getattr(args, "out", OUT_DIR),
        seed_override=getattr(args, "seed", None),
        plot=getattr(args, "plot", False),
    )
    try:
        return COMMANDS[cfg.command](cfg)
    except (ScenarioError, ParameterError) as e:
        logger.error(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        logger.exception(f"I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
