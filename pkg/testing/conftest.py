import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from admittance_sim.harness import experiment_presets, preset_scenario, run_experiment_suite, run_scenario  # noqa: E402
from admittance_sim.models import NoiseModel  # noqa: E402

NOISELESS = NoiseModel(ft_sigma=0.0, accel_sigma=0.0)


@pytest.fixture(scope="session")
def noiseless_runs():
    """exp_id -> (trace, report) for the four presets without sensor noise."""
    return {p.exp_id: run_scenario(preset_scenario(p, NOISELESS)) for p in experiment_presets()}


@pytest.fixture(scope="session")
def suite_result():
    """Default suite (noisy sensors, seed 0)."""
    return run_experiment_suite()
