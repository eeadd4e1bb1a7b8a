"""SVG figures of a run: vertical trajectory and payload mass estimate."""

import logging
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .harness import TraceRecord  # noqa: E402

logger = logging.getLogger("admittance_sim.plotting")


def plot_z_trajectory(trace: Sequence[TraceRecord], path: str, grasp_tick: Optional[int] = None):
    """Actual, admittance and payload-free reference heights over time."""
    t = np.array([r.t for r in trace])
    plt.figure(figsize=(12, 5))
    plt.plot(t, [r.p_true[2] for r in trace], label="actual z", color="tab:blue")
    plt.plot(t, [r.p_a[2] for r in trace], "--", label="admittance z", color="tab:orange")
    plt.plot(t, [r.p_ref[2] for r in trace], ":", label="reference z", color="tab:green")
    if grasp_tick is not None and grasp_tick < len(trace):
        plt.axvline(trace[grasp_tick].t, color="grey", linewidth=0.8, label="grasp")
    plt.xlabel("Time (s)")
    plt.ylabel("z (m)")
    plt.title("End-effector height")
    plt.legend()
    plt.grid(True)
    plt.tight_layout()
    plt.savefig(path, format="svg")
    plt.close()
    logger.info(f"Wrote {path}")


def plot_mass_estimate(trace: Sequence[TraceRecord], path: str, true_mass: Optional[float] = None):
    t = np.array([r.t for r in trace])
    plt.figure(figsize=(12, 5))
    plt.plot(t, [r.m_u_hat * 1e3 for r in trace], label="estimate", color="tab:blue")
    plt.plot(t, [r.m_u_applied * 1e3 for r in trace], "--", label="applied", color="tab:red")
    if true_mass is not None:
        plt.axhline(true_mass * 1e3, color="grey", linestyle=":", label="true mass")
    plt.xlabel("Time (s)")
    plt.ylabel("Payload mass (g)")
    plt.title("Payload mass estimate")
    plt.legend()
    plt.grid(True)
    plt.tight_layout()
    plt.savefig(path, format="svg")
    plt.close()
    logger.info(f"Wrote {path}")
