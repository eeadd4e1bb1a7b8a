import logging
import os
from logging.handlers import RotatingFileHandler

from dotenv import load_dotenv

load_dotenv()

# --- Configuration ---
LOG_DIR = os.getenv("ADMITTANCE_LOG_DIR", "logs")
LOG_LEVEL = os.getenv("ADMITTANCE_LOG_LEVEL", "INFO").upper()
OUT_DIR = os.getenv("ADMITTANCE_OUT_DIR", "sim_output")
SUITE_WORKERS = int(os.getenv("ADMITTANCE_SUITE_WORKERS", 4))
MAX_LOG_SIZE_MB = 10
MAX_LOG_FILES = 5

SCHEMA_VERSION = 1
CONTROL_RATE_HZ = 500
DT = 1.0 / CONTROL_RATE_HZ
GRAVITY = (0.0, 0.0, -9.81)
EPSILON = 0.0035  # waypoint threshold, m
WAYPOINT_TIMEOUT = 10.0  # s
RMSE_WINDOW_TICKS = 500
SAG_WINDOW = 0.5  # s, tail of the post-grasp hold
SETTLE_TIME = 0.25  # s inside the ε-ball before an arrival counts
PAYLOAD_MASS = 1.5  # kg
GRIPPER_MASS = 1.0  # kg
VIRTUAL_MASS = 4.0  # kg


def setup_logging(log_dir: str = LOG_DIR, level: str = LOG_LEVEL) -> logging.Logger:
    """Installs the rotating file + console handlers on the package logger (once)."""
    logger = logging.getLogger("admittance_sim")
    if logger.handlers:
        return logger

    os.makedirs(log_dir, exist_ok=True)
    log_file = os.path.join(log_dir, "admittance_sim.log")
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    file_handler = RotatingFileHandler(log_file, maxBytes=MAX_LOG_SIZE_MB * 1024 * 1024, backupCount=MAX_LOG_FILES)
    file_handler.setFormatter(formatter)
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)

    logger.setLevel(getattr(logging, level, logging.INFO))
    logger.addHandler(file_handler)
    logger.addHandler(console_handler)
    return logger
