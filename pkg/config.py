"""
config.py - default settings for ipcondense (simulation, exact tables, output)
"""

import os
from pathlib import Path

# project
PROJECT_NAME = "ipcondense"
VERSION = "0.3.0"

BASE_DIR = Path(__file__).parent
OUTPUT_DIR = BASE_DIR / "output"

# exact tables
TABLE_MEMORY_BUDGET_BYTES = int(os.environ.get("IPCONDENSE_TABLE_BUDGET", 512 * 1024 * 1024))
LOG_Z_REL_TOLERANCE = 1e-9

# dynamics
DEFAULT_BURN_IN_FACTOR = 10.0
UNIFORM_CHUNK = 1 << 16
DEBUG_MASS_CHECK = os.environ.get("IPCONDENSE_DEBUG", "").lower() in ("1", "true", "yes")

# sampling protocol (realizations x size-biased resamples)
DEFAULT_REPLICAS = 100
DEFAULT_RESAMPLES = 5
DEFAULT_K_MAX = 8

# GEM / PD
GEM_RESIDUAL_TOLERANCE = 1e-6
GC_TAIL_EPSILON = 1e-16

# prefactor quadrature
PREFACTOR_REL_TOLERANCE = 1e-4

SUPPORTED_FORMATS = ("csv", "json")


def get_output_filename(command, fmt="csv", suffix=""):
    """Default output path for a command"""
    name = f"{command}{suffix}.{fmt}"
    return OUTPUT_DIR / name


def get_custom_output_filename(base_path, suffix, fmt=None):
    """Sibling file next to a user supplied output path, e.g. out.csv -> out_summary.json"""
    base_path = Path(base_path)
    ext = f".{fmt}" if fmt else base_path.suffix
    return base_path.with_name(f"{base_path.stem}{suffix}{ext}")


def is_supported_format(fmt):
    return fmt in SUPPORTED_FORMATS
