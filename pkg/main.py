"""
main.py - command-line entry point of ipcondense (inclusion-process condensation experiments)
"""

import argparse
import json
import logging
import sys
from pathlib import Path

# make the project root importable when run as a script
current_dir = Path(__file__).parent
sys.path.insert(0, str(current_dir))

try:
    import config
    from pydantic import ValidationError
    from ipcondense.errors import ConfigError
    from ipcondense.experiments import COMMANDS, run_command
    from ipcondense.schemas import ALL_STATISTICS, ExperimentConfig
except ImportError as e:
    print(f"Error importing modules: {e}")
    print("Install the requirements with: pip install -r requirements.txt")
    sys.exit(1)

logger = logging.getLogger("ipcondense")


def check_dependencies():
    """Report missing third-party libraries"""
    missing_deps = []
    for module, package in (("numpy", "numpy"), ("scipy", "scipy"), ("numba", "numba"), ("pydantic", "pydantic")):
        try:
            __import__(module)
        except ImportError:
            missing_deps.append(package)

    if missing_deps:
        print("Missing required libraries:")
        for dep in missing_deps:
            print(f"  - {dep}")
        print("\nInstall them with:")
        print("pip install -r requirements.txt")
        return False
    return True


def system_info():
    """Versions of the numerical stack, logged at debug level"""
    import numba
    import numpy
    import pydantic
    import scipy

    logger.debug(f"{config.PROJECT_NAME} {config.VERSION}, Python {sys.version.split()[0]}")
    logger.debug(f"numpy {numpy.__version__}, scipy {scipy.__version__}, "
                 f"numba {numba.__version__}, pydantic {pydantic.__version__}")


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps unset flags out of the namespace so the config file can supply them
    parser = argparse.ArgumentParser(
        prog="ipcondense",
        description="Condensation in the inclusion process: simulation, exact tables and rate functions.",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="experiment to run")
    parser.add_argument("--config", dest="config_file", type=Path, help="JSON file of config keys (flags win)")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    model = parser.add_argument_group("model")
    model.add_argument("--L", type=int, help="number of sites")
    model.add_argument("--N", type=int, help="number of particles (default rho*L, else L)")
    model.add_argument("--rho", type=float, help="density N/L when --N is absent")
    model.add_argument("--d", type=float, help="diffusion parameter")
    model.add_argument("--dl", type=float, help="d*L; mutually exclusive with --d")

    sim = parser.add_argument_group("simulation")
    sim.add_argument("--kind", choices=["cg", "ta", "zrp"])
    sim.add_argument("--zrp-rates", choices=["inclusion", "ratio", "harmonic"])
    sim.add_argument("--seed", type=int)
    sim.add_argument("--replicas", type=int)
    sim.add_argument("--resamples", type=int)
    sim.add_argument("--samples", type=int, help="stationary samples per replica")
    sim.add_argument("--burn-in-factor", type=float)
    sim.add_argument("--jobs", type=int, help="worker processes for replicas")

    stats = parser.add_argument_group("statistics")
    stats.add_argument("--statistics", nargs="+", choices=list(ALL_STATISTICS))
    stats.add_argument("--k-max", type=int)
    stats.add_argument("--threshold", type=float, help="phase decomposition threshold K (default sqrt(N))")
    stats.add_argument("--moments", nargs="+", type=float)
    stats.add_argument("--tail-indices", nargs="+", type=int)
    stats.add_argument("--alpha", type=float, help="GEM parameter for gemtest --source gem")
    stats.add_argument("--source", choices=["gem", "simulation"])
    stats.add_argument("--draws", type=int)

    exact = parser.add_argument_group("exact / ldp / entropy")
    exact.add_argument("--truncation", type=int, help="maximal occupation M of the truncated table")
    exact.add_argument("--regime", choices=["fluid", "intermediate", "complete"])
    exact.add_argument("--speed", choices=["L", "dL", "logL"])
    exact.add_argument("--gamma", type=float, help="d = L^-gamma in the complete regime")
    exact.add_argument("--m-points", type=int)
    exact.add_argument("--L-min", type=int)
    exact.add_argument("--L-max", type=int)

    output = parser.add_argument_group("output")
    output.add_argument("--out", type=Path)
    output.add_argument("--format", choices=list(config.SUPPORTED_FORMATS))
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge the JSON config file under the command-line flags and validate"""
    values = {}
    flags = vars(args).copy()
    config_file = flags.pop("config_file", None)
    flags.pop("verbose", None)
    if config_file is not None:
        try:
            values = json.loads(Path(config_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {config_file}: {e}") from e
        if not isinstance(values, dict):
            raise ConfigError(f"config file {config_file} must hold a JSON object")
        if "d" in flags or "dl" in flags:
            # either flag replaces whichever of d, dl the file set
            values.pop("d", None)
            values.pop("dl", None)
    values.update(flags)
    return ExperimentConfig(**values)


def setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def run_cli_mode(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(getattr(args, "verbose", False))

    try:
        cfg = load_config(args)
    except (ConfigError, ValidationError) as e:
        logging.error(f"invalid configuration: {e}")
        return 2

    system_info()
    logger.info(f"{cfg.command}: L={cfg.L} seed={cfg.seed}")

    def progress_callback(message):
        logger.info(message)

    result = run_command(cfg, progress_callback=progress_callback)
    if result["success"]:
        logger.info(result["message"])
        for path in result.get("files", []):
            logger.info(f"wrote {path}")
    else:
        logger.error(f"{result['error_type']}: {result['error']}")
    return result["exit_code"]


def main(argv=None) -> int:
    if not check_dependencies():
        return 1
    return run_cli_mode(argv)


if __name__ == "__main__":
    sys.exit(main())
