"""
Command-line front end: argument parsing, config resolution, experiment
dispatch and output files.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

import laboratory
from cli.config import (
    build_config,
    config_to_values,
    load_config_file,
    parse_assignment,
    resolve_values,
    validate,
)
from errors import ConfigError, DomainError, InsufficientDataError, NumericalError
from reporting.table_text import get_table_summary_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

OUTPUT_ENV = "ULTRAMETRIC_LAB_OUT"
DEFAULT_OUTPUT = "./results"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# flag dest -> dotted config key
FLAG_KEYS = {
    "n": "params.n",
    "c": "params.c",
    "symmetry": "params.symmetry",
    "normalized": "params.normalized",
    "seed": "params.seed",
    "energy": "energy",
    "trials": "trials",
    "trial": "trial",
    "m": "m",
    "w": "w",
    "epsilon": "epsilon",
    "ell_loc": "ell_loc",
    "z": "z",
    "m_range": "m_range",
    "n_values": "n_values",
    "c_values": "c_values",
    "box_width": "box_width",
    "sites_per_trial": "sites_per_trial",
    "window_eigenvalues": "window_eigenvalues",
    "window_half_width": "window_half_width",
    "dos_bins": "dos_bins",
    "dos_range": "dos_range",
    "dos_bandwidth": "dos_bandwidth",
    "bulk_half_width": "bulk_half_width",
    "workers": "workers",
}


class LabArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors surface as ConfigError (exit 1)."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _common_options():
    common = LabArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file or manifest.json to replay")
    common.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or {DEFAULT_OUTPUT})")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one config key")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    for dest in FLAG_KEYS:
        common.add_argument(f"--{dest.replace('_', '-')}", dest=dest, metavar="VALUE",
                            help=f"sets {FLAG_KEYS[dest]}")
    return common


def build_parser():
    parser = LabArgumentParser(prog="ultrametric-lab", description="Ultrametric random matrix laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {laboratory.__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True, parser_class=LabArgumentParser)
    common = _common_options()
    for name in laboratory.SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


def configure_logging(verbose=False, quiet=False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def resolve_config(args):
    """DEFAULTS -> config file -> --set -> dedicated flags."""
    file_values = load_config_file(args.config) if args.config else {}
    assignments = dict(parse_assignment(text) for text in args.set)
    flags = {key: getattr(args, dest) for dest, key in FLAG_KEYS.items() if getattr(args, dest) is not None}
    return build_config(resolve_values(file_values, assignments, flags))


def output_directory(args):
    return Path(args.out or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)


def write_outputs(result, config, out):
    """
    <out>/<subcommand>.csv, <out>/<subcommand>.json, <out>/manifest.json,
    and one .npy per array the subcommand produced.
    """
    out.mkdir(parents=True, exist_ok=True)
    result.table.to_csv(out / f"{result.subcommand}.csv")
    result.table.to_json(out / f"{result.subcommand}.json")
    for name, array in result.arrays.items():
        np.save(out / f"{name}.npy", array)
    manifest = {
        "subcommand": result.subcommand,
        "version": laboratory.__version__,
        "seed": config.params.master_seed,
        "config": config_to_values(config),
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")
    logger.info("wrote %s outputs to %s", result.subcommand, out)


def run(argv=None):
    """
    Execute one invocation.

    Args:
        argv: Argument list (default: sys.argv[1:])

    Returns:
        int: exit code
    """
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose, args.quiet)
        config = resolve_config(args)
        violations = validate(config)
        for severity, message in violations:
            if severity == "warning":
                logger.warning(message)
        errors = [message for severity, message in violations if severity == "error"]
        if errors:
            raise ConfigError("; ".join(errors))
    except ConfigError as exc:
        configure_logging()
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG

    logger.info("params.seed=%d", config.params.master_seed)
    out = output_directory(args)
    try:
        result = laboratory.run_experiment(args.subcommand, config)
    except NumericalError as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (DomainError, InsufficientDataError) as exc:
        logger.error("invalid run: %s", exc)
        return EXIT_CONFIG

    write_outputs(result, config, out)
    print(get_table_summary_text(result.table))
    if result.solver_failures:
        logger.error("%d trial(s) failed in the eigensolver; partial results written", result.solver_failures)
        return EXIT_NUMERICAL
    return EXIT_OK


def main():
    sys.exit(run())
