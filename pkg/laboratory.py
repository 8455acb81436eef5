"""
Experiment registry: maps every subcommand onto the function that runs
it and collects the result table with any arrays it produced.
"""

import logging
from dataclasses import dataclass, field

from errors import ConfigError
from experiments.diagnostics import dos_run, sample_run, spectrum_run
from experiments.localization import delocalization_run, localization_run
from experiments.phase_diagram import phase_sweep
from experiments.poisson_statistics import component_counting, poisson_test
from experiments.truncation import truncation_flow

__version__ = "0.1.0"

logger = logging.getLogger(__name__)

TOOLS = {
    "sample": sample_run,
    "spectrum": spectrum_run,
    "dos": dos_run,
}

EXPERIMENTS = {
    "poisson-test": poisson_test,
    "counting": component_counting,
    "truncation-flow": truncation_flow,
    "localization": localization_run,
    "delocalization": delocalization_run,
    "sweep": phase_sweep,
}

SUBCOMMANDS = tuple(TOOLS) + tuple(EXPERIMENTS)


@dataclass
class LabResult:
    subcommand: str
    table: object
    arrays: dict = field(default_factory=dict)

    @property
    def solver_failures(self):
        return self.table.solver_failures


def run_experiment(subcommand, config):
    """
    Run one subcommand on a resolved configuration.

    Args:
        subcommand: One of SUBCOMMANDS
        config: ExperimentConfig

    Returns:
        LabResult
    """
    if subcommand in TOOLS:
        table, arrays = TOOLS[subcommand](config)
        return LabResult(subcommand, table, arrays)
    if subcommand in EXPERIMENTS:
        logger.info("running %s with %d trial(s) on %d worker(s)", subcommand, config.trials, config.workers)
        return LabResult(subcommand, EXPERIMENTS[subcommand](config))
    raise ConfigError(f"unknown subcommand {subcommand!r}")
