"""
Bounded worker pool for independent Monte Carlo trials.

Each trial is a pure function of (config, trial id); results are
collected in trial order so aggregates do not depend on scheduling.
"""

import logging
from dataclasses import dataclass
from functools import partial
from typing import Any, Optional

from joblib import Parallel, delayed
from threadpoolctl import threadpool_limits
from tqdm import tqdm

from errors import NumericalError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    value: Any = None
    error: Optional[str] = None

    @property
    def failed(self):
        return self.error is not None


@dataclass(frozen=True)
class TrialBatch:
    """Successful trial values in trial order plus the failed trial ids."""

    values: list
    failed_trials: list

    @property
    def failure_count(self):
        return len(self.failed_trials)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _guarded(function, trial):
    # one BLAS thread per trial keeps LAPACK results independent of the pool size
    with threadpool_limits(limits=1):
        try:
            return TrialOutcome(trial, function(trial))
        except NumericalError as exc:
            return TrialOutcome(trial, error=str(exc))


def run_trials(function, trial_ids, workers=1, description=None):
    """
    Evaluate function(trial) for every trial id on a pool of workers.

    Args:
        function: Picklable callable of one trial id
        trial_ids: Iterable of non-negative integers
        workers: Pool size (1 runs in-process)
        description: Progress bar label

    Returns:
        TrialBatch
    """
    trial_ids = list(trial_ids)
    jobs = (delayed(_guarded)(function, trial) for trial in trial_ids)
    pool = Parallel(n_jobs=workers, return_as="generator_unordered" if workers > 1 else "generator")
    outcomes = list(tqdm(pool(jobs), total=len(trial_ids), desc=description, disable=None, leave=False))
    outcomes.sort(key=lambda outcome: outcome.trial)

    failed = [outcome.trial for outcome in outcomes if outcome.failed]
    for outcome in outcomes:
        if outcome.failed:
            logger.warning("trial %d dropped after solver failure: %s", outcome.trial, outcome.error)
    return TrialBatch([outcome.value for outcome in outcomes if not outcome.failed], failed)


def map_trials(function, config, description=None, **kwargs):
    """run_trials over trials 0..config.trials-1 with function(config, trial, **kwargs)."""
    return run_trials(
        partial(function, config, **kwargs),
        range(config.trials),
        workers=config.workers,
        description=description,
    )
