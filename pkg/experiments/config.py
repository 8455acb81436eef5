"""
Experiment configuration: the ensemble parameters plus every knob the
Monte Carlo experiments read.
"""

import os
from dataclasses import dataclass, field, replace
from typing import Optional

from ensemble.parameters import EnsembleParams
from errors import DomainError


def default_workers():
    return max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Resolved configuration of one run.

    Energies and window widths are absolute; box widths and window
    half-widths in rescaled units 2^n (lambda - E). A window_half_width of
    None lets poisson_test choose one from the local density.
    """

    params: EnsembleParams
    energy: float = 0.0
    trials: int = 100
    trial: int = 0
    m: Optional[int] = None
    w: float = 0.2
    epsilon: float = 0.25
    ell_loc: float = 0.3
    z: complex = 1j
    m_range: Optional[tuple] = None
    n_values: Optional[tuple] = None
    c_values: Optional[tuple] = None
    box_width: float = 4.0
    sites_per_trial: int = 8
    window_eigenvalues: int = 200
    window_half_width: Optional[float] = None
    dos_bins: int = 40
    dos_range: tuple = (-2.5, 2.5)
    dos_bandwidth: float = 0.05
    bulk_half_width: float = 0.5
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be at least 1, got {self.trials}")
        if self.workers < 1:
            raise DomainError(f"workers must be at least 1, got {self.workers}")
        if self.m is not None and not 0 <= self.m <= self.params.n:
            raise DomainError(f"m={self.m} outside [0, {self.params.n}]")
        if self.dos_range[0] >= self.dos_range[1]:
            raise DomainError(f"DOS range {self.dos_range} is empty")
        object.__setattr__(self, "z", complex(self.z))
        for name in ("m_range", "n_values", "c_values"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(value))

    @property
    def truncation(self):
        return self.params.n if self.m is None else self.m

    @property
    def levels(self):
        """n-sweep of the run; the single level params.n when unset."""
        return self.n_values if self.n_values is not None else (self.params.n,)

    @property
    def couplings(self):
        return self.c_values if self.c_values is not None else (self.params.c,)

    @property
    def truncation_range(self):
        return self.m_range if self.m_range is not None else tuple(range(self.params.n + 1))

    def at(self, n=None, c=None):
        """Copy with the ensemble moved to level n and coupling c."""
        params = self.params
        if n is not None:
            params = params.with_level(n)
        if c is not None:
            params = params.with_coupling(c)
        m = self.m if self.m is None or self.m <= params.n else params.n
        return replace(self, params=params, m=m)

    def echo(self):
        """Columns repeated on every result row."""
        echo = self.params.as_dict()
        echo["trials"] = self.trials
        return echo
