import pytest

from ensemble.parameters import EnsembleParams, Symmetry
from experiments.config import ExperimentConfig


@pytest.fixture
def small_params():
    return EnsembleParams(n=5, c=1.0, master_seed=20240517)


@pytest.fixture
def unitary_params():
    return EnsembleParams(n=5, c=1.0, symmetry=Symmetry.UNITARY, master_seed=11)


@pytest.fixture
def make_config():
    """Factory for cheap single-worker configurations."""
    def make(n=6, c=1.0, seed=3, trials=4, **overrides):
        params = EnsembleParams(n=n, c=c, master_seed=seed)
        overrides.setdefault("workers", 1)
        return ExperimentConfig(params=params, trials=trials, **overrides)
    return make
