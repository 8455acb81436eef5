"""
Single-realization tools: the sampled matrix H_{n,m}, its spectrum and the
pooled density of states, each with a table of sanity diagnostics.
"""

import logging

import numpy as np

from ensemble.ultrametric_ensemble import UltrametricEnsemble
from experiments.poisson_statistics import require_trials
from experiments.result_table import ResultTable
from experiments.trials import map_trials
from hierarchy.ultrametric import distance_matrix
from observables.point_process import dos_estimate, dos_l1_distance
from observables.references import semicircle_cdf, semicircle_density
from spectral.eigensolver import check_decomposition, eigh

logger = logging.getLogger(__name__)


def sample_run(config):
    """
    H_{n,m} of config.trial with its diagnostics.

    Returns:
        tuple: (ResultTable, {"sample": matrix})
    """
    params = config.params
    m = config.truncation
    matrix = UltrametricEnsemble(params).assemble(config.trial, m)
    echo = config.echo()
    labels = {"m": m, "trial": config.trial}
    magnitudes = np.abs(matrix) ** 2
    outside_support = distance_matrix(params.n) > m

    table = ResultTable("sample")
    table.add(echo, "dimension", matrix.shape[0], 0.0, 1, **labels)
    table.add(echo, "hermiticity_error", np.max(np.abs(matrix - matrix.conj().T)), 0.0, 1, **labels)
    table.add(echo, "max_abs_entry", np.max(np.abs(matrix)), 0.0, 1, **labels)
    table.add(echo, "mean_row_square_sum", magnitudes.sum(axis=1).mean(), 0.0, 1, **labels)
    table.add(echo, "support_violations", np.count_nonzero(matrix[outside_support]), 0.0, 1, **labels)
    return table.finish(), {"sample": matrix}


def spectrum_run(config):
    """
    Spectrum of H_{n,m} for config.trial with decomposition diagnostics.

    Returns:
        tuple: (ResultTable, {"spectrum": eigenvalues})
    """
    params = config.params
    m = config.truncation
    matrix = UltrametricEnsemble(params).assemble(config.trial, m)
    spectrum = eigh(matrix, meta={"trial": config.trial, "m": m}, check=False)
    orthonormality_error, residual = check_decomposition(matrix, spectrum.eigenvalues, spectrum.eigenvectors)
    trace_error = abs(float(np.trace(matrix).real) - float(spectrum.eigenvalues.sum()))

    echo = config.echo()
    labels = {"m": m, "trial": config.trial}
    table = ResultTable("spectrum")
    table.add(echo, "eigenvalue_min", spectrum.eigenvalues[0], 0.0, 1, **labels)
    table.add(echo, "eigenvalue_max", spectrum.eigenvalues[-1], 0.0, 1, **labels)
    table.add(echo, "trace_error", trace_error, 0.0, 1, **labels)
    table.add(echo, "residual", residual, 0.0, 1, **labels)
    table.add(echo, "orthonormality_error", orthonormality_error, 0.0, 1, **labels)
    return table.finish(), {"spectrum": spectrum.eigenvalues}


def _dos_spectrum(config, trial):
    matrix = UltrametricEnsemble(config.params).assemble(trial, config.truncation)
    return eigh(matrix, want_vectors=False, meta={"trial": trial})


def dos_run(config):
    """Pooled DOS histogram, one row per bin, plus the semicircle L1 distance."""
    table = ResultTable("dos")
    batch = table.record_failures(map_trials(_dos_spectrum, config, description="dos"))
    spectra = require_trials(batch, "dos")
    dos = dos_estimate(spectra, config.dos_bins, config.dos_range)
    echo = config.echo()
    m = config.truncation

    for low, high, density, error in zip(dos.edges[:-1], dos.edges[1:], dos.densities, dos.standard_errors):
        table.add(echo, "density", density, error, dos.trial_count, m=m, bin_low=low, bin_high=high,
                  semicircle=float(semicircle_density(0.5 * (low + high))))
    table.add(echo, "captured_fraction", dos.captured_fraction, float("nan"), dos.trial_count, m=m)
    table.add(echo, "dos_l1_semicircle", dos_l1_distance(dos, semicircle_cdf), float("nan"), dos.trial_count, m=m)
    return table.finish(), {}
