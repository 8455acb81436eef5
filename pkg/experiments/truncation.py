"""
Resolvent flow across truncation levels: how fast nu_{n,m}(P_{z_n})
approaches nu_n(P_{z_n}) as m grows, on coupled trials.
"""

import logging

import numpy as np

from analysis.scaling import (
    delta_for,
    fit_log2_slope,
    is_strictly_decreasing,
    mean_and_error,
    truncation_reference_log2,
)
from ensemble.ultrametric_ensemble import UltrametricEnsemble
from errors import DomainError, NumericalError
from experiments.result_table import ResultTable
from experiments.trials import map_trials
from spectral.eigensolver import direct_sum_spectrum, eigh
from spectral.resolvent import ComplexEnergy, nu_trace

logger = logging.getLogger(__name__)

# desk-scale decay target in bits per unit m
TARGET_SLOPE = -1.0


def truncation_spectrum(ensemble, trial, m):
    """Eigenvalues of H_{n,m} as the union of its diagonal block spectra."""
    spectra = [
        eigh(block, want_vectors=False, meta={"trial": trial, "block": index})
        for index, block in ensemble.truncation_blocks(trial, m)
    ]
    return direct_sum_spectrum(spectra, meta={"trial": trial, "m": m})


def _truncation_traces(config, trial, levels):
    ensemble = UltrametricEnsemble(config.params)
    z = ComplexEnergy.zoom(config.energy, config.z, config.params.n)
    return {m: nu_trace(truncation_spectrum(ensemble, trial, m), z) for m in levels}


def _slope_flag(trend, slope):
    if slope > TARGET_SLOPE:
        logger.warning("fitted log2 slope %.3f is above %.1f", slope, TARGET_SLOPE)
        return ";".join(filter(None, [trend, "slope_above_target"]))
    return trend


def truncation_flow(config):
    """
    Mean |nu_n - nu_{n,m}|(P_{z_n}) for every m of the range, with the
    log2 slope over m < n and the reference line 3(n - (1 + c/6) m).

    H_n and every H_{n,m} of a trial share their Gaussian blocks, so the
    m = n row is zero exactly. The telescoping increments
    |nu_{n,k} - nu_{n,k-1}| are reported alongside.

    A second slope is fitted over the upper half of the m < n range. Either
    slope above -1 bit per level carries the flag slope_above_target.
    """
    params = config.params
    n = params.n
    m_range = sorted(set(config.truncation_range))
    if not m_range:
        raise DomainError("truncation flow needs a non-empty m range")
    if m_range[0] < 0 or m_range[-1] > n:
        raise DomainError(f"m range {m_range} outside [0, {n}]")
    if not complex(config.z).imag > 0:
        raise DomainError(f"z must lie in the upper half plane, got {config.z}")

    needed = sorted(set(m_range) | {m - 1 for m in m_range if m > 0} | {n})
    echo = config.echo()
    table = ResultTable("truncation-flow")
    batch = table.record_failures(
        map_trials(_truncation_traces, config, description="truncation-flow", levels=tuple(needed))
    )
    traces = batch.values
    trials = len(traces)
    if not traces:
        raise NumericalError("truncation-flow: every trial failed in the eigensolver")

    errors = {}
    for m in m_range:
        differences = np.array([abs(trace[n] - trace[m]) for trace in traces])
        errors[m], error = mean_and_error(differences)
        table.add(echo, "truncation_error", errors[m], error, trials, m=m)
        table.add(echo, "truncation_reference_log2", truncation_reference_log2(n, m, params.c),
                  float("nan"), 0, m=m)
        if m > 0:
            increments = np.array([abs(trace[m] - trace[m - 1]) for trace in traces])
            table.add(echo, "truncation_increment", *mean_and_error(increments), trials, m=m)

    below = [m for m in m_range if m < n]
    if len(below) > 1:
        values = [errors[m] for m in below]
        slope, error = fit_log2_slope(below, values)
        trend = "decreasing" if is_strictly_decreasing(values) else "not_decreasing"
        table.add(echo, "truncation_log2_slope", slope, error, trials, _slope_flag(trend, slope), m_from=below[0])
        # small m sits before the geometric regime; the upper half of the range is fitted on its own
        tail = below[len(below) // 2:]
        if len(tail) > 1:
            tail_slope, tail_error = fit_log2_slope(tail, [errors[m] for m in tail])
            table.add(echo, "truncation_tail_log2_slope", tail_slope, tail_error, trials,
                      _slope_flag("", tail_slope), m_from=tail[0])
        table.add(echo, "truncation_reference_slope", -3.0 * (1.0 + delta_for(params.c)), float("nan"), 0)
    logger.info("truncation flow over m=%s done on %d trials", m_range, trials)
    return table.finish()
