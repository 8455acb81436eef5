"""
Eigenvector experiments on both sides of the transition: eigenfunction
correlator mass outside B_{m_n}(x) and Green-function tails (localized
side), IPR, sup-norms, DOS and gap ratios of bulk eigenvectors
(delocalized side).
"""

import logging

import numpy as np

from analysis.scaling import (
    fit_log2_slope,
    is_strictly_decreasing,
    localization_exponent,
    mean_and_error,
    median_standard_error,
    quantile_and_error,
    truncation_level,
)
from ensemble.moments import spread
from ensemble.parameters import auxiliary_stream
from ensemble.ultrametric_ensemble import UltrametricEnsemble
from errors import DomainError, InsufficientDataError
from experiments.poisson_statistics import regime_flag, require_trials, sweep_label
from experiments.result_table import ResultTable
from experiments.trials import map_trials
from hierarchy.ultrametric import HierarchyIndex, ball
from observables.eigenvectors import SpectralWindow, mass_outside_ball, window_vector_statistics
from observables.point_process import dos_estimate, dos_l1_distance, gap_ratios, rescale
from observables.references import GAP_RATIO_MEANS, PORTER_THOMAS_IPR, semicircle_cdf
from spectral.eigensolver import Spectrum, eigh
from spectral.resolvent import ComplexEnergy, green_row

logger = logging.getLogger(__name__)

SITE_PURPOSE = 0
BOOTSTRAP_PURPOSE = 1
SPARSE_WINDOW_RATE = 0.9


def _check_unit_interval(**values):
    for name, value in values.items():
        if not 0 < value < 1:
            raise DomainError(f"{name} must lie in (0, 1), got {value}")


def sample_sites(config, trial):
    """Uniform sites x of a trial, drawn from its auxiliary substream."""
    params = config.params
    rng = auxiliary_stream(params.master_seed, trial, SITE_PURPOSE).generator()
    offsets = rng.integers(0, params.dimension, size=config.sites_per_trial)
    return [HierarchyIndex.from_offset(offset, params.n) for offset in offsets]


def green_truncation_error(spectrum, block_spectrum, x, m, z, full_row=None):
    """
    2^{-n} sum_y |G_n(x, y) - G_{n,m}(x, y)| at z.

    G_{n,m}(x, .) lives on the ball B_m(x) and is computed from the
    spectrum of that diagonal block alone.
    """
    if full_row is None:
        full_row = green_row(spectrum, x, z)
    member = ball(x, m)
    local = HierarchyIndex.from_offset(x.offset - member.start + 1, m)
    truncated = np.zeros_like(full_row)
    truncated[member.as_slice()] = green_row(block_spectrum, local, z)
    return float(np.sum(np.abs(full_row - truncated)) / spectrum.dimension)


# -----------------------
# LOCALIZED SIDE
# -----------------------
def _localization_trial(config, trial, m):
    params = config.params
    n = params.n
    ensemble = UltrametricEnsemble(params)
    spectrum = eigh(ensemble.assemble(trial), meta={"trial": trial})
    window = SpectralWindow.mesoscopic(config.energy, n, config.w)
    z = ComplexEnergy(config.energy, 2.0 ** (-(1.0 + config.ell_loc) * n))
    in_window = int(np.count_nonzero(window.mask(spectrum.eigenvalues)))

    masses, tails, green_errors = [], [], []
    blocks = {}
    for x in sample_sites(config, trial):
        member = ball(x, m)
        if in_window:
            masses.append(mass_outside_ball(spectrum, x, m, window))
        row = green_row(spectrum, x, z)
        outside = np.ones(row.size, dtype=bool)
        outside[member.as_slice()] = False
        tails.append(float(np.sum(np.abs(row[outside].imag)) / spectrum.dimension))
        if member.index not in blocks:
            block = ensemble.assemble_block(trial, m, member.index)
            blocks[member.index] = eigh(block, meta={"trial": trial, "block": member.index})
        green_errors.append(green_truncation_error(spectrum, blocks[member.index], x, m, z, row))
    return in_window, masses, tails, green_errors


def localization_run(config):
    """
    Distribution of the correlator mass outside B_{m_n}(x) in the window
    E +/- 2^{-(1-w)n}, Green-function tails at E + i 2^{-(1+l)n}, and the
    Green truncation error, across the n-sweep.

    Quantiles are taken over trials whose window is non-empty; the rate of
    such trials is reported with them.
    """
    _check_unit_interval(w=config.w, epsilon=config.epsilon, ell_loc=config.ell_loc)
    levels = config.levels
    truncations = {n: truncation_level(n, config.epsilon) for n in levels}
    for n, m in truncations.items():
        if not 1 <= m <= n:
            raise DomainError(f"m_n = {m} for n={n} is outside [1, n]")

    table = ResultTable("localization")
    flag = regime_flag(config.params.c)
    two_mu = localization_exponent(config.params.c, config.w, config.epsilon, config.ell_loc)
    if two_mu <= 0:
        logger.warning("2mu = %.4f <= 0: no decay is predicted for these exponents", two_mu)

    medians = []
    for n in levels:
        cell = config.at(n=n)
        echo = cell.echo()
        m = truncations[n]
        labels = {"m": m, "w": config.w, "epsilon": config.epsilon}
        batch = table.record_failures(
            map_trials(_localization_trial, cell, description=f"localization n={n}", m=m)
        )
        results = require_trials(batch, "localization")
        trials = len(results)

        conditioned = [result for result in results if result[0] > 0]
        rate = len(conditioned) / trials
        row_flag = flag
        if rate < 1.0 - SPARSE_WINDOW_RATE:
            logger.warning("window is empty in %.0f%% of trials at n=%d", 100 * (1 - rate), n)
            row_flag = ";".join(filter(None, [flag, "sparse_window"]))
        table.add(echo, "conditioning_rate", rate, np.sqrt(rate * (1 - rate) / trials), trials, row_flag, **labels)

        masses = np.concatenate([np.empty(0)] + [np.asarray(result[1]) for result in conditioned])
        rng = auxiliary_stream(cell.params.master_seed, 0, BOOTSTRAP_PURPOSE).generator()
        median, median_error = quantile_and_error(masses, 0.5, rng)
        q90, q90_error = quantile_and_error(masses, 0.9, rng)
        table.add(echo, "mass_median", median, median_error, len(conditioned), row_flag, **labels)
        table.add(echo, "mass_q90", q90, q90_error, len(conditioned), row_flag, **labels)
        medians.append(median)

        tails = np.concatenate([np.asarray(result[2]) for result in results])
        table.add(echo, "green_tail_mean", *mean_and_error(tails), trials, flag,
                  eta_exponent=config.ell_loc, **labels)
        green_errors = np.concatenate([np.asarray(result[3]) for result in results])
        table.add(echo, "green_truncation_error_mean", *mean_and_error(green_errors), trials, flag,
                  eta_exponent=config.ell_loc, **labels)

    table.add(config.echo(), "two_mu_predicted", two_mu, float("nan"), 0,
              ";".join(filter(None, [flag, "" if two_mu > 0 else "non_positive"])),
              w=config.w, epsilon=config.epsilon, eta_exponent=config.ell_loc)
    if len(levels) > 1:
        slope, error = fit_log2_slope(levels, medians)
        trend = "decreasing" if is_strictly_decreasing(medians) else "not_decreasing"
        table.add(config.echo(), "mass_median_log2_slope", slope, error, config.trials,
                  ";".join(filter(None, [flag, trend])), n_values=sweep_label(levels))
    return table.finish()


# -----------------------
# DELOCALIZED SIDE
# -----------------------
def _delocalization_trial(config, trial):
    params = config.params
    spectrum = eigh(UltrametricEnsemble(params).assemble(trial), meta={"trial": trial})
    window = SpectralWindow(config.energy, config.bulk_half_width)
    iprs, sups = window_vector_statistics(spectrum, window)
    sample = rescale(spectrum, config.energy, spectrum.dimension * config.bulk_half_width)
    try:
        ratios = gap_ratios(sample)
    except InsufficientDataError:
        ratios = np.empty(0)
    values_only = Spectrum(spectrum.eigenvalues, None, dict(spectrum.meta))
    return values_only, iprs, sups, ratios


def delocalization_run(config):
    """
    Bulk eigenvector statistics: ipr * 2^n, sup-norm * 2^{n/2} and
    sup-norm * M_n^{1/2}, the DOS L1 distance to the semicircle and the
    gap-ratio mean, across the n-sweep.
    """
    if not config.bulk_half_width > 0:
        raise DomainError(f"bulk half-width must be positive, got {config.bulk_half_width}")
    levels = config.levels
    table = ResultTable("delocalization")
    symmetry = config.params.symmetry

    ipr_medians = []
    for n in levels:
        cell = config.at(n=n)
        echo = cell.echo()
        batch = table.record_failures(
            map_trials(_delocalization_trial, cell, description=f"delocalization n={n}")
        )
        results = require_trials(batch, "delocalization")
        trials = len(results)
        dimension = 2 ** n
        seed = cell.params.master_seed

        iprs = np.concatenate([result[1] for result in results])
        sups = np.concatenate([result[2] for result in results])
        labels = {"bulk": config.bulk_half_width, "vector_count": int(iprs.size)}
        median, error = median_standard_error(iprs * dimension, seed)
        ipr_medians.append(median)
        table.add(echo, "ipr_scaled_median", median, error, trials, **labels)
        table.add(echo, "ipr_porter_thomas_reference", PORTER_THOMAS_IPR[symmetry], 0.0, 0)
        table.add(echo, "sup_scaled_median", *median_standard_error(sups * np.sqrt(dimension), seed), trials, **labels)
        table.add(echo, "sup_spread_scaled_median",
                  *median_standard_error(sups * np.sqrt(spread(n, cell.params.c)), seed), trials, **labels)

        dos = dos_estimate([result[0] for result in results], config.dos_bins, config.dos_range)
        table.add(echo, "dos_l1_semicircle", dos_l1_distance(dos, semicircle_cdf), float("nan"), trials,
                  bins=config.dos_bins)

        per_trial = [result[3].mean() for result in results if result[3].size]
        if per_trial:
            pooled = np.concatenate([result[3] for result in results])
            _, ratio_error = mean_and_error(per_trial)
            table.add(echo, "gap_ratio_mean", pooled.mean(), ratio_error, len(per_trial), bulk=config.bulk_half_width)
        table.add(echo, f"gap_ratio_{symmetry.value}_reference", GAP_RATIO_MEANS[symmetry], 0.0, 0)

    if len(levels) > 1:
        slope, error = fit_log2_slope(levels, ipr_medians)
        table.add(config.echo(), "ipr_scaled_log2_slope", slope, error, config.trials,
                  n_values=sweep_label(levels))
    return table.finish()
