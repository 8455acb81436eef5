"""
Poisson-side experiments: local eigenvalue statistics of H_n around E,
and the counting hypotheses measured block by block on H_{n,m_n}.
"""

import logging

import numpy as np

from analysis.scaling import (
    counting_bound_shape,
    fit_log2_slope,
    is_strictly_decreasing,
    mean_and_error,
    truncation_level,
)
from ensemble.ultrametric_ensemble import UltrametricEnsemble
from errors import DomainError, InsufficientDataError, NumericalError
from experiments.result_table import ResultTable
from experiments.trials import map_trials
from observables.point_process import (
    count_distribution,
    density_at,
    gap_ratios,
    ks_distance,
    laplace_functional,
    rescale,
    rescaled_kernel_sum,
    tiled_box_counts,
    unfolded_gaps,
)
from observables.references import (
    GAP_RATIO_MEANS,
    POISSON_GAP_RATIO_MEAN,
    poisson_laplace_functional,
    surmise_for,
)
from spectral.eigensolver import direct_sum_spectrum, eigh
from spectral.resolvent import ComplexEnergy

logger = logging.getLogger(__name__)

MIN_WINDOW_POINTS = 3
SPARSE_TRIAL_FRACTION = 0.5
MAX_WIDENINGS = 8
BLOCK_IDENTITY_TOLERANCE = 1e-10
COUNT_LEVELS = (1, 2, 3)


def regime_flag(c):
    """'exploratory' where the Poisson-side statements are not expected to apply."""
    if c <= 0:
        logger.warning("c=%s <= 0: Poisson-side results are exploratory", c)
        return "exploratory"
    return ""


def sweep_label(levels):
    return ",".join(str(level) for level in levels)


def _values_spectrum(config, trial):
    ensemble = UltrametricEnsemble(config.params)
    return eigh(ensemble.assemble(trial), want_vectors=False, meta={"trial": trial})


def require_trials(batch, experiment):
    if not batch.values:
        raise NumericalError(f"{experiment}: every trial failed in the eigensolver")
    return batch.values


# -----------------------
# LOCAL WINDOW
# -----------------------
def local_samples(spectra, config, density):
    """
    Rescaled samples around E in a window expected to hold about
    config.window_eigenvalues points.

    The window is doubled (with a warning) while more than half of the
    trials capture fewer than 3 points.

    Returns:
        tuple: (half_width in rescaled units, list of PointSample)
    """
    if config.window_half_width is not None:
        half_width = float(config.window_half_width)
    elif density > 0:
        half_width = config.window_eigenvalues / (2.0 * density)
    else:
        half_width = spectra[0].dimension * config.dos_bandwidth
    if not half_width > 0:
        raise DomainError(f"window half-width must be positive, got {half_width}")

    samples = [rescale(s, config.energy, half_width) for s in spectra]
    for _ in range(MAX_WIDENINGS):
        sparse = np.mean([len(sample) < MIN_WINDOW_POINTS for sample in samples])
        if sparse <= SPARSE_TRIAL_FRACTION:
            break
        logger.warning(
            "window |t| <= %.4g holds < %d points in %.0f%% of trials; widening to %.4g",
            half_width, MIN_WINDOW_POINTS, 100 * sparse, 2 * half_width,
        )
        half_width *= 2.0
        samples = [rescale(s, config.energy, half_width) for s in spectra]
    return half_width, samples


# -----------------------
# POISSON TEST
# -----------------------
def poisson_test(config):
    """
    Local statistics of 2^n (lambda - E) against a Poisson process of
    intensity nu(E).

    Reports the gap-ratio mean, KS distances of unfolded gaps, the count
    index of dispersion in boxes of width box_width, nu(E)|B|, and the
    Laplace functional E exp(-mu(P_z)) next to its Poisson prediction.
    """
    params = config.params
    echo = config.echo()
    table = ResultTable("poisson-test")
    flag = regime_flag(params.c)

    batch = table.record_failures(map_trials(_values_spectrum, config, description="poisson-test"))
    spectra = require_trials(batch, "poisson-test")
    trials = len(spectra)

    density, density_error = density_at(spectra, config.energy, config.dos_bandwidth)
    half_width, samples = local_samples(spectra, config, density)
    sizes = np.array([len(sample) for sample in samples], dtype=float)
    table.add(echo, "density_at_energy", density, density_error, trials, flag, energy=config.energy)
    table.add(echo, "window_half_width", half_width, float("nan"), trials, flag)
    table.add(echo, "window_points", *mean_and_error(sizes), trials, flag)

    # gap ratios
    per_trial, pooled = [], []
    for sample in samples:
        if len(sample) < MIN_WINDOW_POINTS:
            continue
        try:
            ratios = gap_ratios(sample)
        except InsufficientDataError:
            continue
        per_trial.append(ratios.mean())
        pooled.append(ratios)
    if pooled:
        _, error = mean_and_error(per_trial)
        table.add(echo, "gap_ratio_mean", np.concatenate(pooled).mean(), error, len(per_trial), flag)
    else:
        logger.warning("no trial produced gap ratios")
    table.add(echo, "gap_ratio_poisson_reference", POISSON_GAP_RATIO_MEAN, 0.0, 0, flag)
    table.add(echo, f"gap_ratio_{params.symmetry.value}_reference", GAP_RATIO_MEANS[params.symmetry], 0.0, 0, flag)

    # unfolded gaps
    gaps = np.concatenate([np.empty(0)] + [unfolded_gaps(s) for s in samples if len(s) >= MIN_WINDOW_POINTS])
    for reference in ("poisson", surmise_for(params.symmetry)):
        try:
            distance = ks_distance(gaps, reference)
        except InsufficientDataError as exc:
            logger.warning("KS distance to %s skipped: %s", reference, exc)
            continue
        table.add(echo, f"ks_{reference}", distance, float("nan"), trials, flag, gap_count=int(gaps.size))

    # box counts
    try:
        counts = tiled_box_counts(samples, config.box_width)
    except InsufficientDataError as exc:
        logger.warning("box counts skipped: %s", exc)
    else:
        statistics = count_distribution(counts, (0.0, config.box_width))
        boxes = {"box": config.box_width, "box_count": statistics.sample_count}
        table.add(echo, "count_dispersion", statistics.dispersion, statistics.dispersion_error, trials, flag, **boxes)
        table.add(echo, "count_mean", statistics.mean,
                  np.sqrt(statistics.variance / statistics.sample_count), trials, flag, **boxes)
        table.add(echo, "intensity_box", density * config.box_width, density_error * config.box_width,
                  trials, flag, **boxes)

    # Laplace functional
    z = ComplexEnergy.from_complex(config.z)
    value, error = laplace_functional([rescaled_kernel_sum(sample, z) for sample in samples])
    table.add(echo, "laplace_functional", value, error, trials, flag, z=str(config.z))
    table.add(echo, "laplace_poisson_prediction", poisson_laplace_functional(density, z),
              float("nan"), trials, flag, z=str(config.z))
    return table.finish()


# -----------------------
# COMPONENT COUNTING
# -----------------------
def _block_counting_trial(config, trial, m):
    params = config.params
    ensemble = UltrametricEnsemble(params)
    scale = float(params.dimension)
    low, high = -config.box_width / 2.0, config.box_width / 2.0

    spectra = []
    counts = np.zeros(2 ** (params.n - m), dtype=int)
    for index, block in ensemble.truncation_blocks(trial, m):
        spectrum = eigh(block, want_vectors=False, meta={"trial": trial, "block": index})
        points = scale * (spectrum.eigenvalues - config.energy)
        counts[index] = np.count_nonzero((points >= low) & (points < high))
        spectra.append(spectrum)

    union = direct_sum_spectrum(spectra, meta={"trial": trial, "m": m})
    whole = eigh(ensemble.assemble(trial, m), want_vectors=False)
    identity_error = float(np.max(np.abs(whole.eigenvalues - union.eigenvalues)))
    local = np.count_nonzero(np.abs(union.eigenvalues - config.energy) <= config.dos_bandwidth)
    return counts, identity_error, local / (scale * 2.0 * config.dos_bandwidth)


def counting_level(n, epsilon):
    m = truncation_level(n, epsilon)
    if not 0 < m < n:
        raise DomainError(f"m_n = {m} for n={n}, epsilon={epsilon} is outside (0, n)")
    return m


def component_counting(config):
    """
    X(n, l) = sum_j P(mu_{m_n, j}(B) >= l) over the independent diagonal
    blocks of H_{n,m_n}, for l = 1, 2, 3 and every n of the sweep.

    Each block is diagonalized on its own; the union of block spectra is
    checked against the whole truncated matrix.
    """
    if config.box_width < 0:
        raise DomainError(f"box width must be non-negative, got {config.box_width}")
    levels = config.levels
    truncations = {n: counting_level(n, config.epsilon) for n in levels}
    table = ResultTable("counting")
    flag = regime_flag(config.params.c)

    second_moments = []
    for n in levels:
        cell = config.at(n=n)
        echo = cell.echo()
        m = truncations[n]
        labels = {"m": m, "box": config.box_width}
        batch = table.record_failures(
            map_trials(_block_counting_trial, cell, description=f"counting n={n}", m=m)
        )
        results = require_trials(batch, "counting")
        trials = len(results)

        exceedances = np.array([[np.count_nonzero(counts >= ell) for ell in COUNT_LEVELS] for counts, _, _ in results])
        for column, ell in enumerate(COUNT_LEVELS):
            value, error = mean_and_error(exceedances[:, column])
            table.add(echo, "x_count", value, error, trials, flag, ell=ell, **labels)
            table.add(echo, "x_count_bound_shape", counting_bound_shape(n, m, config.box_width, ell),
                      float("nan"), 0, flag, ell=ell, **labels)
            if ell == 2:
                second_moments.append(value)

        density, density_error = mean_and_error([density for _, _, density in results])
        table.add(echo, "intensity_box", density * config.box_width, density_error * config.box_width,
                  trials, flag, **labels)

        identity_error = max(error for _, error, _ in results)
        row_flag = flag
        if identity_error > BLOCK_IDENTITY_TOLERANCE:
            logger.warning("block spectra differ from H_{%d,%d} by %.3e", n, m, identity_error)
            row_flag = ";".join(filter(None, [flag, "block_identity_violation"]))
        table.add(echo, "block_identity_max_error", identity_error, float("nan"), trials, row_flag, **labels)

    if len(levels) > 1:
        slope, error = fit_log2_slope(levels, second_moments)
        trend = "decreasing" if is_strictly_decreasing(second_moments) else "not_decreasing"
        table.add(config.echo(), "x_count_log2_slope", slope, error, config.trials,
                  ";".join(filter(None, [flag, trend])), ell=2, box=config.box_width, n_values=sweep_label(levels))
    return table.finish()
