"""
Scaling analysis across sweeps: log2 slope fits, monotone trend checks,
the exponent bookkeeping of the localization and truncation bounds,
and standard errors for summary statistics.
"""

import math

import numpy as np
from scipy import stats


def fit_log2_slope(xs, values):
    """
    Least-squares slope of log2(values) against xs.

    Non-positive values carry no log and are skipped.

    Args:
        xs: Abscissae (levels m or n)
        values: Positive statistics

    Returns:
        tuple: (slope, standard_error); NaNs when fewer than 2 usable points
    """
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    usable = np.isfinite(values) & (values > 0)
    if np.count_nonzero(usable) < 2:
        return float("nan"), float("nan")
    if np.count_nonzero(usable) == 2:
        x, y = xs[usable], np.log2(values[usable])
        return float((y[1] - y[0]) / (x[1] - x[0])), 0.0
    fit = stats.linregress(xs[usable], np.log2(values[usable]))
    return float(fit.slope), float(fit.stderr)


def is_strictly_decreasing(values):
    values = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(values) < 0))


def is_non_increasing(values):
    values = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(values) <= 0))


def delta_for(c):
    """delta = c/6, the gain per level of the resolvent-flow bound."""
    return c / 6.0


def localization_exponent(c, w, epsilon, ell_loc):
    """
    2 mu = (1 - eps)(3(1 + delta) - 1) - (3(1 + l) - 1) - w with delta = c/6.

    Positive values give the decay rate of the localization tail bound.
    """
    delta = delta_for(c)
    return (1.0 - epsilon) * (3.0 * (1.0 + delta) - 1.0) - (3.0 * (1.0 + ell_loc) - 1.0) - w


def truncation_reference_log2(ell, m, c):
    """log2 of the truncation bound 2^{3(l - (1+delta)m)} with C_z = 1."""
    return 3.0 * (ell - (1.0 + delta_for(c)) * m)


def counting_bound_shape(n, m, box_width, ell):
    """2^{n-m} (|B| 2^{m-n})^l / l!, the multi-point counting bound with C = 1."""
    return 2.0 ** (n - m) * (box_width * 2.0 ** (m - n)) ** ell / math.factorial(ell)


def truncation_level(n, epsilon):
    """m_n = ceil((1 - eps) n)."""
    return int(math.ceil((1.0 - epsilon) * n - 1e-12))


def mean_and_error(values):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return float("nan"), float("nan")
    error = values.std(ddof=1) / np.sqrt(values.size) if values.size > 1 else 0.0
    return float(values.mean()), float(error)


def quantile_and_error(values, q, rng, n_resamples=400):
    """
    Quantile with a bootstrap standard error.

    Args:
        values: Sample
        q: Quantile in [0, 1]
        rng: np.random.Generator driving the resampling
        n_resamples: Bootstrap replicates

    Returns:
        tuple: (quantile, standard_error)
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return float("nan"), float("nan")
    estimate = float(np.quantile(values, q))
    if values.size < 2 or np.all(values == values[0]):
        return estimate, 0.0
    result = stats.bootstrap(
        (values,),
        lambda sample, axis: np.quantile(sample, q, axis=axis),
        n_resamples=n_resamples,
        method="percentile",
        random_state=rng,
    )
    return estimate, float(result.standard_error)


def median_standard_error(values, seed, n_resamples=400):
    """Median with a bootstrap standard error drawn from a seeded Philox stream."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    return quantile_and_error(values, 0.5, rng, n_resamples)
