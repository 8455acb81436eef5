"""
Point-process statistics of rescaled eigenvalues: density of states,
local samples 2^n(lambda - E), gaps and gap ratios, box counts,
KS distances and Laplace functionals.
"""

import logging
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy import stats

from errors import DomainError, InsufficientDataError
from observables.references import GAP_REFERENCES, poisson_gap_cdf, semicircle_cdf
from spectral.resolvent import poisson_kernel

logger = logging.getLogger(__name__)

# relative to the mean gap of the sample
DEGENERACY_TOLERANCE = 1e-12
MIN_KS_GAPS = 10


# -----------------------
# DOMAIN TYPES
# -----------------------
@dataclass(frozen=True, eq=False)
class PointSample:
    """Sorted rescaled eigenvalues of one trial inside |t| <= half_width."""

    points: np.ndarray
    trial: int
    energy: float
    scale: float
    half_width: float = np.inf

    def __post_init__(self):
        points = np.sort(np.asarray(self.points, dtype=float))
        if points.size and np.max(np.abs(points)) > self.half_width:
            raise DomainError("sample holds points outside its declared window")
        object.__setattr__(self, "points", points)

    def __len__(self):
        return int(self.points.size)


@dataclass(frozen=True, eq=False)
class DosEstimate:
    """Histogram density per site per unit energy, averaged over trials."""

    edges: np.ndarray
    densities: np.ndarray
    standard_errors: np.ndarray
    trial_count: int
    captured_fraction: float

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self):
        return np.diff(self.edges)


@dataclass(frozen=True, eq=False)
class CountingStatistics:
    """Distribution of the number of points in a fixed box across samples."""

    box: tuple
    counts: np.ndarray
    histogram: np.ndarray
    mean: float
    variance: float
    dispersion: float
    dispersion_error: float
    exceedance: dict = field(default_factory=dict)

    @property
    def sample_count(self):
        return int(self.counts.size)


def _by_trial(items):
    return sorted(items, key=lambda item: item.trial)


# -----------------------
# RESCALING
# -----------------------
def rescale(spectrum, energy, half_width=np.inf):
    """
    Local sample {2^n (lambda_j - E)} restricted to |t| <= half_width.

    Args:
        spectrum: Spectrum of a 2^n x 2^n matrix
        energy: Center E
        half_width: Window half-width in rescaled units (default: whole line)

    Returns:
        PointSample
    """
    scale = float(spectrum.dimension)
    points = scale * (spectrum.eigenvalues - energy)
    points = points[np.abs(points) <= half_width]
    return PointSample(points, spectrum.trial, float(energy), scale, float(half_width))


def rescaled_kernel_sum(sample, z):
    """mu(P_z) = sum over sample points of P_z."""
    return float(np.sum(poisson_kernel(sample.points, z)))


# -----------------------
# DENSITY OF STATES
# -----------------------
def _check_pool(spectra):
    spectra = _by_trial(spectra)
    if not spectra:
        raise InsufficientDataError("density of states needs at least one spectrum")
    if len({s.dimension for s in spectra}) != 1:
        raise DomainError("all spectra in a pool must share one dimension")
    return spectra


def dos_estimate(spectra, bins=40, energy_range=(-2.5, 2.5)):
    """
    Pooled density of states.

    Args:
        spectra: Iterable of Spectrum from one (n, c)
        bins: Number of bins or explicit bin edges
        energy_range: (low, high) used when bins is an integer

    Returns:
        DosEstimate
    """
    spectra = _check_pool(spectra)
    edges = np.histogram_bin_edges([], bins=bins, range=energy_range) if np.isscalar(bins) else np.asarray(bins, float)
    widths = np.diff(edges)
    per_trial = np.array([
        np.histogram(s.eigenvalues, bins=edges)[0] / (s.dimension * widths) for s in spectra
    ])
    trials = len(spectra)
    densities = per_trial.mean(axis=0)
    errors = per_trial.std(axis=0, ddof=1) / np.sqrt(trials) if trials > 1 else np.zeros_like(densities)
    captured = float(np.mean(per_trial @ widths))
    return DosEstimate(edges, densities, errors, trials, captured)


def density_at(spectra, energy, bandwidth=0.05):
    """
    nu(E) estimated as the fraction of eigenvalues within bandwidth of E.

    Returns:
        tuple: (density, standard_error)
    """
    spectra = _check_pool(spectra)
    values = np.array([
        np.count_nonzero(np.abs(s.eigenvalues - energy) <= bandwidth) / (s.dimension * 2.0 * bandwidth)
        for s in spectra
    ])
    error = values.std(ddof=1) / np.sqrt(values.size) if values.size > 1 else 0.0
    return float(values.mean()), float(error)


def dos_l1_distance(dos, reference_cdf=semicircle_cdf):
    """
    L1 distance between the histogram density and a reference law.

    Inside the range the reference is averaged over each bin; reference
    mass and empirical mass falling outside the range are added.
    """
    reference_mass = np.diff(reference_cdf(dos.edges))
    inside = float(np.sum(np.abs(dos.densities * dos.widths - reference_mass)))
    return inside + (1.0 - float(reference_mass.sum())) + (1.0 - dos.captured_fraction)


# -----------------------
# GAPS
# -----------------------
def level_gaps(points, degeneracy_tolerance=DEGENERACY_TOLERANCE):
    """
    Consecutive gaps with numerically coincident levels counted once.

    A gap is degenerate below degeneracy_tolerance times the mean gap, so
    the split does not change under affine rescaling of the points.

    Returns:
        tuple: (gaps, number of dropped degenerate gaps)
    """
    gaps = np.diff(np.sort(np.asarray(points, dtype=float)))
    scale = float(gaps.mean()) if gaps.size else 0.0
    keep = gaps > degeneracy_tolerance * scale if scale > 0 else np.zeros(gaps.size, dtype=bool)
    return gaps[keep], int(gaps.size - np.count_nonzero(keep))


def gap_ratios(sample, degeneracy_tolerance=DEGENERACY_TOLERANCE):
    """
    r_j = min(s_j, s_{j+1}) / max(s_j, s_{j+1}) for consecutive gaps.

    Args:
        sample: PointSample (or array of points) with at least 3 points

    Returns:
        np.ndarray: values in [0, 1]
    """
    points = sample.points if isinstance(sample, PointSample) else np.asarray(sample, dtype=float)
    if points.size < 3:
        raise InsufficientDataError(f"gap ratios need at least 3 points, got {points.size}")
    gaps, dropped = level_gaps(points, degeneracy_tolerance)
    if dropped:
        logger.warning("dropped %d degenerate gap(s) from gap statistics", dropped)
    if gaps.size < 2:
        raise InsufficientDataError("fewer than 2 non-degenerate gaps")
    return np.minimum(gaps[:-1], gaps[1:]) / np.maximum(gaps[:-1], gaps[1:])


def unfolded_gaps(sample, degeneracy_tolerance=DEGENERACY_TOLERANCE):
    """Gaps divided by their window mean (unit-mean unfolding)."""
    gaps, _ = level_gaps(sample.points, degeneracy_tolerance)
    if gaps.size == 0:
        return gaps
    return gaps / gaps.mean()


def ks_distance(gaps, reference="poisson", theta=1.0):
    """
    Sup-distance between the empirical gap CDF and a reference CDF.

    Args:
        gaps: Unit-mean gaps
        reference: "poisson", "goe_surmise" or "gue_surmise"
        theta: Rate of the Poisson reference

    Returns:
        float: distance in [0, 1]
    """
    gaps = np.asarray(gaps, dtype=float)
    if gaps.size < MIN_KS_GAPS:
        raise InsufficientDataError(f"KS distance needs at least {MIN_KS_GAPS} gaps, got {gaps.size}")
    if reference not in GAP_REFERENCES:
        raise DomainError(f"unknown gap reference {reference!r}")
    cdf = partial(poisson_gap_cdf, theta=theta) if reference == "poisson" else GAP_REFERENCES[reference]
    return float(stats.kstest(gaps, cdf).statistic)


# -----------------------
# COUNTING
# -----------------------
def box_counts(sample, box):
    low, high = box
    return int(np.searchsorted(sample.points, high, side="left") - np.searchsorted(sample.points, low, side="left"))


def counting_statistics(samples, box):
    """
    Empirical distribution of mu(B) for B = [low, high) across samples.

    Args:
        samples: Iterable of PointSample
        box: (low, high) in rescaled units, inside every sample window

    Returns:
        CountingStatistics, with exceedance[l] = (P(count >= l), standard error)
    """
    samples = _by_trial(samples)
    if not samples:
        raise InsufficientDataError("counting statistics need at least one sample")
    low, high = box
    if low > high:
        raise DomainError(f"box {box} is reversed")
    if any(max(abs(low), abs(high)) > s.half_width for s in samples):
        raise DomainError(f"box {box} reaches outside a sample window")

    counts = np.array([box_counts(s, box) for s in samples])
    return count_distribution(counts, box)


def tiled_box_counts(samples, box_width):
    """
    Counts in the disjoint boxes of width box_width tiling each sample window
    from its left edge; partial boxes at the right edge are left out.

    Returns:
        np.ndarray: shape (samples, boxes per sample)
    """
    samples = _by_trial(samples)
    if not samples:
        raise InsufficientDataError("tiled counts need at least one sample")
    if not box_width > 0:
        raise DomainError(f"box width must be positive, got {box_width}")
    half_width = min(s.half_width for s in samples)
    if not np.isfinite(half_width):
        raise DomainError("tiled counts need samples with a finite window")
    tiles = int(np.floor(2.0 * half_width / box_width + 1e-9))
    if tiles == 0:
        raise InsufficientDataError(f"box width {box_width} exceeds the window 2 x {half_width}")
    edges = -half_width + box_width * np.arange(tiles + 1)
    return np.array([np.diff(np.searchsorted(s.points, edges, side="left")) for s in samples])


def count_distribution(counts, box):
    """CountingStatistics of a flat array of box counts."""
    counts = np.asarray(counts, dtype=int).ravel()
    size = counts.size
    if size == 0:
        raise InsufficientDataError("no box counts")
    low, high = box
    mean = float(counts.mean())
    variance = float(counts.var(ddof=1)) if size > 1 else 0.0
    dispersion = variance / mean if mean > 0 else float("nan")
    # for Poisson counts the index of dispersion has standard error ~ sqrt(2/(N-1))
    dispersion_error = float(np.sqrt(2.0 / (size - 1))) if size > 1 else float("nan")

    exceedance = {}
    for level in range(1, int(counts.max(initial=0)) + 2):
        p = float(np.mean(counts >= level))
        exceedance[level] = (p, float(np.sqrt(p * (1.0 - p) / size)))

    return CountingStatistics(
        box=(float(low), float(high)),
        counts=counts,
        histogram=np.bincount(counts),
        mean=mean,
        variance=variance,
        dispersion=dispersion,
        dispersion_error=dispersion_error,
        exceedance=exceedance,
    )


def poisson_point_samples(intensity, half_width, count, seed=0):
    """Synthetic Poisson processes of constant intensity on [-h, h]."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    samples = []
    for trial in range(count):
        size = rng.poisson(intensity * 2.0 * half_width)
        points = rng.uniform(-half_width, half_width, size)
        samples.append(PointSample(points, trial, 0.0, 1.0, half_width))
    return samples


def laplace_functional(kernel_sums):
    """
    Mean of exp(-mu(P_z)) over trials.

    Returns:
        tuple: (estimate, standard_error)
    """
    values = np.exp(-np.asarray(kernel_sums, dtype=float))
    if values.size == 0:
        raise InsufficientDataError("Laplace functional needs at least one trial")
    error = values.std(ddof=1) / np.sqrt(values.size) if values.size > 1 else 0.0
    return float(values.mean()), float(error)
