"""
Eigenvector observables: eigenfunction correlators Q(x, y; W), mass
outside a ball, inverse participation ratios and sup-norms.
"""

from dataclasses import dataclass

import numpy as np

from errors import DomainError, NormalizationError
from hierarchy.ultrametric import ball

NORMALIZATION_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SpectralWindow:
    """Energy interval [E - h, E + h] in absolute units."""

    center: float
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise DomainError(f"window half-width must be positive, got {self.half_width}")

    @classmethod
    def real_line(cls):
        return cls(0.0, np.inf)

    @classmethod
    def mesoscopic(cls, center, n, w):
        """W = [E - 2^{-(1-w)n}, E + 2^{-(1-w)n}]."""
        return cls(center, 2.0 ** (-(1.0 - w) * n))

    def mask(self, eigenvalues):
        return np.abs(np.asarray(eigenvalues) - self.center) <= self.half_width


def _window_vectors(spectrum, window):
    vectors = spectrum.require_vectors()
    return vectors[:, window.mask(spectrum.eigenvalues)]


def correlator_row(spectrum, x, window):
    """Q(x, y; W) for every 0-based y."""
    selected = np.abs(_window_vectors(spectrum, window))
    return selected @ selected[x.offset, :]


def eigenfunction_correlator(spectrum, x, y, window):
    """
    Q(x, y; W) = sum over eigenvalues in W of |psi(x) psi(y)|.

    Args:
        spectrum: Spectrum with eigenvectors
        x: HierarchyIndex
        y: HierarchyIndex
        window: SpectralWindow

    Returns:
        float: Q >= 0
    """
    selected = np.abs(_window_vectors(spectrum, window))
    return float(np.sum(selected[x.offset, :] * selected[y.offset, :]))


def mass_outside_ball(spectrum, x, m, window):
    """Sum of Q(x, y; W) over y outside the ball B_m(x)."""
    block = ball(x, m)
    row = correlator_row(spectrum, x, window)
    return float(row.sum() - row[block.as_slice()].sum())


def _check_normalized(vector):
    vector = np.asarray(vector)
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
        raise NormalizationError(f"vector has l2 norm {norm:.12f}, expected 1")
    return vector


def ipr(vector):
    """Inverse participation ratio sum_x |psi(x)|^4."""
    return float(np.sum(np.abs(_check_normalized(vector)) ** 4))


def sup_norm(vector):
    return float(np.max(np.abs(_check_normalized(vector))))


def window_vector_statistics(spectrum, window):
    """
    IPR and sup-norm of every eigenvector whose eigenvalue lies in W.

    Returns:
        tuple: (ipr array, sup-norm array)
    """
    selected = _window_vectors(spectrum, window)
    norms = np.linalg.norm(selected, axis=0)
    if selected.size and np.max(np.abs(norms - 1.0)) > NORMALIZATION_TOLERANCE:
        raise NormalizationError("eigenvectors are not l2-normalized")
    magnitudes = np.abs(selected)
    return np.sum(magnitudes ** 4, axis=0), np.max(magnitudes, axis=0, initial=0.0)
