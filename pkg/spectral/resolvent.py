"""
Resolvent functionals evaluated through an eigendecomposition:
Poisson kernel traces nu_n(P_z) and Green function entries G(x, y; z).
Direct linear solves are provided only as cross-check oracles.
"""

from dataclasses import dataclass

import numpy as np

from errors import DomainError


@dataclass(frozen=True)
class ComplexEnergy:
    """Spectral parameter z = E + i eta in the upper half plane."""

    energy: float
    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise DomainError(f"imaginary part must be positive, got {self.eta}")

    @property
    def value(self):
        return complex(self.energy, self.eta)

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        return cls(z.real, z.imag)

    @classmethod
    def zoom(cls, center, z, level):
        """z_l = E + 2^{-l} z, the microscopic point around E at scale 2^{-l}."""
        z = complex(z)
        factor = 2.0 ** -level
        return cls(center + factor * z.real, factor * z.imag)


def poisson_kernel(eigenvalues, z):
    """P_z(lambda) = eta / ((lambda - E)^2 + eta^2) = Im 1/(lambda - z)."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    return z.eta / ((eigenvalues - z.energy) ** 2 + z.eta ** 2)


def nu_trace(spectrum, z):
    """nu_n(P_z) = 2^{-n} sum_j P_z(lambda_j)."""
    return float(np.sum(poisson_kernel(spectrum.eigenvalues, z)) / spectrum.dimension)


def green_row(spectrum, x, z):
    """
    G(x, y; z) = <delta_y, (H - z)^{-1} delta_x> for every y.

    Args:
        spectrum: Spectrum with eigenvectors
        x: HierarchyIndex
        z: ComplexEnergy

    Returns:
        np.ndarray: complex vector indexed by 0-based y
    """
    vectors = spectrum.require_vectors()
    weights = np.conj(vectors[x.offset, :]) / (spectrum.eigenvalues - z.value)
    return vectors @ weights


def green_entry(spectrum, x, y, z):
    vectors = spectrum.require_vectors()
    terms = vectors[y.offset, :] * np.conj(vectors[x.offset, :]) / (spectrum.eigenvalues - z.value)
    return complex(np.sum(terms))


# -----------------------
# LINEAR-SOLVE ORACLES
# -----------------------
def direct_trace(matrix, z):
    """2^{-n} Im Tr (H - z)^{-1} from a dense solve."""
    size = matrix.shape[0]
    resolvent = np.linalg.solve(matrix - z.value * np.eye(size), np.eye(size, dtype=complex))
    return float(np.trace(resolvent).imag / size)


def direct_green_entry(matrix, x, y, z):
    size = matrix.shape[0]
    delta = np.zeros(size, dtype=complex)
    delta[x.offset] = 1.0
    solution = np.linalg.solve(matrix - z.value * np.eye(size), delta)
    return complex(solution[y.offset])
