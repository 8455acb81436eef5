"""
Reference laws the empirical statistics are compared against.
Gap distributions are in the unit-mean convention.
"""

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from ensemble.parameters import Symmetry

POISSON_GAP_RATIO_MEAN = 2.0 * np.log(2.0) - 1.0

# large-N values from Monte Carlo; the 3x3 surmise gives 0.5359 and 0.6027
GAP_RATIO_MEANS = {
    Symmetry.ORTHOGONAL: 0.5307,
    Symmetry.UNITARY: 0.5996,
}

# Porter-Thomas: N * E(ipr) -> 3 for real, 2 for complex eigenvectors
PORTER_THOMAS_IPR = {
    Symmetry.ORTHOGONAL: 3.0,
    Symmetry.UNITARY: 2.0,
}


def poisson_gap_cdf(s, theta=1.0):
    return 1.0 - np.exp(-theta * np.asarray(s, dtype=float))


def goe_surmise_cdf(s):
    s = np.asarray(s, dtype=float)
    return 1.0 - np.exp(-np.pi * s ** 2 / 4.0)


def gue_surmise_cdf(s):
    s = np.asarray(s, dtype=float)
    return erf(2.0 * s / np.sqrt(np.pi)) - (4.0 * s / np.pi) * np.exp(-4.0 * s ** 2 / np.pi)


GAP_REFERENCES = {
    "poisson": poisson_gap_cdf,
    "goe_surmise": goe_surmise_cdf,
    "gue_surmise": gue_surmise_cdf,
}


def surmise_for(symmetry):
    return "gue_surmise" if Symmetry(symmetry) is Symmetry.UNITARY else "goe_surmise"


def poisson_gap_ratio_density(r):
    """Density 2/(1+r)^2 of min/max ratios of iid exponential gaps on [0, 1]."""
    return 2.0 / (1.0 + np.asarray(r, dtype=float)) ** 2


def semicircle_density(energy):
    energy = np.asarray(energy, dtype=float)
    return np.sqrt(np.clip(4.0 - energy ** 2, 0.0, None)) / (2.0 * np.pi)


def semicircle_cdf(energy):
    e = np.clip(np.asarray(energy, dtype=float), -2.0, 2.0)
    return 0.5 + e * np.sqrt(4.0 - e ** 2) / (4.0 * np.pi) + np.arcsin(e / 2.0) / np.pi


def poisson_laplace_functional(intensity, z):
    """
    E exp(-mu(P_z)) for a Poisson process of constant intensity.

    Equals exp(-intensity * integral of (1 - exp(-P_z(t))) dt); the integral
    does not depend on Re z.
    """
    def integrand(t):
        return -np.expm1(-z.eta / (t ** 2 + z.eta ** 2))

    integral, _ = quad(integrand, -np.inf, np.inf, limit=200)
    return float(np.exp(-intensity * integral))
