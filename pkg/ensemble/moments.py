"""
Closed-form second moments of the ultrametric ensemble: the normalizer
Z_{n,c}, individual entry variances and the spread M_n.
All sums run over r = 0..n directly, so c = -1 and c = -2 need no special case.
"""

import numpy as np

from errors import DomainError
from hierarchy.ultrametric import check_level, distance


def level_weight(r, c):
    """Coefficient 2^{-(1+c)r/2} of Phi_{n,r}."""
    return 2.0 ** (-(1.0 + c) * r / 2.0)


def perturbation_time(n, c):
    """Brownian time t = 2^{-(1+c)n} of the top-level perturbation H_n - H_{n,n-1}."""
    return 2.0 ** (-(1.0 + c) * check_level(n))


def normalizer_squared(n, c):
    r = np.arange(check_level(n) + 1, dtype=float)
    # each Phi_{n,r} row carries variance 2^{-r}(2 + (2^r - 1)) = 1 + 2^{-r}
    return float(np.sum(2.0 ** (-(1.0 + c) * r) * (1.0 + 2.0 ** -r)))


def normalizer(n, c):
    """
    Z_{n,c}, chosen so every row of H_n has total variance 1.

    Args:
        n: Tree level
        c: Ensemble parameter

    Returns:
        float: Z >= 0
    """
    return float(np.sqrt(normalizer_squared(n, c)))


def _variance_from_distance(d, n, c):
    r = np.arange(d, n + 1, dtype=float)
    terms = 2.0 ** (-(1.0 + c) * r) * 2.0 ** -r
    return float(np.sum(terms) * (2.0 if d == 0 else 1.0))


def entry_variance(x, y, params):
    """
    E|<delta_y, H_n delta_x>|^2 for sites at level params.n.

    Off the diagonal only the levels r >= d(x, y) reach the pair; the
    diagonal collects every level with the doubled GOE weight.
    """
    if x.level != params.n or y.level != params.n:
        raise DomainError(f"sites must live at level {params.n}")
    variance = _variance_from_distance(distance(x, y), params.n, params.c)
    if params.normalized:
        variance /= normalizer_squared(params.n, params.c)
    return variance


def spread(n, c):
    """
    M_n, the inverse of the largest normalized entry variance.

    The maximum sits on the diagonal, giving Z^2 / (2 sum_r 2^{-(2+c)r}).
    """
    r = np.arange(check_level(n) + 1, dtype=float)
    return normalizer_squared(n, c) / (2.0 * float(np.sum(2.0 ** (-(2.0 + c) * r))))
