"""
Dense symmetric (Hermitian) eigensolver with a residual-based contract.

The default path is LAPACK through scipy.linalg.eigh; a self-contained
Householder tridiagonalization + implicit-shift QL solver is kept as a
reference implementation for real symmetric input.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from errors import DomainError, MissingEigenvectorsError, NumericalError

logger = logging.getLogger(__name__)

MAX_DIMENSION = 2 ** 13
ORTHONORMALITY_TOLERANCE = 1e-10
RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Ascending eigenvalues with an optional orthonormal eigenvector matrix;
    column j of `eigenvectors` pairs with eigenvalue j.
    """

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def dimension(self):
        return int(self.eigenvalues.size)

    @property
    def level(self):
        return self.dimension.bit_length() - 1

    @property
    def trial(self):
        return self.meta.get("trial", 0)

    @property
    def has_vectors(self):
        return self.eigenvectors is not None

    def require_vectors(self):
        if self.eigenvectors is None:
            raise MissingEigenvectorsError("spectrum was computed without eigenvectors")
        return self.eigenvectors


def _check_matrix(matrix):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {matrix.shape}")
    size = matrix.shape[0]
    if size == 0 or size & (size - 1):
        raise DomainError(f"dimension {size} is not a power of two")
    if size > MAX_DIMENSION:
        raise DomainError(f"dimension {size} exceeds {MAX_DIMENSION}")
    return matrix


def check_decomposition(matrix, eigenvalues, eigenvectors):
    """
    Verify orthonormality and the residual ||HV - V Lambda||_max.

    Returns:
        tuple: (orthonormality_error, residual)
    """
    size = matrix.shape[0]
    gram = eigenvectors.conj().T @ eigenvectors
    orthonormality_error = float(np.max(np.abs(gram - np.eye(size))))
    residual = float(np.max(np.abs(matrix @ eigenvectors - eigenvectors * eigenvalues)))
    scale = max(float(np.max(np.abs(matrix))), np.finfo(float).tiny)
    if orthonormality_error > ORTHONORMALITY_TOLERANCE:
        raise NumericalError(f"eigenvectors not orthonormal: error {orthonormality_error:.3e}")
    if residual > RESIDUAL_TOLERANCE * scale * size:
        raise NumericalError(f"eigen-residual {residual:.3e} exceeds contract")
    return orthonormality_error, residual


def eigh(matrix, want_vectors=True, method="lapack", meta=None, check=True):
    """
    Full spectrum of a symmetric or Hermitian matrix.

    Args:
        matrix: Square array, dimension a power of two up to 2^13
        want_vectors: Also return the eigenvector matrix
        method: "lapack" or "householder-ql"
        meta: Dict echoed into the Spectrum (params, trial, m)
        check: Verify the residual contract when vectors are computed

    Returns:
        Spectrum
    """
    matrix = _check_matrix(matrix)
    if method == "lapack":
        try:
            result = scipy.linalg.eigh(matrix, eigvals_only=not want_vectors)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"LAPACK eigensolver failed: {exc}") from exc
        eigenvalues, eigenvectors = (result if want_vectors else (result, None))
    elif method == "householder-ql":
        eigenvalues, eigenvectors = householder_ql(matrix, want_vectors)
    else:
        raise DomainError(f"unknown eigensolver method {method!r}")

    if want_vectors and check:
        check_decomposition(matrix, eigenvalues, eigenvectors)
    return Spectrum(np.asarray(eigenvalues, dtype=float), eigenvectors, dict(meta or {}))


def direct_sum_spectrum(spectra, meta=None):
    """Sorted multiset union of block spectra (eigenvalues only)."""
    eigenvalues = np.sort(np.concatenate([s.eigenvalues for s in spectra]))
    return Spectrum(eigenvalues, None, dict(meta or {}))


# -----------------------
# REFERENCE SOLVER
# -----------------------
def householder_tridiagonalize(matrix):
    """
    Reduce a real symmetric matrix to tridiagonal form T = Q^T A Q.

    Returns:
        tuple: (diagonal, off_diagonal, q)
    """
    a = np.array(matrix, dtype=float)
    size = a.shape[0]
    q = np.eye(size)
    for k in range(size - 2):
        x = a[k + 1:, k]
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        alpha = -math.copysign(norm, x[0])
        v = x.copy()
        v[0] -= alpha
        v_norm2 = v @ v
        if v_norm2 == 0.0:
            continue
        beta = 2.0 / v_norm2
        # H S H = S - v w^T - w v^T with w = p - (beta v.p / 2) v, p = beta S v
        sub = a[k + 1:, k + 1:]
        p = beta * (sub @ v)
        w = p - (beta * (v @ p) / 2.0) * v
        a[k + 1:, k + 1:] = sub - np.outer(v, w) - np.outer(w, v)
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
        q[:, k + 1:] -= beta * np.outer(q[:, k + 1:] @ v, v)
    return np.diag(a).copy(), np.diag(a, -1).copy(), q


def tridiagonal_ql(diagonal, off_diagonal, z=None, max_sweeps=30):
    """
    Implicit-shift QL iteration on a symmetric tridiagonal matrix.

    Rotations are accumulated into the columns of `z` (in place) when given,
    so passing the Householder Q yields eigenvectors of the original matrix.

    Returns:
        np.ndarray: unsorted eigenvalues
    """
    d = np.array(diagonal, dtype=float)
    size = d.size
    e = np.zeros(size)
    e[:size - 1] = off_diagonal
    eps = np.finfo(float).eps
    for l in range(size):
        sweeps = 0
        while True:
            m = l
            while m < size - 1:
                if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if sweeps == max_sweeps:
                raise NumericalError(f"QL iteration did not converge for eigenvalue {l} in {max_sweeps} sweeps")
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            deflated = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    column = z[:, i + 1].copy()
                    z[:, i + 1] = s * z[:, i] + c * column
                    z[:, i] = c * z[:, i] - s * column
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d


def householder_ql(matrix, want_vectors=True, max_sweeps=30):
    """
    Reference eigensolver for real symmetric matrices.

    Returns:
        tuple: (ascending eigenvalues, eigenvectors or None)
    """
    if np.iscomplexobj(matrix):
        raise DomainError("the Householder-QL reference solver handles real symmetric input only")
    diagonal, off_diagonal, q = householder_tridiagonalize(matrix)
    z = q if want_vectors else None
    eigenvalues = tridiagonal_ql(diagonal, off_diagonal, z, max_sweeps)
    order = np.argsort(eigenvalues, kind="stable")
    logger.debug("Householder-QL solved dimension %d", eigenvalues.size)
    return eigenvalues[order], (z[:, order] if want_vectors else None)
