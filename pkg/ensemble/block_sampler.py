"""
Gaussian building blocks Phi_{n,r}: direct sums of 2^(n-r) independent
GOE (or GUE) matrices of size 2^r, entry variance 2^{-r} off the diagonal
and 2 * 2^{-r} on it.
"""

import numpy as np

from ensemble.parameters import Symmetry
from errors import DomainError
from hierarchy.ultrametric import check_level


def sample_goe_block(size, variance, rng):
    """
    Real symmetric Gaussian block.

    (A + A^T)/sqrt(2) has unit off-diagonal and doubled diagonal variance;
    floating addition commutes, so the result is symmetric bit for bit.
    """
    a = rng.standard_normal((size, size))
    return (a + a.T) * np.sqrt(variance / 2.0)


def sample_gue_block(size, variance, rng):
    """
    Complex Hermitian Gaussian block.

    Off-diagonal real and imaginary parts each carry variance/2 so that
    E|entry|^2 = variance; the diagonal is real with variance 2 * variance.
    """
    scale = np.sqrt(variance / 2.0)
    upper = np.triu(rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size)), k=1)
    block = (upper + upper.conj().T) * scale
    block[np.diag_indices(size)] = rng.standard_normal(size) * np.sqrt(2.0 * variance)
    return block


BLOCK_SAMPLERS = {
    Symmetry.ORTHOGONAL: sample_goe_block,
    Symmetry.UNITARY: sample_gue_block,
}


def matrix_dtype(symmetry):
    return np.complex128 if Symmetry(symmetry) is Symmetry.UNITARY else np.float64


def add_level_blocks(out, r, weight, stream, first_block, symmetry):
    """
    Add weight * (blocks of Phi_{.,r}) onto the diagonal of `out`.

    `out` covers the blocks first_block, first_block + 1, ... of P_r; block j
    of the level is always drawn from stream.child(j), which is what makes a
    sub-block assembly reproduce the full assembly exactly.
    """
    size = 2 ** r
    sampler = BLOCK_SAMPLERS[Symmetry(symmetry)]
    variance = 2.0 ** -r
    for local in range(out.shape[0] // size):
        rng = stream.child(first_block + local).generator()
        window = slice(local * size, (local + 1) * size)
        out[window, window] += weight * sampler(size, variance, rng)
    return out


def sample_block_matrix(n, r, stream, symmetry=Symmetry.ORTHOGONAL):
    """
    Dense Phi_{n,r}.

    Args:
        n: Tree level of the index space
        r: Partition level, 0 <= r <= n
        stream: RngStream addressing (trial, r); block j uses stream.child(j)
        symmetry: Symmetry class of the blocks

    Returns:
        np.ndarray: 2^n x 2^n block-diagonal matrix, zero outside P_r blocks
    """
    n = check_level(n)
    if not 0 <= r <= n:
        raise DomainError(f"partition level {r} outside [0, {n}]")
    out = np.zeros((2 ** n, 2 ** n), dtype=matrix_dtype(symmetry))
    return add_level_blocks(out, r, 1.0, stream, 0, symmetry)
