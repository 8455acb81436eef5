"""
Assembly of H_n and its truncations H_{n,m} with coupled randomness.
Combines the weighted levels Phi_{n,r} drawn from fixed substreams.
"""

import logging

import numpy as np

from ensemble.block_sampler import add_level_blocks, matrix_dtype, sample_block_matrix
from ensemble.moments import level_weight, normalizer
from ensemble.parameters import level_stream
from errors import DomainError

logger = logging.getLogger(__name__)


class UltrametricEnsemble:
    """
    Sampler for H_{n,m} = sum_{r<=m} 2^{-(1+c)r/2} Phi_{n,r} (divided by Z_{n,c}
    when normalized).

    Levels are accumulated in the order r = 0, 1, ..., m, so for a fixed trial
    every truncation is a prefix sum of the same realizations and
    assemble(trial, m) == assemble(trial, m - 1) + weight_m * Phi_{n,m}
    bit for bit in the unnormalized case.
    """

    def __init__(self, params):
        """
        Args:
            params: EnsembleParams
        """
        self.params = params
        self.weights = {r: level_weight(r, params.c) for r in range(params.n + 1)}
        self.scale = normalizer(params.n, params.c) if params.normalized else 1.0

    @property
    def n(self):
        return self.params.n

    @property
    def dimension(self):
        return self.params.dimension

    def _check_truncation(self, m):
        m = self.n if m is None else m
        if not 0 <= m <= self.n:
            raise DomainError(f"truncation level {m} outside [0, {self.n}]")
        return m

    def sample_level(self, trial, r):
        """Unweighted Phi_{n,r} of a trial."""
        return sample_block_matrix(self.n, r, level_stream(self.params, trial, r), self.params.symmetry)

    def assemble(self, trial, m=None):
        """
        H_{n,m} of a trial; m defaults to n, giving H_n itself.

        Returns:
            np.ndarray: dense 2^n x 2^n symmetric (Hermitian) matrix
        """
        m = self._check_truncation(m)
        out = np.zeros((self.dimension, self.dimension), dtype=matrix_dtype(self.params.symmetry))
        for r in range(m + 1):
            add_level_blocks(out, r, self.weights[r], level_stream(self.params, trial, r), 0, self.params.symmetry)
        if self.params.normalized:
            out /= self.scale
        logger.debug("assembled H_{%d,%d} for trial %d", self.n, m, trial)
        return out

    def assemble_block(self, trial, m, block_index):
        """
        Restriction of H_{n,m} to the block_index-th member of P_m.

        Only the Phi blocks inside that member are drawn; they come from the
        same substreams as in assemble(), so the result equals the matching
        diagonal block of the full matrix exactly.
        """
        m = self._check_truncation(m)
        if not 0 <= block_index < 2 ** (self.n - m):
            raise DomainError(f"block {block_index} outside P_{m} of B_{self.n}")
        size = 2 ** m
        out = np.zeros((size, size), dtype=matrix_dtype(self.params.symmetry))
        for r in range(m + 1):
            first = block_index * 2 ** (m - r)
            add_level_blocks(out, r, self.weights[r], level_stream(self.params, trial, r), first, self.params.symmetry)
        if self.params.normalized:
            out /= self.scale
        return out

    def truncation_blocks(self, trial, m):
        """Yield (block_index, block) for the 2^(n-m) diagonal blocks of H_{n,m}."""
        m = self._check_truncation(m)
        for block_index in range(2 ** (self.n - m)):
            yield block_index, self.assemble_block(trial, m, block_index)


def assemble(params, trial, m=None):
    """H_{n,m} for a trial; see UltrametricEnsemble.assemble."""
    return UltrametricEnsemble(params).assemble(trial, m)


def assemble_block(params, trial, m, block_index):
    return UltrametricEnsemble(params).assemble_block(trial, m, block_index)
