"""
Parameters of the ultrametric ensemble and the seeded substreams its
Gaussian blocks are drawn from.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from errors import DomainError
from hierarchy.ultrametric import check_level

SEED_LIMIT = 2 ** 64

# Substream levels at or above this tag never collide with a block level r <= 30.
AUXILIARY_TAG = 1 << 16


class Symmetry(str, Enum):
    ORTHOGONAL = "orthogonal"
    UNITARY = "unitary"


@dataclass(frozen=True)
class EnsembleParams:
    """
    (n, c, symmetry, normalized, master_seed) defining the random model.

    With normalized=False the matrix is the bare sum of weighted blocks, which
    is how the localized-regime arguments work with H_n.
    """

    n: int
    c: float
    symmetry: Symmetry = Symmetry.ORTHOGONAL
    normalized: bool = True
    master_seed: int = 0

    def __post_init__(self):
        check_level(self.n)
        if not math.isfinite(self.c):
            raise DomainError(f"c must be finite, got {self.c}")
        if not 0 <= self.master_seed < SEED_LIMIT:
            raise DomainError(f"master seed {self.master_seed} is not an unsigned 64-bit integer")
        object.__setattr__(self, "symmetry", Symmetry(self.symmetry))

    @property
    def dimension(self):
        return 2 ** self.n

    def with_level(self, n):
        return replace(self, n=n)

    def with_coupling(self, c):
        return replace(self, c=c)

    def as_dict(self):
        return {
            "n": self.n,
            "c": self.c,
            "symmetry": self.symmetry.value,
            "normalized": self.normalized,
            "seed": self.master_seed,
        }


@dataclass(frozen=True)
class RngStream:
    """
    An independent random substream addressed by (master_seed, path).

    The path is (trial, level r, block index) for the blocks of Phi_{n,r};
    the bit generator is Philox, which is counter based, so a substream
    depends only on its address and never on which worker draws it.
    """

    master_seed: int
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= self.master_seed < SEED_LIMIT:
            raise DomainError(f"master seed {self.master_seed} is not an unsigned 64-bit integer")
        if any(int(key) < 0 for key in self.path):
            raise DomainError(f"substream path {self.path} has negative keys")
        object.__setattr__(self, "path", tuple(int(key) for key in self.path))

    def child(self, *keys):
        return RngStream(self.master_seed, self.path + tuple(keys))

    def generator(self):
        sequence = np.random.SeedSequence(entropy=self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(sequence))


def level_stream(params, trial, r):
    """Substream of Phi_{n,r} in a given trial; blocks hang below it."""
    return RngStream(params.master_seed, (trial, r))


def auxiliary_stream(master_seed, trial, purpose):
    """Substream for sampling unrelated to the matrix itself (sites, bootstrap)."""
    return RngStream(master_seed, (trial, AUXILIARY_TAG, purpose))
