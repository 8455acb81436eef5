"""
Ultrametric geometry on the dyadic index space B_n = {1, ..., 2^n}.
Distances, nested partitions P_r, balls and block ranges.
"""

from dataclasses import dataclass

import numpy as np

from errors import DomainError

# 2^30 still fits comfortably in a machine integer
MAX_LEVEL = 30


def check_level(n):
    """Validate a tree level and return it as int."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise DomainError(f"level must be an integer, got {n!r}")
    if not 0 <= n <= MAX_LEVEL:
        raise DomainError(f"level {n} outside [0, {MAX_LEVEL}]")
    return int(n)


# -----------------------
# DOMAIN TYPES
# -----------------------
@dataclass(frozen=True)
class HierarchyIndex:
    """A site x in B_n. `value` is 1-based as in the partition definition."""

    value: int
    level: int

    def __post_init__(self):
        check_level(self.level)
        if not isinstance(self.value, (int, np.integer)) or isinstance(self.value, bool):
            raise DomainError(f"site must be an integer, got {self.value!r}")
        if not 1 <= self.value <= 2 ** self.level:
            raise DomainError(
                f"site {self.value} outside B_{self.level} = [1, {2 ** self.level}]"
            )

    @property
    def offset(self):
        """0-based position used for matrix indexing."""
        return self.value - 1

    @classmethod
    def from_offset(cls, offset, level):
        return cls(int(offset) + 1, level)


@dataclass(frozen=True)
class BlockRange:
    """Inclusive 1-based range [start, end] forming one member of P_level."""

    start: int
    end: int
    level: int

    def __post_init__(self):
        size = 2 ** self.level
        if self.end - self.start + 1 != size:
            raise DomainError(f"block [{self.start}, {self.end}] does not have size 2^{self.level}")
        if (self.start - 1) % size != 0:
            raise DomainError(f"block start {self.start} is not aligned to 2^{self.level}")

    @property
    def size(self):
        return self.end - self.start + 1

    @property
    def index(self):
        """Position of this block within P_level, counting from 0."""
        return (self.start - 1) // self.size

    def as_slice(self):
        return slice(self.start - 1, self.end)

    def members(self):
        return range(self.start, self.end + 1)

    def __contains__(self, site):
        value = site.value if isinstance(site, HierarchyIndex) else site
        return self.start <= value <= self.end


# -----------------------
# DISTANCE
# -----------------------
def _check_same_level(x, y):
    if x.level != y.level:
        raise DomainError(f"level mismatch: {x.level} != {y.level}")


def distance(x, y):
    """
    Ultrametric distance d(x, y).

    The bit length of (x-1) XOR (y-1) is the smallest r with
    ceil(x/2^r) == ceil(y/2^r).

    Args:
        x: HierarchyIndex
        y: HierarchyIndex at the same level

    Returns:
        int: 0 <= d <= level
    """
    _check_same_level(x, y)
    return (x.offset ^ y.offset).bit_length()


def partition_scan_distance(x, y):
    """Distance by scanning the partitions P_0, P_1, ... directly."""
    _check_same_level(x, y)
    for r in range(x.level + 1):
        if -(-x.value // 2 ** r) == -(-y.value // 2 ** r):
            return r
    raise AssertionError("P_n always contains both sites")


def pairwise_distance(a, b, n):
    """
    Vectorized distance for arrays of 1-based values at level n.

    Counts the levels r < n at which the blocks of a and b still differ;
    once two sites share a block they share every coarser one.
    """
    n = check_level(n)
    a = np.asarray(a, dtype=np.int64) - 1
    b = np.asarray(b, dtype=np.int64) - 1
    if a.size and (a.min() < 0 or a.max() >= 2 ** n):
        raise DomainError(f"values outside B_{n}")
    if b.size and (b.min() < 0 or b.max() >= 2 ** n):
        raise DomainError(f"values outside B_{n}")
    d = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    for r in range(n):
        d += (a >> r) != (b >> r)
    return d


def distance_matrix(n):
    """Integer matrix of d(x, y) over all 0-based pairs of B_n."""
    sites = np.arange(1, 2 ** check_level(n) + 1)
    return pairwise_distance(sites[:, None], sites[None, :], n)


# -----------------------
# PARTITIONS AND BALLS
# -----------------------
def ball(x, r):
    """The unique member of P_r containing x."""
    if not 0 <= r <= x.level:
        raise DomainError(f"radius {r} outside [0, {x.level}]")
    size = 2 ** r
    start = (x.offset // size) * size + 1
    return BlockRange(start, start + size - 1, r)


def blocks(n, r):
    """The partition P_r of B_n as 2^(n-r) consecutive ranges."""
    n = check_level(n)
    if not 0 <= r <= n:
        raise DomainError(f"partition level {r} outside [0, {n}]")
    size = 2 ** r
    return [BlockRange(start, start + size - 1, r) for start in range(1, 2 ** n + 1, size)]
