import itertools

import numpy as np
import pytest

from errors import DomainError
from hierarchy.ultrametric import (
    BlockRange,
    HierarchyIndex,
    ball,
    blocks,
    distance,
    distance_matrix,
    pairwise_distance,
    partition_scan_distance,
)


@pytest.mark.parametrize("n", range(9))
def test_xor_distance_matches_partition_scan(n):
    sites = [HierarchyIndex(value, n) for value in range(1, 2 ** n + 1)]
    for x, y in itertools.product(sites, repeat=2):
        assert distance(x, y) == partition_scan_distance(x, y)


def test_ultrametric_inequality_on_random_triples():
    n = 13
    rng = np.random.default_rng(0)
    a, b, c = rng.integers(1, 2 ** n + 1, size=(3, 10 ** 5))
    d_ab = pairwise_distance(a, b, n)
    d_bc = pairwise_distance(b, c, n)
    d_ac = pairwise_distance(a, c, n)
    assert np.all(d_ac <= np.maximum(d_ab, d_bc))


def test_distance_small_cases():
    assert distance(HierarchyIndex(1, 2), HierarchyIndex(1, 2)) == 0
    assert distance(HierarchyIndex(1, 2), HierarchyIndex(2, 2)) == 1
    assert distance(HierarchyIndex(1, 2), HierarchyIndex(3, 2)) == 2
    assert distance(HierarchyIndex(2, 2), HierarchyIndex(3, 2)) == 2
    assert distance(HierarchyIndex(1, 3), HierarchyIndex(8, 3)) == 3


def test_distance_rejects_mismatched_levels():
    with pytest.raises(DomainError):
        distance(HierarchyIndex(1, 2), HierarchyIndex(1, 3))


@pytest.mark.parametrize("value, level", [(0, 3), (9, 3), (1, 31)])
def test_index_outside_tree_is_rejected(value, level):
    with pytest.raises(DomainError):
        HierarchyIndex(value, level)


@pytest.mark.parametrize("value", [1.5, 2.0, "3", True])
def test_non_integer_site_is_rejected(value):
    with pytest.raises(DomainError):
        HierarchyIndex(value, 3)


def test_numpy_integer_site_is_accepted():
    assert HierarchyIndex(np.int64(5), 3).offset == 4


def test_distance_matrix_agrees_with_scalar_distance():
    n = 4
    matrix = distance_matrix(n)
    assert matrix.shape == (16, 16)
    assert np.array_equal(matrix, matrix.T)
    assert np.all(np.diag(matrix) == 0)
    for i, j in [(0, 1), (0, 15), (5, 6), (7, 8), (12, 13)]:
        assert matrix[i, j] == distance(HierarchyIndex.from_offset(i, n), HierarchyIndex.from_offset(j, n))


def test_ball_is_the_partition_member_containing_x():
    x = HierarchyIndex(6, 4)
    member = ball(x, 2)
    assert (member.start, member.end) == (5, 8)
    assert member.index == 1
    assert member.size == 4
    assert x in member
    assert ball(x, 0) == BlockRange(6, 6, 0)
    assert ball(x, 4) == BlockRange(1, 16, 4)


def test_ball_matches_distance_ball():
    n = 4
    for value in range(1, 2 ** n + 1):
        x = HierarchyIndex(value, n)
        for r in range(n + 1):
            member = ball(x, r)
            for other in range(1, 2 ** n + 1):
                y = HierarchyIndex(other, n)
                assert (y in member) == (distance(x, y) <= r)


def test_ball_radius_must_not_exceed_level():
    with pytest.raises(DomainError):
        ball(HierarchyIndex(1, 3), 4)


def test_blocks_tile_the_index_space():
    members = blocks(3, 1)
    assert [(b.start, b.end) for b in members] == [(1, 2), (3, 4), (5, 6), (7, 8)]
    assert [b.index for b in members] == [0, 1, 2, 3]
    assert list(members[2].members()) == [5, 6]
    assert members[1].as_slice() == slice(2, 4)


def test_misaligned_block_is_rejected():
    with pytest.raises(DomainError):
        BlockRange(2, 3, 1)
    with pytest.raises(DomainError):
        BlockRange(1, 3, 1)
