"""
Unit tests for the cluster property test and the one-hot feature map
"""

import numpy as np
import pytest
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from riskgap.cluster_pipeline import (
    ClusterFeatureMap,
    cluster_feature_map,
    cluster_kernel,
    cluster_property_test,
)
from riskgap.exceptions import InvalidInputError, InvalidStateError
from riskgap.grid import GridSpec, cells_of
from riskgap.synthgen import four_corner_world, make_rng, sample_unlabeled


def _partition(labels):
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), set()).add(i)
    return {frozenset(v) for v in groups.values()}


def test_two_far_points_pass():
    """Test that two isolated points form two clusters."""
    result = cluster_property_test(GridSpec(n=2, q=2), [(0.1, 0.1), (0.9, 0.9)])
    assert result.passed
    assert result.k == 2
    assert result.r_a_hat == 0.0
    assert result.regions == (frozenset({(0, 0)}), frozenset({(1, 1)}))


def test_single_cell_fails():
    """Test that points inside one cell form one cluster and fail the test."""
    result = cluster_property_test(GridSpec(n=2, q=10), [(0.51, 0.52), (0.55, 0.58), (0.59, 0.51)])
    assert not result.passed
    assert result.k == 1
    assert result.r_a_hat is None
    assert result.regions == (frozenset({(5, 5)}),)


def test_empty_sample_rejected():
    """Test that an empty sample is rejected."""
    with pytest.raises(InvalidInputError):
        cluster_property_test(GridSpec(n=2, q=10), np.zeros((0, 2)))


def test_digitized_two_cluster_layout(grid10, cluster_layout):
    """Test the digitized two-cluster drawing splits into its two drawn clusters."""
    X, labels = cluster_layout
    result = cluster_property_test(grid10, X)
    assert result.passed
    assert result.k == 2
    assert _partition(result.component_of) == _partition(labels)
    assert not (result.regions[0] & result.regions[1])


def test_points_in_different_regions_are_far_apart(rng):
    """Test separation and coverage on random samples against a brute-force graph."""
    g = GridSpec(n=2, q=10)
    for _ in range(5):
        X = rng.random((150, 2))
        result = cluster_property_test(g, X)
        d = cdist(X, X)
        _, brute = connected_components(d <= g.gamma, directed=False)
        # every brute-force component sits inside one region
        for comp in np.unique(brute):
            assert len(np.unique(result.component_of[brute == comp])) == 1
        different = result.component_of[:, None] != result.component_of[None, :]
        assert np.all(d[different] > g.gamma)
        cells = cells_of(g, X)
        for c, region in zip(cells, result.component_of):
            assert tuple(c) in result.regions[region]


def test_permutation_stability(rng):
    """Test that reordering the sample keeps the partition of points."""
    g = GridSpec(n=2, q=10)
    X = sample_unlabeled(four_corner_world(), 800, make_rng(4))
    order = rng.permutation(len(X))
    a = cluster_property_test(g, X)
    b = cluster_property_test(g, X[order])
    relabeled = np.empty_like(b.component_of)
    relabeled[order] = b.component_of
    assert _partition(a.component_of) == _partition(relabeled)
    assert a.regions == b.regions


def test_coarser_grid_never_adds_components(rng):
    """Test monotone merging as the grid coarsens."""
    X = rng.random((200, 2))
    ks = [cluster_property_test(GridSpec(n=2, q=q), X).k for q in (5, 10, 20)]
    assert ks[0] <= ks[1] <= ks[2]


def test_feature_map_one_hot():
    """Test one-hot codes inside regions and the zero vector outside."""
    result = cluster_property_test(GridSpec(n=2, q=2), [(0.1, 0.1), (0.9, 0.9)])
    fm = cluster_feature_map(result)
    assert fm.dim == 2
    assert np.array_equal(fm.map_point((0.2, 0.2)), [1.0, 0.0])
    assert np.array_equal(fm.map_point((0.8, 0.7)), [0.0, 1.0])
    assert np.array_equal(fm.map_point((0.2, 0.8)), [0.0, 0.0])
    assert fm.off_support([(0.2, 0.8)])[0]


def test_sample_points_never_map_to_zero():
    """Test that every sample point gets a one-hot code on a passed test."""
    X = sample_unlabeled(four_corner_world(), 1000, make_rng(8))
    result = cluster_property_test(GridSpec(n=2, q=10), X)
    assert result.passed and result.k == 4
    Z = cluster_feature_map(result).map_points(X)
    assert np.all(Z.sum(axis=1) == 1.0)


def test_feature_map_from_failed_test():
    """Test that a failed test cannot produce a feature map."""
    result = cluster_property_test(GridSpec(n=2, q=10), [(0.5, 0.5)])
    with pytest.raises(InvalidStateError):
        cluster_feature_map(result)


def test_kernel_matches_feature_dot_product(rng):
    """Test kernel values against the feature inner product."""
    result = cluster_property_test(GridSpec(n=2, q=2), [(0.1, 0.1), (0.9, 0.9)])
    fm = cluster_feature_map(result)
    assert cluster_kernel(fm, (0.1, 0.1), (0.1, 0.1)) == 1
    assert cluster_kernel(fm, (0.1, 0.1), (0.9, 0.9)) == 0
    assert cluster_kernel(fm, (0.1, 0.9), (0.1, 0.9)) == 0
    P = rng.random((30, 2))
    for p in P[:10]:
        for p2 in P[10:]:
            assert cluster_kernel(fm, p, p2) == int(np.dot(fm.map_point(p), fm.map_point(p2)))


def test_feature_map_with_no_regions():
    """Test that a map over no regions sends everything off support."""
    fm = ClusterFeatureMap(GridSpec(n=2, q=4), [])
    assert fm.region_index([(0.5, 0.5)])[0] == -1


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
