"""
Unit tests for synthetic worlds, sampling and ground-truth oracles
"""

import math

import numpy as np
import pytest

from riskgap.cluster_pipeline import cluster_feature_map, cluster_property_test
from riskgap.exceptions import InvalidInputError
from riskgap.grid import GridSpec, cells_of
from riskgap.manifold_pipeline import manifold_feature_map, manifold_property_test
from riskgap.synthgen import (
    WORLD_FACTORIES,
    Blob,
    ClusterWorld,
    ManifoldWorld,
    build_world,
    condition_risks,
    d_gamma,
    d_r_path,
    make_rng,
    read_points_csv,
    sample_labeled,
    sample_unlabeled,
    single_blob_world,
    snake_tube_world,
    touching_blobs_world,
    true_risk,
    two_blob_world,
    two_tube_world,
    write_points_csv,
)


def _one_cell_world():
    grid = GridSpec(n=2, q=10)
    return ClusterWorld(grid, (Blob(frozenset({(3, 4)}), 0, 1.0),), margin=0.0)


def test_samples_stay_in_support():
    """Test that a one-cell world only produces points in that cell."""
    X = sample_unlabeled(_one_cell_world(), 5, make_rng(0))
    assert X.shape == (5, 2)
    assert all(tuple(c) == (3, 4) for c in cells_of(GridSpec(n=2, q=10), X))


def test_same_seed_same_sample(two_blob):
    """Test sampling determinism."""
    a = sample_labeled(two_blob, 100, make_rng(7))
    b = sample_labeled(two_blob, 100, make_rng(7))
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


def test_blob_weights_respected():
    """Test that per-blob counts follow the mixture weights."""
    world = two_blob_world(weights=(0.5, 0.5))
    _, y = sample_labeled(world, 100_000, make_rng(3))
    sigma = math.sqrt(100_000 * 0.25)
    assert abs(int(np.sum(y == 1)) - 50_000) <= 3 * sigma


def test_single_blob_labels():
    """Test that a single label-0 blob yields only label 0."""
    _, y = sample_labeled(single_blob_world(), 500, make_rng(1))
    assert set(np.unique(y)) == {0}


def test_world_rejects_bad_weights():
    """Test mixture weight validation."""
    grid = GridSpec(n=2, q=10)
    with pytest.raises(InvalidInputError):
        ClusterWorld(grid, (Blob(frozenset({(0, 0)}), 0, 0.7),), margin=0.0)


def test_world_rejects_margin_violation():
    """Test that blobs closer than the margin are rejected."""
    grid = GridSpec(n=2, q=10)
    blobs = (Blob(frozenset({(0, 0)}), 0, 0.5), Blob(frozenset({(1, 0)}), 1, 0.5))
    with pytest.raises(InvalidInputError):
        ClusterWorld(grid, blobs, margin=0.05)


def test_manifold_world_label_disagreement():
    """Test that the snake world's boundary neighbourhood stays within eps_b."""
    world = snake_tube_world()
    assert world.length == pytest.approx(9.2536, abs=1e-3)
    assert 0.0 < world.label_disagreement_mass() <= 0.05


def test_manifold_world_rejects_long_curve():
    """Test the curve length budget."""
    grid = GridSpec(n=2, q=10)
    path = tuple((x, 5) for x in range(1, 9))
    with pytest.raises(InvalidInputError):
        ManifoldWorld(grid=grid, paths=(path,), gamma_len=0.5, tube_radius=0.02)


def test_manifold_samples_stay_on_path_cells():
    """Test that tube samples land only in path cells."""
    world = snake_tube_world()
    X, _ = world.sample(5000, make_rng(5))
    path_cells = set(world.paths[0])
    assert {tuple(c) for c in cells_of(world.grid, X)} <= path_cells


def test_true_risk_constant_zero_on_label_zero_world():
    """Test zero risk of the matching constant hypothesis."""
    risk, se = true_risk(single_blob_world(), lambda X: np.zeros(len(X), dtype=int), 10_000, make_rng(0))
    assert risk == 0.0
    assert se == 0.0


def test_true_risk_matches_label_mass():
    """Test that a constant-0 hypothesis has risk equal to the label-1 mass."""
    world = two_blob_world(weights=(0.7, 0.3))
    risk, se = true_risk(world, lambda X: np.zeros(len(X), dtype=int), 100_000, make_rng(2))
    assert abs(risk - 0.3) <= 3 * se


def test_true_risk_complement():
    """Test that flipping every prediction complements the risk."""
    world = two_blob_world()
    risk, _ = true_risk(world, lambda X: (X[:, 0] > 0.5).astype(int), 10_000, make_rng(4))
    flipped, _ = true_risk(world, lambda X: (X[:, 0] <= 0.5).astype(int), 10_000, make_rng(4))
    assert risk + flipped == pytest.approx(1.0)


def test_true_risk_needs_large_test_sample():
    """Test the minimum test sample size."""
    with pytest.raises(InvalidInputError):
        true_risk(single_blob_world(), lambda X: np.zeros(len(X)), 100, make_rng(0))


def test_condition_risks_on_cluster_world(two_blob):
    """Test condition risks of a separated cluster world with its own feature map."""
    grid = two_blob.grid
    result = cluster_property_test(grid, sample_unlabeled(two_blob, 4000, make_rng(11)))
    fm = cluster_feature_map(result)
    risks = condition_risks(two_blob, grid, fm, m_pairs=20_000, rng=make_rng(12))
    assert risks["R_B_hat"] == 0.0
    assert risks["R_C_hat"] == 0.0
    assert risks["R_a_hat"] == 0.0
    assert risks["R_E_hat"] == pytest.approx(0.4, abs=0.02)


def test_condition_risks_touching_blobs_violate_b():
    """Test that touching blobs with different labels break condition B."""
    world = touching_blobs_world()
    risks = condition_risks(world, world.grid, rng=make_rng(1))
    assert risks["R_B_hat"] == 1.0
    assert risks["R_a_hat"] is None


def test_condition_risks_on_tube(tube):
    """Test the manifold condition risks of an unlabeled-boundary tube."""
    grid = tube.grid
    result = manifold_property_test(grid, sample_unlabeled(tube, 3000, make_rng(2)), tube.gamma_len)
    risks = condition_risks(tube, grid, manifold_feature_map(result), j=1, rng=make_rng(3))
    assert risks["R_B_hat"] == 0.0
    assert risks["R_C_hat"] == 0.0
    assert risks["R_E_hat"] == 0.0


def test_condition_risks_manifold_needs_j(tube):
    """Test that manifold condition risks require j."""
    with pytest.raises(InvalidInputError):
        condition_risks(tube, tube.grid)


def test_d_gamma():
    """Test the cluster pseudometric on separated and bridged supports."""
    world = two_blob_world()
    assert d_gamma(world, (0.05, 0.05), (0.05, 0.05), world.grid.gamma) == 0
    assert d_gamma(world, (0.05, 0.05), (0.95, 0.95), world.grid.gamma) == 1
    bar = ClusterWorld(GridSpec(n=2, q=10), (Blob(frozenset((x, 0) for x in range(6)), 0, 1.0),), margin=0.0)
    assert d_gamma(bar, (0.05, 0.05), (0.55, 0.05), bar.grid.gamma) == 0
    assert d_gamma(bar, (0.05, 0.05), (0.55, 0.55), bar.grid.gamma) == 1


def test_d_r_path():
    """Test the manifold path distance."""
    grid = GridSpec(n=2, q=5)
    world = ManifoldWorld(grid=grid, paths=(((1, 2), (2, 2), (3, 2)),), gamma_len=1.0, tube_radius=0.05)
    assert d_r_path(world, (0.3, 0.5), (0.3, 0.5), 0.0, grid.diameter) == 0.0
    assert d_r_path(world, (0.3, 0.5), (0.7, 0.5), 0.0, grid.diameter) == pytest.approx(0.4)
    with pytest.raises(InvalidInputError):
        d_r_path(world, (0.3, 0.5), (0.7, 0.5), 0.0, grid.diameter / 2)


def test_d_r_path_disjoint_tubes():
    """Test that points in separate tubes are infinitely far apart."""
    world = two_tube_world()
    assert math.isinf(d_r_path(world, (0.45, 0.25), (0.45, 0.75), 0.0, world.grid.diameter))


def test_world_factories_build():
    """Test that every registered factory builds with its defaults."""
    for kind in WORLD_FACTORIES:
        world = build_world(kind)
        assert sum(world.cell_masses.values()) == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        build_world("nope")


def test_points_csv_round_trip(tmp_path, two_blob):
    """Test writing and reading a labeled sample."""
    X, y = two_blob.sample(50, make_rng(9))
    path = tmp_path / "sample.csv"
    write_points_csv(path, X, y)
    X2, y2 = read_points_csv(path, 2)
    assert np.array_equal(X, X2)
    assert np.array_equal(y, y2)


def test_points_csv_reports_line(tmp_path):
    """Test that malformed rows are reported by line number."""
    path = tmp_path / "bad.csv"
    path.write_text("x1,x2\n0.1,0.2\n0.3,abc\n")
    with pytest.raises(InvalidInputError, match="line 3"):
        read_points_csv(path, 2)
    path.write_text("x1,x2\n0.1,0.2\n0.3,1.5\n")
    with pytest.raises(InvalidInputError, match="line 3"):
        read_points_csv(path, 2)


def test_points_csv_line_numbers_count_blank_lines(tmp_path):
    """Test that reported line numbers are file lines even after skipped blank lines."""
    path = tmp_path / "gaps.csv"
    path.write_text("x1,x2,y\n0.1,0.2,0\n\n\n0.3,0.4,1\n\n0.5,abc,0\n")
    with pytest.raises(InvalidInputError, match="line 7"):
        read_points_csv(path, 2)
    path.write_text("x1,x2,y\n\n0.1,0.2,0\n0.3,0.4,2\n")
    with pytest.raises(InvalidInputError, match="line 4"):
        read_points_csv(path, 2)
    path.write_text("\nx1,x3\n0.1,0.2\n")
    with pytest.raises(InvalidInputError, match="line 2"):
        read_points_csv(path, 2)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
