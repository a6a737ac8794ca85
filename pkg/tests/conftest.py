"""
Shared fixtures: digitized layouts and small synthetic worlds
"""

import math

import numpy as np
import pytest

from riskgap.grid import GridSpec
from riskgap.synthgen import make_rng, straight_tube_world, two_blob_world

# Figure layouts are drawn on [-2.5, 2.5]^2; u = (x + 2.5) / 5 maps them into the unit square.
BLUE_EDGES = [
    ((1.7, -0.9), (1.6, -1.3)), ((1.6, -1.8), (1.6, -1.3)), ((1.6, -1.3), (1.7, -1.6)),
    ((1.9, -1.4), (1.7, -1.6)), ((1.7, -0.9), (2.1, -0.8)), ((1.7, -0.9), (1.6, -0.7)),
    ((2.1, -0.8), (1.8, -0.2)), ((1.8, -0.2), (1.6, 0.1)), ((1.6, 0.1), (1.8, 0.2)),
    ((1.3, 0.7), (1.8, 0.2)), ((1.3, 0.7), (0.7, 0.7)), ((0.7, 0.7), (0.4, 0.8)),
    ((0.4, 0.8), (0.2, 1.2)), ((0.4, 0.8), (0.1, 0.6)), ((0.1, 0.6), (-0.4, 0.6)),
    ((-1.1, 0.7), (-0.4, 0.6)), ((-1.1, 0.7), (-1.1, 0.1)), ((-1.1, 0.1), (-1.2, -0.1)),
    ((-1.2, -0.1), (-1.6, -0.4)), ((-1.6, -0.4), (-1.6, -0.6)), ((-1.6, -0.6), (-1.7, -0.9)),
    ((-1.7, -0.9), (-1.8, -1.2)), ((-1.6, -0.6), (-1.9, -0.7)), ((-1.9, -1.4), (-1.8, -1.2)),
    ((-1.9, -1.4), (-2.4, -1.3)), ((-2.4, -1.3), (-2.1, -1.8)), ((-1.8, -1.2), (-1.6, -1.8)),
]

RED_EDGES = [
    ((0.1, -0.8), (0.4, -0.6)), ((0.1, -0.8), (0.4, -1.3)), ((0.4, -0.6), (0.4, -1.3)),
    ((0.4, -1.3), (0.1, -1.8)), ((0.4, -1.3), (-0.1, -1.7)), ((0.1, -1.8), (-0.1, -1.7)),
    ((0.4, -1.3), (-0.2, -1.1)), ((-0.1, -1.7), (-0.2, -1.1)), ((0.1, -0.8), (-0.2, -1.1)),
]

SNAKE_DOTS = [
    (2.4, -2.4), (2.2, -2.2), (2.2, -1.9), (2.3, -1.6), (2.1, -1.4), (2.3, -0.8), (2.1, -0.6),
    (2.4, -0.2), (2.2, -0.1), (2.1, 0.2), (2.4, 0.7), (2.4, 1.2), (1.6, 1.2), (1.1, 1.2),
    (0.7, 0.6), (0.3, 0.3), (-0.4, -0.3), (0.4, 0.1), (0.8, 0.8), (0.4, -2.1), (0.7, -2.2),
    (1.2, -2.3), (1.8, -2.4), (-0.4, -2.1), (-0.6, -2.2), (-0.9, -2.2), (-1.2, -2.2),
    (-1.4, -2.3), (-1.8, -2.1), (-1.8, -2.4), (-2.1, -2.4), (-2.4, -2.3),
]

SNAKE_PATH = (
    [(x, 0) for x in range(10)]
    + [(9, y) for y in range(1, 8)]
    + [(8, 7), (7, 7), (6, 6), (5, 5), (4, 4)]
)
SNAKE_LENGTH = 0.9 + 0.7 + 0.2 + 3 * 0.1 * math.sqrt(2)


def to_unit(points):
    return (np.asarray(points, dtype=float) + 2.5) / 5.0


def densify(edges, spacing):
    """Points along every edge, no two consecutive ones further apart than ``spacing``."""
    chunks = []
    for a, b in edges:
        a, b = to_unit(a), to_unit(b)
        steps = max(1, int(math.ceil(np.linalg.norm(b - a) / spacing)))
        t = np.linspace(0.0, 1.0, steps + 1)[:, None]
        chunks.append(a + t * (b - a))
    return np.unique(np.vstack(chunks), axis=0)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo runs (deselect with '-m \"not slow\"')")


@pytest.fixture
def grid10():
    return GridSpec(n=2, q=10)


@pytest.fixture
def cluster_layout(grid10):
    """Digitized two-cluster drawing: (points, labels) with label 0 for the first cluster."""
    spacing = grid10.gamma / 2
    blue = densify(BLUE_EDGES, spacing)
    red = densify(RED_EDGES, spacing)
    X = np.vstack([blue, red])
    labels = np.concatenate([np.zeros(len(blue), dtype=np.int64), np.ones(len(red), dtype=np.int64)])
    return X, labels


@pytest.fixture
def snake_dots():
    return to_unit(SNAKE_DOTS)


@pytest.fixture
def two_blob():
    return two_blob_world()


@pytest.fixture
def tube():
    return straight_tube_world()


@pytest.fixture
def rng():
    return make_rng(1234)
