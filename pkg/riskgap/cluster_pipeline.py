"""
Cluster pipeline - Proximity-graph cluster test and the one-hot cluster feature map

The test links sample points closer than gamma = s/sqrt(n), takes connected
components, and reports each component as the union of the grid cells its
points fall in. It passes when at least two regions remain.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from riskgap.exceptions import InvalidInputError, InvalidStateError
from riskgap.grid import CellIndex, GridSpec, as_points, cells_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ClusterTestResult:
    passed: bool
    regions: Tuple[FrozenSet[CellIndex], ...]
    k: int
    r_a_hat: Optional[float]
    component_of: np.ndarray
    grid: GridSpec

    @property
    def gamma(self) -> float:
        return self.grid.gamma


def _subcell_offsets(n: int) -> List[Tuple[int, ...]]:
    """Positive half of the sub-cell offsets whose boxes can hold points within gamma.

    Sub-cells have side s/n, so gamma equals sqrt(n) sub-cell sides.
    """
    reach = int(math.floor(1 + math.sqrt(n)))
    offsets = []
    for delta in itertools.product(range(-reach, reach + 1), repeat=n):
        if delta <= (0,) * n:
            continue
        if sum(max(0, abs(d) - 1) ** 2 for d in delta) <= n:
            offsets.append(delta)
    return offsets


def _components(g: GridSpec, X: np.ndarray) -> np.ndarray:
    """Connected components of the gamma-proximity graph, one id per point."""
    gamma = g.gamma
    gamma_sq = g.side * g.side / g.n

    fine = np.minimum(np.floor(X * (g.q * g.n)).astype(np.int64), g.q * g.n - 1)
    keys, inverse = np.unique(fine, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    members: Dict[Tuple[int, ...], np.ndarray] = {}
    order = np.argsort(inverse, kind="stable")
    splits = np.cumsum(np.bincount(inverse, minlength=len(keys)))[:-1]
    for key, idx in zip(keys, np.split(order, splits)):
        members[tuple(int(v) for v in key)] = idx

    # every point in a sub-cell lies within gamma of every other one
    forest = DisjointSet(members.keys())
    trees: Dict[Tuple[int, ...], cKDTree] = {}
    offsets = _subcell_offsets(g.n)
    for key, idx in members.items():
        for delta in offsets:
            other = tuple(a + d for a, d in zip(key, delta))
            if other not in members or forest.connected(key, other):
                continue
            if other not in trees:
                trees[other] = cKDTree(X[members[other]])
            dist, nearest = trees[other].query(X[idx], k=1, distance_upper_bound=gamma * (1 + 1e-9))
            hits = np.flatnonzero(np.isfinite(dist))
            if hits.size == 0:
                continue
            diff = X[idx[hits]] - X[members[other][nearest[hits]]]
            if np.any(np.einsum("ij,ij->i", diff, diff) <= gamma_sq):
                forest.merge(key, other)

    roots: Dict[Tuple[int, ...], int] = {}
    sub_ids = np.array([roots.setdefault(forest[tuple(int(v) for v in key)], len(roots)) for key in keys])
    return sub_ids[inverse]


def cluster_property_test(g: GridSpec, sample) -> ClusterTestResult:
    """Test a sample for cluster structure at scale gamma = s/sqrt(n)."""
    X = as_points(g, sample)
    if X.shape[0] == 0:
        raise InvalidInputError("cluster test needs a non-empty sample")

    component = _components(g, X)
    cells = cells_of(g, X)

    # components that share a cell collapse into one region so regions stay disjoint
    forest = DisjointSet(range(int(component.max()) + 1))
    owner: Dict[CellIndex, int] = {}
    for comp_id, row in zip(component, cells):
        cell = tuple(int(v) for v in row)
        if cell in owner:
            forest.merge(owner[cell], int(comp_id))
        else:
            owner[cell] = int(comp_id)

    grouped: Dict[int, set] = {}
    for cell, comp_id in owner.items():
        grouped.setdefault(forest[comp_id], set()).add(cell)
    regions = sorted((frozenset(v) for v in grouped.values()), key=min)
    region_of_root = {forest[next(iter(owner[c] for c in region))]: i for i, region in enumerate(regions)}
    component_of = np.array([region_of_root[forest[int(c)]] for c in component], dtype=np.int64)

    k = len(regions)
    passed = k >= 2
    if passed:
        logger.info(f"Cluster test passed: k={k} regions from {X.shape[0]} points (gamma={g.gamma:.6g})")
    else:
        logger.info(f"Cluster test failed: {k} region from {X.shape[0]} points (gamma={g.gamma:.6g})")
    return ClusterTestResult(
        passed=passed,
        regions=tuple(regions),
        k=k,
        r_a_hat=0.0 if passed else None,
        component_of=component_of,
        grid=g,
    )


class ClusterFeatureMap:
    """One-hot code of the region a point falls in; the zero vector off every region."""

    def __init__(self, grid: GridSpec, regions: Sequence[FrozenSet[CellIndex]]):
        self.grid = grid
        self.regions = tuple(regions)
        self.k = len(self.regions)
        flat, owner = [], []
        for i, region in enumerate(self.regions):
            for cell in region:
                flat.append(np.ravel_multi_index(cell, (grid.q,) * grid.n))
                owner.append(i)
        order = np.argsort(flat)
        self._flat = np.asarray(flat, dtype=np.int64)[order]
        self._owner = np.asarray(owner, dtype=np.int64)[order]

    @property
    def dim(self) -> int:
        return self.k

    def region_index(self, X) -> np.ndarray:
        """Region id per point, -1 for points outside every region."""
        cells = cells_of(self.grid, X)
        if cells.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        flat = np.ravel_multi_index(tuple(cells.T), (self.grid.q,) * self.grid.n)
        pos = np.clip(np.searchsorted(self._flat, flat), 0, max(len(self._flat) - 1, 0))
        found = self._flat[pos] == flat if len(self._flat) else np.zeros(len(flat), dtype=bool)
        return np.where(found, self._owner[pos] if len(self._owner) else -1, -1)

    def map_points(self, X) -> np.ndarray:
        index = self.region_index(X)
        out = np.zeros((index.shape[0], self.k))
        hit = index >= 0
        out[np.flatnonzero(hit), index[hit]] = 1.0
        return out

    def map_point(self, p: Sequence[float]) -> np.ndarray:
        return self.map_points(np.asarray(p, dtype=float).reshape(1, -1))[0]

    def off_support(self, X) -> np.ndarray:
        return self.region_index(X) < 0


def cluster_feature_map(result: ClusterTestResult) -> ClusterFeatureMap:
    if not result.passed:
        raise InvalidStateError("cannot build a cluster feature map from a failed cluster test")
    return ClusterFeatureMap(result.grid, result.regions)


def cluster_kernel(fm: ClusterFeatureMap, p: Sequence[float], p_prime: Sequence[float]) -> int:
    """Inner product of the two one-hot codes: 1 iff both points share a region."""
    return int(np.dot(fm.map_point(p), fm.map_point(p_prime)))
