"""
Manifold pipeline - Depth-first search for a one-dimensional curve through the
occupied cells, and the arc-length feature map along that curve
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from riskgap.exceptions import InvalidInputError, InvalidStateError, ResourceExhaustedError
from riskgap.grid import CellIndex, GridSpec, as_points, cells_of, center_distance, neighbors, occupied_cells

logger = logging.getLogger(__name__)

DEFAULT_MAX_EXPANSIONS = 10_000_000


@dataclass(frozen=True)
class ManifoldTestResult:
    passed: bool
    path: Tuple[CellIndex, ...]
    path_length: float
    arc_offset: Dict[CellIndex, float]
    r_a_hat: Optional[float]
    grid: GridSpec
    gamma_len: float
    expansions: int = 0


def _self_intersects(path: Sequence[CellIndex], n: int, strict: bool = False) -> bool:
    """Revisit check on the last cell of ``path``.

    The default compares the last cell against path positions 1..len(path)-n
    (1-based), so only revisits at a lag of at least n are caught; ``strict``
    compares against every earlier position.
    """
    last = path[-1]
    stop = len(path) - 1 if strict else len(path) - n
    return any(path[i] == last for i in range(max(stop, 0)))


def _explore(start: CellIndex, occupied: Dict[CellIndex, int], g: GridSpec, gamma_len: float,
             strict: bool, budget: List[int]) -> Optional[Tuple[List[CellIndex], float]]:
    """Iterative depth-first search from ``start``; returns (path, length) or None."""
    target = len(occupied)
    path: List[CellIndex] = []
    cumulative: List[float] = []
    on_path = set()
    # one iterator of untried neighbours per path position
    stack = []

    def enter(cell: CellIndex, distance: float) -> None:
        budget[0] += 1
        if budget[0] > budget[1]:
            raise ResourceExhaustedError(
                f"manifold search exceeded {budget[1]} node expansions", expansions=budget[1]
            )
        path.append(cell)
        cumulative.append(distance)
        on_path.add(cell)
        stack.append(iter([c for c in neighbors(g, cell) if c in occupied]))

    enter(start, 0.0)
    while path:
        distance = cumulative[-1]
        ok = distance <= gamma_len and not _self_intersects(path, g.n, strict)
        if ok and len(on_path) == target:
            return list(path), distance

        nxt = None
        if ok:
            nxt = next((c for c in stack[-1] if c not in on_path), None)
        if nxt is not None:
            enter(nxt, distance + center_distance(g, path[-1], nxt))
            continue

        # dead end or rejected branch
        stack.pop()
        cumulative.pop()
        on_path.discard(path.pop())
    return None


def manifold_property_test(g: GridSpec, sample, gamma_len: float,
                           max_expansions: int = DEFAULT_MAX_EXPANSIONS,
                           strict_self_intersection: bool = False) -> ManifoldTestResult:
    """Search for a cell path of length <= gamma_len covering every occupied cell."""
    X = as_points(g, sample)
    if X.shape[0] == 0:
        raise InvalidInputError("manifold test needs a non-empty sample")
    if gamma_len <= 0:
        raise InvalidInputError(f"manifold length budget must be positive, got {gamma_len}")

    occupied = occupied_cells(g, X)
    budget = [0, int(max_expansions)]
    for start in occupied:
        found = _explore(start, occupied, g, gamma_len, strict_self_intersection, budget)
        if found is None:
            continue
        path, _ = found
        offsets: Dict[CellIndex, float] = {path[0]: 0.0}
        total = 0.0
        for a, b in zip(path, path[1:]):
            total += center_distance(g, a, b)
            offsets[b] = total
        logger.info(
            f"Manifold test passed: {len(path)} cells, length {total:.6g} <= {gamma_len:.6g}"
        )
        logger.debug(f"Manifold search used {budget[0]} node expansions")
        return ManifoldTestResult(
            passed=True, path=tuple(path), path_length=total, arc_offset=offsets,
            r_a_hat=0.0, grid=g, gamma_len=float(gamma_len), expansions=budget[0],
        )

    logger.info(f"Manifold test failed: no path covers {len(occupied)} occupied cells")
    return ManifoldTestResult(
        passed=False, path=(), path_length=0.0, arc_offset={}, r_a_hat=None,
        grid=g, gamma_len=float(gamma_len), expansions=budget[0],
    )


class ManifoldFeatureMap:
    """Distance along the learned curve; points off the curve map to a far sentinel."""

    def __init__(self, grid: GridSpec, arc_offset: Dict[CellIndex, float], gamma_len: float,
                 off_curve_value: Optional[float] = None):
        self.grid = grid
        self.arc_offset = dict(arc_offset)
        self.gamma_len = float(gamma_len)
        self.off_curve_value = -10.0 * self.gamma_len if off_curve_value is None else float(off_curve_value)
        if self.off_curve_value > -10.0 * self.gamma_len:
            raise InvalidInputError(
                f"off-curve value {self.off_curve_value} must be <= -10 * gamma_len = {-10.0 * self.gamma_len}"
            )
        dims = (grid.q,) * grid.n
        flat = np.array([np.ravel_multi_index(c, dims) for c in self.arc_offset], dtype=np.int64)
        values = np.array(list(self.arc_offset.values()), dtype=float)
        order = np.argsort(flat)
        self._flat = flat[order]
        self._values = values[order]

    @property
    def dim(self) -> int:
        return 1

    def map_points(self, X) -> np.ndarray:
        cells = cells_of(self.grid, X)
        if cells.shape[0] == 0 or self._flat.size == 0:
            return np.full(cells.shape[0], self.off_curve_value)
        flat = np.ravel_multi_index(tuple(cells.T), (self.grid.q,) * self.grid.n)
        pos = np.clip(np.searchsorted(self._flat, flat), 0, self._flat.size - 1)
        found = self._flat[pos] == flat
        return np.where(found, self._values[pos], self.off_curve_value)

    def map_point(self, p: Sequence[float]) -> float:
        return float(self.map_points(np.asarray(p, dtype=float).reshape(1, -1))[0])

    def off_support(self, X) -> np.ndarray:
        return self.map_points(X) == self.off_curve_value


def manifold_feature_map(result: ManifoldTestResult) -> ManifoldFeatureMap:
    if not result.passed:
        raise InvalidStateError("cannot build a manifold feature map from a failed manifold test")
    return ManifoldFeatureMap(result.grid, result.arc_offset, result.gamma_len)
