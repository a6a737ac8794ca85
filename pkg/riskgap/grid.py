"""
Grid - Axis-aligned partition of the unit hypercube [0,1]^n into cells of side 1/q
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from riskgap.exceptions import InvalidInputError

CellIndex = Tuple[int, ...]

MAX_CELLS = 10 ** 9


@dataclass(frozen=True)
class GridSpec:
    """Partition of [0,1]^n into q^n hypercubes of side s = 1/q."""

    n: int
    q: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInputError(f"grid dimension must be a positive integer, got {self.n}")
        if int(self.q) != self.q or self.q < 1:
            raise InvalidInputError(f"cells per axis must be a positive integer, got {self.q}")
        if self.q ** self.n > MAX_CELLS:
            raise InvalidInputError(
                f"grid with q={self.q}, n={self.n} has {self.q ** self.n} cells (limit {MAX_CELLS})"
            )

    @classmethod
    def from_side(cls, n: int, s: float) -> "GridSpec":
        """Build a grid from a cell side; 1/s must be an integer."""
        if s <= 0 or s > 1:
            raise InvalidInputError(f"cell side must lie in (0, 1], got {s}")
        q = round(1 / s)
        if not math.isclose(q * s, 1.0, rel_tol=0, abs_tol=1e-9):
            raise InvalidInputError(f"cell side {s} does not tile [0,1]: 1/s is not an integer")
        return cls(n=n, q=q)

    @property
    def s(self) -> Fraction:
        return Fraction(1, self.q)

    @property
    def side(self) -> float:
        return 1.0 / self.q

    @property
    def gamma(self) -> float:
        """Proximity threshold s/sqrt(n) used by the cluster test."""
        return self.side / math.sqrt(self.n)

    @property
    def diameter(self) -> float:
        """Cell diameter s*sqrt(n)."""
        return self.side * math.sqrt(self.n)

    @property
    def cell_count(self) -> int:
        return self.q ** self.n

    def validate_cell(self, c: Sequence[int]) -> CellIndex:
        cell = tuple(int(v) for v in c)
        if len(cell) != self.n:
            raise InvalidInputError(f"cell {cell} has {len(cell)} coordinates, grid has n={self.n}")
        if any(v < 0 or v >= self.q for v in cell):
            raise InvalidInputError(f"cell {cell} out of range for q={self.q}")
        return cell


def as_points(g: GridSpec, points: Iterable) -> np.ndarray:
    """Coerce a sample to an (m, n) float array and check it lies in [0,1]^n."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, g.n)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if g.n > 1 or arr.shape[0] == 1 else arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] != g.n:
        raise InvalidInputError(f"points of shape {arr.shape} do not match grid dimension n={g.n}")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidInputError("points must lie within [0,1]^n")
    return arr


def cells_of(g: GridSpec, points) -> np.ndarray:
    """Vectorized cell lookup; returns an (m, n) integer array."""
    arr = as_points(g, points)
    idx = np.floor(arr * g.q).astype(np.int64)
    # upper boundary belongs to the last cell
    return np.minimum(idx, g.q - 1)


def cell_of(g: GridSpec, p: Sequence[float]) -> CellIndex:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape[0] != g.n:
        raise InvalidInputError(f"point has dimension {arr.shape[0]}, grid has n={g.n}")
    return tuple(int(v) for v in cells_of(g, arr.reshape(1, -1))[0])


def center_of(g: GridSpec, c: Sequence[int]) -> np.ndarray:
    cell = g.validate_cell(c)
    return (np.asarray(cell, dtype=float) + 0.5) * g.side


def neighbors(g: GridSpec, c: Sequence[int]) -> List[CellIndex]:
    """Moore neighbourhood of c, in lexicographic order of coordinate deltas."""
    cell = g.validate_cell(c)
    result = []
    for delta in itertools.product((-1, 0, 1), repeat=g.n):
        if not any(delta):
            continue
        candidate = tuple(a + d for a, d in zip(cell, delta))
        if all(0 <= v < g.q for v in candidate):
            result.append(candidate)
    return result


def occupied_cells(g: GridSpec, sample) -> Dict[CellIndex, int]:
    """Tally sample points per cell; keys come back in lexicographic order."""
    idx = cells_of(g, sample)
    if idx.shape[0] == 0:
        return {}
    unique, counts = np.unique(idx, axis=0, return_counts=True)
    return {tuple(int(v) for v in row): int(cnt) for row, cnt in zip(unique, counts)}


def center_distance(g: GridSpec, a: CellIndex, b: CellIndex) -> float:
    return float(g.side * math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b))))
