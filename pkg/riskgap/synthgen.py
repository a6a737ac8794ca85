"""
Synthetic worlds - Distributions with known structure, sampling, and ground-truth oracles

Two world families are provided:

* ``ClusterWorld``: a mixture of blobs, each a union of grid cells carrying a
  single label, with a guaranteed separation between blobs.
* ``ManifoldWorld``: thin tubes around polylines through cell centers, with
  labels that flip at chosen arc-length positions.

All mass integrals are exact at cell level, so the distance oracles
(``d_gamma``, ``d_r_path``) and the condition risks work on the world's
supported cells rather than on an approximation of the continuum.
"""

import functools
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial import cKDTree

from riskgap.exceptions import InvalidInputError
from riskgap.records import csv_line_numbers
from riskgap.grid import CellIndex, GridSpec, cell_of, cells_of, center_distance, center_of

logger = logging.getLogger(__name__)

MIN_M_TEST = 10_000


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for (seed, stream); identical pairs give identical draws."""
    if seed < 0 or stream < 0:
        raise InvalidInputError(f"seed and stream must be non-negative, got {seed}, {stream}")
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream),)))


def _box_gap(a: Sequence[int], b: Sequence[int], side: float) -> float:
    """Euclidean gap between two closed cell boxes."""
    return side * math.sqrt(sum(max(0, abs(x - y) - 1) ** 2 for x, y in zip(a, b)))


@dataclass(frozen=True)
class Blob:
    cells: FrozenSet[CellIndex]
    label: int
    weight: float


@dataclass(frozen=True)
class ClusterWorld:
    """Mixture of uniform blobs over unions of grid cells."""

    grid: GridSpec
    blobs: Tuple[Blob, ...]
    margin: float

    def __post_init__(self):
        if not self.blobs:
            raise InvalidInputError("a cluster world needs at least one blob")
        weights = [b.weight for b in self.blobs]
        if any(w <= 0 for w in weights) or not math.isclose(sum(weights), 1.0, abs_tol=1e-9):
            raise InvalidInputError(f"blob weights must be positive and sum to 1, got {weights}")
        seen = set()
        for blob in self.blobs:
            if blob.label not in (0, 1):
                raise InvalidInputError(f"blob labels must be 0 or 1, got {blob.label}")
            if not blob.cells:
                raise InvalidInputError("blob with no cells")
            for c in blob.cells:
                self.grid.validate_cell(c)
            if seen & blob.cells:
                raise InvalidInputError("blobs share cells")
            seen |= blob.cells
        if self.margin > 0:
            gap = self.min_separation()
            if gap <= self.margin:
                raise InvalidInputError(
                    f"blob separation {gap:.6g} does not exceed margin {self.margin:.6g}"
                )

    def min_separation(self) -> float:
        gap = math.inf
        for a, b in itertools.combinations(self.blobs, 2):
            for ca in a.cells:
                for cb in b.cells:
                    gap = min(gap, _box_gap(ca, cb, self.grid.side))
        return gap

    @functools.cached_property
    def cell_masses(self) -> Dict[CellIndex, float]:
        masses = {}
        for blob in self.blobs:
            for c in blob.cells:
                masses[c] = blob.weight / len(blob.cells)
        return dict(sorted(masses.items()))

    @functools.cached_property
    def cell_labels(self) -> Dict[CellIndex, FrozenSet[int]]:
        return {c: frozenset({blob.label}) for blob in self.blobs for c in blob.cells}

    def sample(self, m: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        cells = list(self.cell_masses)
        probs = np.array([self.cell_masses[c] for c in cells])
        probs = probs / probs.sum()
        labels = np.array([next(iter(self.cell_labels[c])) for c in cells], dtype=np.int64)
        lows = np.array(cells, dtype=float)

        pick = rng.choice(len(cells), size=m, p=probs)
        offsets = rng.random((m, self.grid.n))
        X = (lows[pick] + offsets) * self.grid.side
        return np.clip(X, 0.0, 1.0), labels[pick]


@dataclass(frozen=True)
class ManifoldWorld:
    """Tubes of radius ``tube_radius`` around polylines through cell centers.

    ``paths`` holds one or more cell paths; a connected world has exactly one.
    Labels equal ``base_label`` flipped once per boundary at or before the
    arc-length position of a point (arc length runs through the paths in order).
    """

    grid: GridSpec
    paths: Tuple[Tuple[CellIndex, ...], ...]
    gamma_len: float
    tube_radius: float
    boundaries: Tuple[float, ...] = ()
    base_label: int = 0
    eps_b: float = 0.0
    j: int = 1

    def __post_init__(self):
        g = self.grid
        if not self.paths:
            raise InvalidInputError("a manifold world needs at least one path")
        if not 0 < self.tube_radius < g.diameter / 2:
            raise InvalidInputError(
                f"tube radius must lie in (0, s*sqrt(n)/2 = {g.diameter / 2:.6g}), got {self.tube_radius}"
            )
        if self.base_label not in (0, 1):
            raise InvalidInputError(f"base label must be 0 or 1, got {self.base_label}")
        if not 0.0 <= self.eps_b <= 1.0:
            raise InvalidInputError(f"eps_b must lie in [0, 1], got {self.eps_b}")
        if self.j < 1:
            raise InvalidInputError(f"j must be a positive integer, got {self.j}")

        all_cells = [g.validate_cell(c) for path in self.paths for c in path]
        if len(set(all_cells)) != len(all_cells):
            raise InvalidInputError("manifold paths revisit a cell")
        midpoints = set()
        for path in self.paths:
            if len(path) < 2:
                raise InvalidInputError("each manifold path needs at least two cells")
            for a, b in zip(path, path[1:]):
                if max(abs(x - y) for x, y in zip(a, b)) != 1:
                    raise InvalidInputError(f"consecutive path cells {a} and {b} are not neighbours")
                mid = tuple(x + y for x, y in zip(a, b))
                if mid in midpoints:
                    raise InvalidInputError(f"path segments cross near cells {a} and {b}")
                midpoints.add(mid)

        if self.length > self.gamma_len:
            raise InvalidInputError(
                f"curve length {self.length:.6g} exceeds the length budget {self.gamma_len:.6g}"
            )
        if any(b < 0 or b > self.length for b in self.boundaries):
            raise InvalidInputError("label boundaries must lie within the curve's arc length")
        disagreement = self.label_disagreement_mass()
        if disagreement > self.eps_b + 1e-12:
            raise InvalidInputError(
                f"label disagreement mass {disagreement:.6g} exceeds eps_b {self.eps_b:.6g}"
            )

    @property
    def connected(self) -> bool:
        return len(self.paths) == 1

    @property
    def proximity(self) -> float:
        """Manifold distance (j+1)*sqrt(n)*s within which labels should agree."""
        return (self.j + 1) * self.grid.diameter

    @functools.cached_property
    def _segments(self):
        g = self.grid
        starts, ends, start_cells, end_cells = [], [], [], []
        for path in self.paths:
            for a, b in zip(path, path[1:]):
                starts.append(center_of(g, a))
                ends.append(center_of(g, b))
                start_cells.append(a)
                end_cells.append(b)
        starts = np.array(starts)
        ends = np.array(ends)
        lengths = np.linalg.norm(ends - starts, axis=1)
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        return starts, ends, lengths, cum, start_cells, end_cells

    @property
    def length(self) -> float:
        return float(self._segments[3][-1])

    @functools.cached_property
    def cell_masses(self) -> Dict[CellIndex, float]:
        _, _, lengths, _, start_cells, end_cells = self._segments
        total = lengths.sum()
        masses: Dict[CellIndex, float] = {}
        for length, a, b in zip(lengths, start_cells, end_cells):
            masses[a] = masses.get(a, 0.0) + 0.5 * length / total
            masses[b] = masses.get(b, 0.0) + 0.5 * length / total
        return dict(sorted(masses.items()))

    def label_at(self, u) -> np.ndarray:
        flips = np.searchsorted(np.sort(np.asarray(self.boundaries, dtype=float)), u, side="right")
        return (self.base_label + flips) % 2

    @functools.cached_property
    def cell_labels(self) -> Dict[CellIndex, FrozenSet[int]]:
        _, _, lengths, cum, start_cells, end_cells = self._segments
        bounds = sorted(self.boundaries)
        labels: Dict[CellIndex, set] = {}
        for i, (a, b) in enumerate(zip(start_cells, end_cells)):
            mid = cum[i] + lengths[i] / 2
            for cell, lo, hi in ((a, cum[i], mid), (b, mid, cum[i + 1])):
                found = labels.setdefault(cell, set())
                found.add(int(self.label_at(lo)))
                if any(lo < x < hi for x in bounds):
                    found.add(1 - int(self.label_at(lo)))
        return {c: frozenset(v) for c, v in sorted(labels.items())}

    def label_disagreement_mass(self) -> float:
        """Mass within manifold distance ``proximity`` of a label boundary."""
        if not self.boundaries:
            return 0.0
        reach = self.proximity
        intervals = sorted((max(0.0, b - reach), min(self.length, b + reach)) for b in self.boundaries)
        covered, cur_lo, cur_hi = 0.0, intervals[0][0], intervals[0][1]
        for lo, hi in intervals[1:]:
            if lo > cur_hi:
                covered += cur_hi - cur_lo
                cur_lo, cur_hi = lo, hi
            else:
                cur_hi = max(cur_hi, hi)
        covered += cur_hi - cur_lo
        return covered / self.length

    def sample(self, m: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        g = self.grid
        starts, ends, lengths, cum, start_cells, end_cells = self._segments

        u = rng.random(m) * self.length
        seg = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(lengths) - 1)
        frac = (u - cum[seg]) / lengths[seg]
        on_curve = starts[seg] + (ends[seg] - starts[seg]) * frac[:, None]

        # uniform offset inside a ball of radius tube_radius
        direction = rng.standard_normal((m, g.n))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = self.tube_radius * rng.random(m) ** (1.0 / g.n)
        X = on_curve + direction * radius[:, None]

        # keep each point inside the cell owning its half of the segment
        owners = np.where(frac[:, None] < 0.5, np.array(start_cells)[seg], np.array(end_cells)[seg])
        inset = g.side * 1e-9
        lows = owners / g.q + inset
        highs = (owners + 1) / g.q - inset
        X = np.clip(np.clip(X, lows, highs), 0.0, 1.0)
        return X, self.label_at(u).astype(np.int64)




def sample_unlabeled(world, m_u: int, rng: np.random.Generator) -> np.ndarray:
    if m_u < 1:
        raise InvalidInputError(f"sample size must be positive, got {m_u}")
    X, _ = world.sample(m_u, rng)
    return X


def sample_labeled(world, m_l: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    if m_l < 1:
        raise InvalidInputError(f"sample size must be positive, got {m_l}")
    return world.sample(m_l, rng)


def true_risk(world, hypothesis: Callable[[np.ndarray], np.ndarray], m_test: int,
              rng: np.random.Generator) -> Tuple[float, float]:
    """Monte-Carlo 0/1 risk of a vectorized hypothesis, with its standard error."""
    if m_test < MIN_M_TEST:
        raise InvalidInputError(f"m_test must be at least {MIN_M_TEST}, got {m_test}")
    X, y = world.sample(m_test, rng)
    predictions = np.asarray(hypothesis(X)).reshape(-1)
    p = float(np.mean(predictions != y))
    return p, math.sqrt(p * (1.0 - p) / m_test)


# Support oracles

def _supported(world) -> List[CellIndex]:
    return [c for c, mass in world.cell_masses.items() if mass > 0]


@functools.lru_cache(maxsize=64)
def _support_components(world, gamma: float) -> Dict[CellIndex, int]:
    """Component id of each supported cell under chains with gaps <= gamma."""
    cells = _supported(world)
    forest = DisjointSet(cells)
    side = world.grid.side
    tree = cKDTree(np.array(cells, dtype=float))
    for i, k in sorted(tree.query_pairs(gamma / side + math.sqrt(world.grid.n) + 1e-9)):
        if _box_gap(cells[i], cells[k], side) <= gamma:
            forest.merge(cells[i], cells[k])
    roots = {}
    return {c: roots.setdefault(forest[c], len(roots)) for c in cells}


@functools.lru_cache(maxsize=64)
def _support_distances(world, r: float):
    """All-pairs shortest center-to-center paths over cells of mass >= r."""
    g = world.grid
    cells = [c for c, mass in world.cell_masses.items() if mass > 0 and mass >= r]
    index = {c: i for i, c in enumerate(cells)}
    rows, cols, weights = [], [], []
    for c in cells:
        for delta in itertools.product((-1, 0, 1), repeat=g.n):
            other = tuple(a + d for a, d in zip(c, delta))
            if any(delta) and other in index:
                rows.append(index[c])
                cols.append(index[other])
                weights.append(center_distance(g, c, other))
    size = len(cells)
    graph = coo_matrix((weights, (rows, cols)), shape=(size, size)).tocsr()
    dist = shortest_path(graph, method="D", directed=False) if size else np.zeros((0, 0))
    return index, dist


def d_gamma(world, x: Sequence[float], x_prime: Sequence[float], gamma: float) -> int:
    """0 iff x and x' are joined by a chain of supported points with steps <= gamma."""
    components = _support_components(world, float(gamma))
    a = cell_of(world.grid, x)
    b = cell_of(world.grid, x_prime)
    if a not in components or b not in components:
        return 1
    return 0 if components[a] == components[b] else 1


def d_r_path(world, x: Sequence[float], x_prime: Sequence[float], r: float, radius: float) -> float:
    """Shortest path length through cells of mass >= r; +inf when none exists."""
    g = world.grid
    if radius < g.diameter * (1 - 1e-12):
        raise InvalidInputError(
            f"radius {radius} is smaller than the cell diameter {g.diameter:.6g}; cells cannot witness it"
        )
    index, dist = _support_distances(world, float(r))
    a = cell_of(g, x)
    b = cell_of(g, x_prime)
    if a not in index or b not in index:
        return math.inf
    return float(dist[index[a], index[b]])


def _cell_feature_values(world, feature_map, cells: List[CellIndex]) -> np.ndarray:
    centers = np.array([center_of(world.grid, c) for c in cells])
    mapped = feature_map.map_points(centers)
    if mapped.ndim == 2:
        # one-hot codes become region ids, -1 for the zero vector
        return np.where(mapped.any(axis=1), mapped.argmax(axis=1), -1).astype(float)
    return mapped.astype(float)


def condition_risks(world, grid: GridSpec, feature_map=None, j: Optional[int] = None,
                    m_pairs: int = 10_000, rng: Optional[np.random.Generator] = None,
                    r: float = 0.0) -> Dict[str, Optional[float]]:
    """Monte-Carlo estimates of R_a, R_B, R_C and R_E.

    Draws ``m_pairs`` labeled points; each draw is scored with the exact
    cell-level loss of the cell it lands in. ``grid`` is the grid the feature
    map was learned on; the world grid must refine it. R_a and R_C are
    ``None`` when no feature map is given.
    """
    is_manifold = isinstance(world, ManifoldWorld)
    if is_manifold and j is None:
        raise InvalidInputError("manifold condition risks need the proximity parameter j")
    if grid.n != world.grid.n or world.grid.q % grid.q != 0:
        raise InvalidInputError(
            f"world grid (n={world.grid.n}, q={world.grid.q}) does not refine grid (n={grid.n}, q={grid.q})"
        )
    if rng is None:
        rng = make_rng(0)

    cells = _supported(world)
    position = {c: i for i, c in enumerate(cells)}

    if is_manifold:
        reach = (j + 1) * grid.diameter
        index, dist = _support_distances(world, float(r))
        # cells below the mass threshold r are unreachable
        mapped = np.array([index.get(c, -1) for c in cells])
        dist_cells = np.full((len(cells), len(cells)), np.inf)
        ok = mapped >= 0
        dist_cells[np.ix_(ok, ok)] = dist[np.ix_(mapped[ok], mapped[ok])]
        np.fill_diagonal(dist_cells, 0.0)
        near = dist_cells <= reach
    else:
        components = _support_components(world, grid.gamma)
        comp = np.array([components[c] for c in cells])
        near = comp[:, None] == comp[None, :]

    has = {lab: np.array([lab in world.cell_labels[c] for c in cells]) for lab in (0, 1)}
    loss_b = (near & has[0][None, :]).any(axis=1) & (near & has[1][None, :]).any(axis=1)

    loss_c = None
    if feature_map is not None:
        values = _cell_feature_values(world, feature_map, cells)
        if is_manifold:
            same = np.abs(values[:, None] - values[None, :]) <= j * grid.side + 1e-12
        else:
            same = values[:, None] == values[None, :]
        loss_c = (same & ~near).any(axis=1)

    X, y = world.sample(m_pairs, rng)
    drawn = np.array([position[tuple(int(v) for v in row)] for row in cells_of(world.grid, X)])
    label_one = float(np.mean(y))

    result: Dict[str, Optional[float]] = {
        "R_a_hat": None,
        "R_B_hat": float(np.mean(loss_b[drawn])),
        "R_C_hat": None,
        "R_E_hat": min(label_one, 1.0 - label_one),
    }
    if feature_map is not None:
        result["R_a_hat"] = float(np.mean(feature_map.off_support(X)))
        result["R_C_hat"] = float(np.mean(loss_c[drawn]))
    return result


# World factories

def _block(x0: int, y0: int, w: int, h: int) -> FrozenSet[CellIndex]:
    return frozenset((x, y) for x in range(x0, x0 + w) for y in range(y0, y0 + h))


def single_blob_world(q: int = 10, label: int = 0) -> ClusterWorld:
    grid = GridSpec(n=2, q=q)
    centre = q // 2 - 1
    return ClusterWorld(grid, (Blob(_block(centre, centre, 2, 2), label, 1.0),), margin=0.0)


def two_blob_world(q: int = 10, weights: Tuple[float, float] = (0.6, 0.4)) -> ClusterWorld:
    grid = GridSpec(n=2, q=q)
    size = max(1, q // 4)
    blobs = (
        Blob(_block(0, 0, size, size), 0, float(weights[0])),
        Blob(_block(q - size, q - size, size, size), 1, float(weights[1])),
    )
    return ClusterWorld(grid, blobs, margin=1.5 * grid.side)


def four_corner_world(q: int = 10) -> ClusterWorld:
    grid = GridSpec(n=2, q=q)
    size = max(1, q // 4)
    far = q - size
    blobs = (
        Blob(_block(0, 0, size, size), 0, 0.25),
        Blob(_block(far, 0, size, size), 1, 0.25),
        Blob(_block(0, far, size, size), 1, 0.25),
        Blob(_block(far, far, size, size), 0, 0.25),
    )
    return ClusterWorld(grid, blobs, margin=1.5 * grid.side)


def ring_and_disc_world(q: int = 10, ring_weight: float = 0.6) -> ClusterWorld:
    """A one-cell-thick square ring (label 0) around a 2x2 disc (label 1)."""
    if q < 8 or q % 2:
        raise InvalidInputError(f"ring-and-disc needs an even q >= 8, got {q}")
    grid = GridSpec(n=2, q=q)
    lo, hi = 1, q - 2
    ring = frozenset(
        (x, y) for x in range(lo, hi + 1) for y in range(lo, hi + 1)
        if x in (lo, hi) or y in (lo, hi)
    )
    disc = _block(q // 2 - 1, q // 2 - 1, 2, 2)
    blobs = (Blob(ring, 0, ring_weight), Blob(disc, 1, 1.0 - ring_weight))
    return ClusterWorld(grid, blobs, margin=1.5 * grid.side)


def touching_blobs_world(q: int = 10) -> ClusterWorld:
    """Two differently labeled blocks sharing an edge; no separation guarantee."""
    grid = GridSpec(n=2, q=q)
    blobs = (
        Blob(_block(2, 3, 2, 3), 0, 0.6),
        Blob(_block(4, 3, 2, 3), 1, 0.4),
    )
    return ClusterWorld(grid, blobs, margin=0.0)


def straight_tube_world(q: int = 10, row: Optional[int] = None, gamma_len: Optional[float] = None,
                        eps_b: float = 0.0, j: int = 1) -> ManifoldWorld:
    grid = GridSpec(n=2, q=q)
    row = q // 2 if row is None else row
    path = tuple((x, row) for x in range(1, q - 1))
    length = (len(path) - 1) * grid.side
    return ManifoldWorld(
        grid=grid, paths=(path,), gamma_len=gamma_len or 2 * length,
        tube_radius=grid.side / 4, eps_b=eps_b, j=j,
    )


def snake_path(q: int) -> Tuple[CellIndex, ...]:
    """Boustrophedon through odd rows: rightward rows span 1..q-2, leftward rows 1..q-3."""
    if q < 6 or q % 2:
        raise InvalidInputError(f"snake layout needs an even q >= 6, got {q}")
    path: List[CellIndex] = []
    rows = list(range(1, q, 2))
    for i, y in enumerate(rows):
        if i % 2 == 0:
            path.extend((x, y) for x in range(1, q - 1))
            if y + 2 < q:
                path.append((q - 2, y + 1))
        else:
            path.extend((x, y) for x in range(q - 3, 0, -1))
            if y + 2 < q:
                path.append((1, y + 1))
    return tuple(path)


def snake_tube_world(q: int = 20, gamma_len: float = 10.0, boundary: float = 0.02,
                     eps_b: float = 0.05, j: int = 3) -> ManifoldWorld:
    """Snake tube with a single label flip close to its start (label 1 before, 0 after)."""
    grid = GridSpec(n=2, q=q)
    return ManifoldWorld(
        grid=grid, paths=(snake_path(q),), gamma_len=gamma_len, tube_radius=grid.side / 4,
        boundaries=(boundary,) if boundary else (), base_label=1 if boundary else 0,
        eps_b=eps_b, j=j,
    )


def two_tube_world(q: int = 10, gamma_len: float = 5.0) -> ManifoldWorld:
    grid = GridSpec(n=2, q=q)
    lower = tuple((x, 2) for x in range(1, q - 1))
    upper = tuple((x, q - 3) for x in range(1, q - 1))
    return ManifoldWorld(
        grid=grid, paths=(lower, upper), gamma_len=gamma_len, tube_radius=grid.side / 4,
    )


WORLD_FACTORIES: Dict[str, Callable[..., object]] = {
    "single_blob": single_blob_world,
    "two_blob": two_blob_world,
    "four_corner": four_corner_world,
    "ring_and_disc": ring_and_disc_world,
    "touching_blobs": touching_blobs_world,
    "straight_tube": straight_tube_world,
    "snake_tube": snake_tube_world,
    "two_tube": two_tube_world,
}


def build_world(kind: str, **params):
    try:
        factory = WORLD_FACTORIES[kind]
    except KeyError:
        raise InvalidInputError(
            f"unknown world kind '{kind}' (known: {', '.join(sorted(WORLD_FACTORIES))})"
        ) from None
    try:
        return factory(**params)
    except TypeError as e:
        raise InvalidInputError(f"bad parameters for world '{kind}': {e}") from e


# CSV exchange

def write_points_csv(path, X: np.ndarray, y: Optional[np.ndarray] = None) -> None:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    frame = pd.DataFrame(X, columns=[f"x{i + 1}" for i in range(X.shape[1])])
    if y is not None:
        frame["y"] = np.asarray(y, dtype=np.int64)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def read_points_csv(path, n: int, labeled: Optional[bool] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Read ``x1..xn[,y]`` rows; malformed rows are reported by 1-based file line."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise InvalidInputError(f"{path}: empty file (expected header x1..x{n})") from None
    except pd.errors.ParserError as e:
        raise InvalidInputError(f"{path}: {e}") from e
    line_of = csv_line_numbers(path)

    expected = [f"x{i + 1}" for i in range(n)]
    columns = [c.strip() for c in frame.columns]
    has_y = columns == expected + ["y"]
    if columns != expected and not has_y:
        raise InvalidInputError(
            f"{path}: line {line_of(-1)}: expected header {','.join(expected)}[,y], got {','.join(columns)}"
        )
    if labeled is True and not has_y:
        raise InvalidInputError(f"{path}: line {line_of(-1)}: labeled sample needs a y column")

    values = frame[frame.columns[:n]].apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    bad = values.isna().any(axis=1) | ~np.isfinite(values.to_numpy(dtype=float)).all(axis=1)
    out_of_range = ((values < 0) | (values > 1)).any(axis=1)
    for mask, reason in ((bad, "non-numeric coordinate"), (out_of_range, "coordinate outside [0,1]")):
        if mask.any():
            row = int(np.flatnonzero(mask.to_numpy())[0])
            raise InvalidInputError(f"{path}: line {line_of(row)}: {reason}")
    X = values.to_numpy(dtype=float)

    y = None
    if has_y:
        labels = frame[frame.columns[n]].str.strip()
        invalid = ~labels.isin(["0", "1"])
        if invalid.any():
            row = int(np.flatnonzero(invalid.to_numpy())[0])
            raise InvalidInputError(f"{path}: line {line_of(row)}: label must be 0 or 1")
        y = labels.astype(np.int64).to_numpy()
    return X, y
