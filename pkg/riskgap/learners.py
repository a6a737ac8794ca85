"""
Learners - Exact 0/1-loss linear ERM and 1-nearest-neighbour, usable unchanged
on raw inputs and on feature-mapped inputs of any (small) dimension
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog
from sklearn.metrics import pairwise_distances_argmin

from riskgap.exceptions import InvalidInputError, InvalidStateError, UnsupportedInstanceError

logger = logging.getLogger(__name__)

MAX_DIM = 3
MAX_SAMPLE = 2000

_FLAT_TOL = 1e-9
_ANGLE_TOL = 1e-10
_RANK_TOL = 1e-12
_MARGIN_TOL = 1e-9
_KEY_DECIMALS = 9


@dataclass(frozen=True, eq=False)
class LinearClassifier:
    """Predicts 1 iff w.x + b > 0; points on the boundary predict 0."""

    w: np.ndarray
    b: float

    @property
    def dim(self) -> int:
        return int(self.w.shape[0])

    def decision(self, X) -> np.ndarray:
        X = _as_inputs(X, self.dim)
        return X @ self.w + self.b

    def predict(self, X) -> np.ndarray:
        return (self.decision(X) > 0).astype(np.int64)

    def tie_key(self) -> Tuple[float, ...]:
        """Lexicographic key of the normalized (w, b)."""
        return tuple(np.round(np.append(self.w, self.b), _KEY_DECIMALS).tolist())

    def __call__(self, X) -> np.ndarray:
        return self.predict(X)


def _as_inputs(X, d: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if d == 1 else arr.reshape(1, -1)
    if arr.ndim != 2 or (d is not None and arr.shape[1] != d):
        raise InvalidInputError(f"inputs of shape {np.shape(X)} do not match dimension {d}")
    return arr


def _as_labels(y, m: int) -> np.ndarray:
    labels = np.asarray(y).reshape(-1)
    if labels.shape[0] != m:
        raise InvalidInputError(f"{labels.shape[0]} labels for {m} inputs")
    if not np.isin(labels, (0, 1)).all():
        raise InvalidInputError("labels must be 0 or 1")
    return labels.astype(np.int64)


def predict_linear(c: LinearClassifier, x):
    """Label of one input (1-D array) or of a batch of inputs (2-D array)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim <= 1:
        if arr.reshape(-1).shape[0] != c.dim:
            raise InvalidInputError(f"input has dimension {arr.reshape(-1).shape[0]}, classifier has {c.dim}")
        return int(c.predict(arr.reshape(1, -1))[0])
    return c.predict(arr)


def _errors(c: LinearClassifier, X: np.ndarray, y: np.ndarray) -> int:
    return int(np.sum(c.predict(X) != y))


class _Pencil:
    """Hyperplanes through a flat of pivot points, parametrized by one angle.

    ``proj`` holds each location's coordinates in the 2-D complement of the
    pivots. Every vertex of the sweep is a group of events at one angle; the
    group's points and the flat lie on that vertex's hyperplane.
    ``bounds[g]`` charges on-plane locations their cheaper label, so it is a
    lower bound on any labeling reachable at vertex ``g``.
    """

    def __init__(self, proj: np.ndarray, c0: np.ndarray, c1: np.ndarray, flat: np.ndarray):
        n = proj.shape[0]
        live = np.flatnonzero(~flat)
        theta = np.arctan2(proj[live, 1], proj[live, 0])
        two_pi = 2 * math.pi
        # each point is positive for angles in (theta - pi/2, theta + pi/2)
        enter = np.mod(theta - math.pi / 2, two_pi)
        leave = np.mod(theta + math.pi / 2, two_pi)
        angles = np.concatenate([enter, leave])
        points = np.concatenate([live, live])
        entering = np.concatenate([np.ones(live.size, dtype=bool), np.zeros(live.size, dtype=bool)])
        cost_before = np.concatenate([c1[live], c0[live]])
        cost_after = np.concatenate([c0[live], c1[live]])

        # start the sweep inside the widest gap between events
        ordered = np.sort(angles)
        gaps = np.diff(np.concatenate([ordered, [ordered[0] + two_pi]]))
        widest = int(np.argmax(gaps))
        phi0 = ordered[widest] + gaps[widest] / 2
        shifted = np.mod(angles - phi0, two_pi)
        order = np.argsort(shifted, kind="stable")
        shifted, points, entering = shifted[order], points[order], entering[order]
        cost_before, cost_after = cost_before[order], cost_after[order]

        is_head = np.concatenate([[True], np.diff(shifted) > _ANGLE_TOL])
        group = np.cumsum(is_head) - 1
        heads = np.flatnonzero(is_head)
        start_positive = np.cos(phi0 - theta) > 0
        start = int(np.where(start_positive, c0[live], c1[live]).sum())

        before = np.add.reduceat(cost_before, heads)
        after = np.add.reduceat(cost_after, heads)
        mins = np.add.reduceat(np.minimum(c0, c1)[points], heads)
        running = start + np.concatenate([[0], np.cumsum(after - before)[:-1]])
        base = int(np.minimum(c0[flat], c1[flat]).sum())
        self.bounds = (running - before + mins + base).astype(np.int64)

        self._flat = flat
        self._points = points
        self._stops = np.append(heads[1:], len(points))
        self._heads = heads
        self._phi0 = phi0
        self._shifted = shifted
        self._enter_group = np.full(n, -1)
        self._enter_group[points[entering]] = group[entering]
        self._leave_group = np.full(n, -1)
        self._leave_group[points[~entering]] = group[~entering]
        self._start = np.zeros(n, dtype=bool)
        self._start[live] = start_positive

    @classmethod
    def sweep(cls, proj, c0, c1, flat) -> Optional["_Pencil"]:
        if flat.all():
            return None
        return cls(proj, c0, c1, flat)

    def on_plane(self, g: int) -> np.ndarray:
        mask = self._flat.copy()
        mask[self._points[self._heads[g]:self._stops[g]]] = True
        return mask

    def direction(self, g: int) -> np.ndarray:
        """Unit normal, in the pivot complement, of the hyperplane at vertex ``g``."""
        angle = float(np.mean(self._shifted[self._heads[g]:self._stops[g]])) + self._phi0
        return np.array([math.cos(angle), math.sin(angle)])

    def positive(self, g: int) -> np.ndarray:
        """Side of every off-plane location at vertex ``g``."""
        eg, lg = self._enter_group, self._leave_group
        # points positive at the start leave before they re-enter
        return np.where(self._start, (g < lg) | (g > eg), (eg < g) & (g < lg))


@dataclass(frozen=True, eq=False)
class _Labeling:
    """A realizable labeling of lifted locations and how it was reached.

    ``normal`` is the lifted normal of the sweep vertex that produced it and
    ``inner`` the labeling of the locations on that vertex's hyperplane;
    both are None for labelings of affinely independent locations and for
    constants.
    """

    positive: np.ndarray
    normal: Optional[np.ndarray] = None
    on_plane: Optional[np.ndarray] = None
    inner: Optional["_Labeling"] = None

    def key(self) -> Tuple[bool, ...]:
        return tuple(self.positive.tolist())


def _min_labelings(lifted: np.ndarray, c0: np.ndarray, c1: np.ndarray) -> Tuple[int, List[_Labeling]]:
    """Cheapest labelings of distinct lifted locations realizable by a half-space.

    Returns the minimum error count and the co-optimal labelings found, in
    lexicographic order of their predicted-1 masks. A labeling is reachable
    at a sweep vertex when its on-plane part is itself realizable, so
    on-plane locations are solved recursively in one dimension less.
    """
    k = lifted.shape[0]
    _, singular, vt = np.linalg.svd(lifted, full_matrices=False)
    rank = int(np.sum(singular > singular[0] * _RANK_TOL))
    if rank == k:
        # affinely independent locations: every labeling is realizable
        return int(np.minimum(c0, c1).sum()), [_Labeling(c1 > c0)]

    best_cost = int(min(c0.sum(), c1.sum()))
    ties: Dict[bytes, _Labeling] = {}
    for positive, cost in ((np.zeros(k, dtype=bool), int(c1.sum())), (np.ones(k, dtype=bool), int(c0.sum()))):
        if cost == best_cost:
            ties[positive.tobytes()] = _Labeling(positive)

    basis = vt[:rank].T
    reduced = lifted @ basis
    norms = np.linalg.norm(reduced, axis=1)
    for pivots in itertools.combinations(range(k), rank - 2):
        if best_cost == 0:
            break
        if pivots:
            plane = null_space(reduced[list(pivots)])
            if plane.shape[1] != 2:
                continue
        else:
            plane = np.eye(2)
        proj = reduced @ plane
        flat = np.linalg.norm(proj, axis=1) <= _FLAT_TOL * norms
        pencil = _Pencil.sweep(proj, c0, c1, flat)
        if pencil is None or pencil.bounds.min() > best_cost:
            continue
        for g in np.argsort(pencil.bounds, kind="stable"):
            g = int(g)
            bound = int(pencil.bounds[g])
            if bound > best_cost:
                break
            on = pencil.on_plane(g)
            if on.all():
                continue
            sub_cost, sub_labelings = _min_labelings(lifted[on], c0[on], c1[on])
            cost = bound - int(np.minimum(c0[on], c1[on]).sum()) + sub_cost
            if cost > best_cost:
                continue
            if cost < best_cost:
                best_cost, ties = cost, {}
            positive = pencil.positive(g)
            positive[on] = sub_labelings[0].positive
            if positive.tobytes() not in ties:
                normal = basis @ (plane @ pencil.direction(g))
                ties[positive.tobytes()] = _Labeling(positive, normal, on, sub_labelings[0])
    return best_cost, sorted(ties.values(), key=_Labeling.key)


def _classifier(v: np.ndarray) -> Optional[LinearClassifier]:
    w, b = v[:-1], float(v[-1])
    scale = np.linalg.norm(w)
    if scale == 0:
        return None
    return LinearClassifier(w / scale, b / scale)


def _max_margin(lifted: np.ndarray, positive: np.ndarray) -> Optional[LinearClassifier]:
    """Maximum-margin classifier producing ``positive`` on the lifted locations, or None."""
    n = lifted.shape[1]
    signs = np.where(positive, 1.0, -1.0)
    # variables (w, b, t): maximize t subject to sign * (w.x + b) >= t with |w|, |b| <= 1
    A_ub = np.hstack([-signs[:, None] * lifted, np.ones((lifted.shape[0], 1))])
    objective = np.zeros(n + 1)
    objective[-1] = -1.0
    result = linprog(
        objective,
        A_ub=A_ub,
        b_ub=np.zeros(lifted.shape[0]),
        bounds=[(-1.0, 1.0)] * n + [(None, 1.0)],
        method="highs",
    )
    if result.status != 0 or -result.fun <= _MARGIN_TOL:
        return None
    return _classifier(result.x[:n])


def _tilt(lifted: np.ndarray, labeling: _Labeling) -> np.ndarray:
    """Lifted normal realizing ``labeling``: the vertex normal tilted toward the on-plane labels."""
    if labeling.normal is None:
        targets = np.where(labeling.positive, 1.0, -1.0)
        v, *_ = np.linalg.lstsq(lifted, targets, rcond=None)
        return v
    on = labeling.on_plane
    delta = _tilt(lifted[on], labeling.inner)
    margin = np.abs(lifted[~on] @ labeling.normal).min()
    spread = np.abs(lifted[~on] @ delta).max()
    eps = 1.0 if spread == 0 else 0.5 * margin / spread
    return labeling.normal + eps * delta


def _realize(lifted: np.ndarray, labeling: _Labeling, X: np.ndarray, y: np.ndarray,
             cost: int) -> Optional[LinearClassifier]:
    """Classifier for one co-optimal labeling whose error count on (X, y) is ``cost``, or None."""
    d = lifted.shape[1] - 1
    if not labeling.positive.any():
        return LinearClassifier(np.zeros(d), 0.0)
    if labeling.positive.all():
        return LinearClassifier(np.zeros(d), 1.0)
    for build in (lambda: _max_margin(lifted, labeling.positive), lambda: _classifier(_tilt(lifted, labeling))):
        candidate = build()
        if candidate is not None and _errors(candidate, X, y) == cost:
            return candidate
    return None


def erm_linear_01(X, y, max_dim: int = MAX_DIM, max_sample: int = MAX_SAMPLE) -> Tuple[LinearClassifier, float]:
    """Exact empirical risk minimization over linear classifiers under 0/1 loss.

    Duplicate inputs are merged with per-location label counts. Every
    candidate hyperplane passes through a set of pivot points; the remaining
    freedom is one angle, swept exactly, and points lying on a candidate
    hyperplane are labeled by solving the same problem on them alone.

    Each co-optimal labeling found is realized as its maximum-margin
    classifier with ||w|| = 1 (or w = 0); the smallest (w, b) in
    lexicographic order is returned. A realized classifier whose error
    count differs from the optimum is never returned.
    """
    X = _as_inputs(X)
    m, d = X.shape
    if d < 1 or d > max_dim or m < 1 or m > max_sample:
        raise UnsupportedInstanceError(
            f"exact ERM supports 1 <= d <= {max_dim} and 1 <= m <= {max_sample}; got d={d}, m={m}"
        )
    y = _as_labels(y, m)

    locations, inverse = np.unique(X, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    c1 = np.bincount(inverse, weights=y, minlength=len(locations)).astype(np.int64)
    c0 = np.bincount(inverse, minlength=len(locations)).astype(np.int64) - c1
    lifted = np.hstack([locations, np.ones((len(locations), 1))])

    cost, labelings = _min_labelings(lifted, c0, c1)
    best: Optional[LinearClassifier] = None
    for labeling in labelings:
        candidate = _realize(lifted, labeling, X, y, cost)
        if candidate is None:
            logger.warning(f"co-optimal labeling with {cost} errors could not be realized; trying the next one")
            continue
        if best is None or candidate.tie_key() < best.tie_key():
            best = candidate
    if best is None:
        raise InvalidStateError(f"no classifier realizes the optimal {cost} errors over {m} points")

    logger.debug(f"ERM over {m} points in {d} dimensions: {cost} errors, {len(labelings)} co-optimal labelings")
    return best, cost / m


@dataclass(frozen=True, eq=False)
class NearestNeighborModel:
    X: np.ndarray
    y: np.ndarray

    def predict(self, Xq) -> np.ndarray:
        Xq = _as_inputs(Xq, self.X.shape[1])
        if Xq.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        # ties go to the lowest training index
        return self.y[pairwise_distances_argmin(Xq, self.X, metric="euclidean")]

    def __call__(self, Xq) -> np.ndarray:
        return self.predict(Xq)


def one_nn_fit(X, y) -> NearestNeighborModel:
    X = _as_inputs(X)
    if X.shape[0] == 0:
        raise InvalidInputError("1-NN needs at least one training point")
    return NearestNeighborModel(X.copy(), _as_labels(y, X.shape[0]))


def one_nn_predict(model: NearestNeighborModel, x):
    arr = np.asarray(x, dtype=float)
    if arr.ndim <= 1:
        return int(model.predict(arr.reshape(1, -1))[0])
    return model.predict(arr)


def transform_sample(fm, X, y=None):
    """Apply a learned feature map pointwise; labels and order are unchanged."""
    if fm is None or not hasattr(fm, "map_points"):
        raise InvalidStateError("transform_sample needs a feature map built from a passed property test")
    Z = np.asarray(fm.map_points(X), dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    return Z if y is None else (Z, np.asarray(y))


def _fit_erm(X, y, **options) -> LinearClassifier:
    return erm_linear_01(X, y, **options)[0]


def _fit_one_nn(X, y, **options) -> NearestNeighborModel:
    return one_nn_fit(X, y)


# hypothesis learners by id; each maps (X, y) to a vectorized predictor
HYPOTHESIS_LEARNERS: Dict[str, Callable] = {
    "erm_linear": _fit_erm,
    "one_nn": _fit_one_nn,
}
