"""
Bound calculator - Closed-form risk bounds and the numerical pieces they need

All logarithms are natural logarithms.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats import binom

from riskgap.exceptions import InvalidInputError, InvalidStateError
from riskgap.grid import as_points
from riskgap.learners import MAX_DIM, MAX_SAMPLE, erm_linear_01

logger = logging.getLogger(__name__)

PHI_RATIO = 2 / (1 + math.sqrt(5))
# exp() of anything larger overflows a double
MAX_EXPONENT = 700.0

Side = Union[float, Fraction]


def _check_delta(delta: float, allow_one: bool = False) -> None:
    upper_ok = delta <= 1 if allow_one else delta < 1
    if not (delta > 0 and upper_ok):
        interval = "(0, 1]" if allow_one else "(0, 1)"
        raise InvalidInputError(f"delta must lie in {interval}, got {delta}")


def _cells_per_axis(s: Side) -> int:
    if s <= 0 or s > 1:
        raise InvalidInputError(f"cell side must lie in (0, 1], got {s}")
    q = round(1 / s)
    if not math.isclose(q * float(s), 1.0, rel_tol=0, abs_tol=1e-9):
        raise InvalidInputError(f"cell side {s} does not tile [0,1]: 1/s is not an integer")
    return q


@dataclass(frozen=True)
class AlphaProblem:
    """Empty-bin mass problem: k_bins equal bins, m_l labeled draws, confidence delta."""

    k_bins: float
    delta: float
    m_l: int

    def __post_init__(self):
        if not self.k_bins > 0:
            raise InvalidInputError(f"bin count must be positive, got {self.k_bins}")
        _check_delta(self.delta, allow_one=True)
        if int(self.m_l) != self.m_l or self.m_l < 1:
            raise InvalidInputError(f"m_l must be a positive integer, got {self.m_l}")


def alpha_objective(t, k_bins: float, delta: float, m_l: int):
    """g(t) = (k - delta * (1 - t)^(-m_l)) * t, evaluated in log space; -inf on overflow."""
    t_arr = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        exponent = -m_l * np.log1p(-t_arr)
        growth = np.exp(np.minimum(exponent, MAX_EXPONENT))
        value = (k_bins - delta * growth) * t_arr
    value = np.where(exponent > MAX_EXPONENT, -np.inf, value)
    value = np.where(t_arr == 0, 0.0, value)
    return float(value) if value.ndim == 0 else value


def alpha_max(p: AlphaProblem, tol: float = 1e-10, max_iterations: int = 200) -> Tuple[float, float]:
    """Maximize the concave g on [0, 1] by golden-section search.

    Returns (alpha, t_star) with alpha clamped below at 0; t_star is 0 when
    the clamp applies.
    """

    def g(t: float) -> float:
        return alpha_objective(t, p.k_bins, p.delta, p.m_l)

    lo, hi = 0.0, 1.0
    x1 = hi - PHI_RATIO * (hi - lo)
    x2 = lo + PHI_RATIO * (hi - lo)
    f1, f2 = g(x1), g(x2)
    iteration = 0
    while hi - lo > tol and iteration < max_iterations:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - PHI_RATIO * (hi - lo)
            f1 = g(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + PHI_RATIO * (hi - lo)
            f2 = g(x2)
        iteration += 1

    t_star = 0.5 * (lo + hi)
    alpha = g(t_star)
    if not alpha > 0:
        return 0.0, 0.0
    return alpha, t_star


def finite_class_bound(log_H: float, m: int, delta: float) -> float:
    """Risk cap for a zero-training-error hypothesis from a finite class."""
    if log_H < 0:
        raise InvalidInputError(f"log|H| must be non-negative, got {log_H}")
    if m < 1:
        raise InvalidInputError(f"sample size must be positive, got {m}")
    _check_delta(delta, allow_one=True)
    return (log_H + math.log(1 / delta)) / m


def vc_lower_bound(emp_risk: float, d_vc: int, m: int, delta: float) -> float:
    """Lower confidence bound on true risk from empirical risk and VC dimension; may be negative."""
    if d_vc < 1 or m < 1:
        raise InvalidInputError(f"VC dimension and sample size must be positive, got {d_vc}, {m}")
    if 2 * math.e * m / d_vc <= 1:
        raise InvalidInputError(f"2e*m/d must exceed 1 (m={m}, d={d_vc})")
    _check_delta(delta)
    slack = math.sqrt((8 * d_vc * math.log(2 * math.e * m / d_vc) + 8 * math.log(4 / delta)) / m)
    return emp_risk - slack


def eps_A_cluster(s: Side, n: int, m_u: int, delta: float) -> float:
    q = _cells_per_axis(s)
    _check_delta(delta)
    if m_u < 1 or n < 1:
        raise InvalidInputError(f"n and m_u must be positive, got {n}, {m_u}")
    try:
        cells = float(q ** n)
    except OverflowError:
        raise InvalidInputError(f"cell count {q}^{n} overflows") from None
    if math.isinf(cells * math.log(2)):
        raise InvalidInputError(f"cell count {q}^{n} overflows")
    return (cells * math.log(2) + math.log(3 / delta)) / m_u


def eps_A_manifold(s: Side, n: int, gamma_len: float, m_u: int, delta: float) -> float:
    _cells_per_axis(s)
    _check_delta(delta)
    if gamma_len <= 0:
        raise InvalidInputError(f"manifold length must be positive, got {gamma_len}")
    if m_u < 1 or n < 1:
        raise InvalidInputError(f"n and m_u must be positive, got {n}, {m_u}")
    s = float(s)
    return ((n * gamma_len / s) * math.log(3) - n * math.log(s) + math.log(3 / delta)) / m_u


def eps_max_Z_cluster(eps_C: float, k: int, m_l: int, delta: float) -> float:
    _check_delta(delta)
    alpha, _ = alpha_max(AlphaProblem(k_bins=k + 1, delta=delta / 3, m_l=m_l))
    return eps_C + alpha


def manifold_bins(gamma_len: float, j: int, s: Side) -> float:
    """Number of arc intervals of length j*s along a curve of length gamma_len."""
    if j < 1:
        raise InvalidInputError(f"j must be a positive integer, got {j}")
    bins = gamma_len / (j * float(s))
    if bins < 1:
        raise InvalidInputError(f"gamma/(j*s) = {bins:.6g} must be at least 1")
    if abs(bins - round(bins)) > 1e-9:
        logger.warning(f"gamma/(j*s) = {bins:.6g} is not an integer; using it as a real bin count")
    return bins


def eps_max_Z_manifold(eps_A: float, eps_B: float, gamma_len: float, j: int, s: Side,
                       m_l: int, delta: float) -> float:
    _check_delta(delta)
    if not 0 <= eps_B <= 1:
        raise InvalidInputError(f"eps_B must lie in [0, 1], got {eps_B}")
    bins = manifold_bins(gamma_len, j, s)
    alpha, _ = alpha_max(AlphaProblem(k_bins=bins, delta=delta / 3, m_l=m_l))
    return eps_A + eps_B + alpha


def beta_pairwise(result, sample, subset=None, max_sample: int = MAX_SAMPLE, max_dim: int = MAX_DIM) -> float:
    """Smallest pairwise linear-ERM error count between two regions, over the sample size.

    ``sample`` must be the sample the cluster test ran on; ``subset``
    optionally restricts to a subsample, whose size then becomes the
    denominator.
    """
    if not result.passed or result.k < 2:
        raise InvalidStateError(f"beta needs a passed cluster test with k >= 2 (k={result.k})")
    X = as_points(result.grid, sample)
    regions = np.asarray(result.component_of)
    if regions.shape[0] != X.shape[0]:
        raise InvalidInputError("beta must be computed on the sample that produced the cluster test")
    if subset is not None:
        subset = np.asarray(subset)
        X, regions = X[subset], regions[subset]
    m = X.shape[0]
    if m == 0:
        raise InvalidInputError("beta needs a non-empty sample")

    best = None
    for i, k in itertools.combinations(range(result.k), 2):
        mask = (regions == i) | (regions == k)
        if not mask.any():
            continue
        labels = (regions[mask] == i).astype(np.int64)
        _, risk = erm_linear_01(X[mask], labels, max_dim=max_dim, max_sample=max_sample)
        errors = int(round(risk * int(mask.sum())))
        best = errors if best is None else min(best, errors)
    beta = (best or 0) / m
    logger.info(f"beta = {beta:.6g} from {result.k * (result.k - 1) // 2} region pairs over {m} points")
    return beta


def eps_min_cluster(beta: float, n: int, m_u: int, delta: float) -> float:
    return vc_lower_bound(beta, n + 1, m_u, delta / 3)


def r_tau(s: Side, delta: float, gamma_len: float) -> float:
    """Tail threshold s*delta/(3*gamma) used when inverting cell counts for r."""
    _check_delta(delta)
    return float(s) * delta / (3 * gamma_len)


def _tail_inverse(m_u: int, count: int, tau: float, tol: float = 1e-12) -> float:
    if count <= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if binom.sf(count - 1, m_u, mid) >= tau:
            hi = mid
        else:
            lo = mid
    return hi


def binomial_r(m_u: int, occupied_counts: Mapping[Any, int], tau: float) -> float:
    """Largest admissible r: the minimum over cells of min{p : P[Bin(m_u, p) >= count] >= tau}."""
    if not 0 < tau < 1:
        raise InvalidInputError(f"tau must lie in (0, 1), got {tau}")
    counts = [int(c) for c in occupied_counts.values()]
    if not counts:
        raise InvalidInputError("binomial_r needs at least one occupied cell")
    if any(c > m_u for c in counts):
        raise InvalidInputError("a cell count exceeds the sample size")
    # the tail is increasing in p and decreasing in count, so the smallest count decides
    return _tail_inverse(m_u, min(counts), tau)


def ssl_sample_complexity(log_H_pruned: float, eps: float, delta: float) -> int:
    """Labeled sample size (1/eps)(log|H'| + log(2/delta)), rounded up."""
    if not 0 < eps <= 1:
        raise InvalidInputError(f"eps must lie in (0, 1], got {eps}")
    _check_delta(delta)
    if log_H_pruned < 0:
        raise InvalidInputError(f"log|H'| must be non-negative, got {log_H_pruned}")
    value = (log_H_pruned + math.log(2 / delta)) / eps
    return int(math.ceil(round(value, 9)))


class DomainAssumptions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    eps_B: float = Field(0.0, ge=0.0, le=1.0)
    eps_E: Optional[float] = Field(None, gt=0.0, le=0.5)


# standard errors of slack given to an oracle estimate before a condition counts as broken
VERDICT_Z = 3.0


class ConditionVerdict(BaseModel):
    """One sufficient condition checked against an oracle estimate or an analysis."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    condition: Literal["A", "B", "C", "D", "E", "F"]
    relation: Literal["<=", ">=", "analysis"]
    measured: Optional[float] = None
    threshold: Optional[float] = None
    tolerance: float = 0.0
    holds: Optional[bool] = None


class CompositionVerdict(BaseModel):
    """Upper bound from conditions A-D, lower bound and gap from A-F.

    A condition whose ``holds`` is None was not checked and does not block
    the composition; one that is False does.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    conditions: List[ConditionVerdict]
    upper_bound: Optional[float] = None
    lower_bound: Optional[float] = None
    gap_bound: Optional[float] = None
    upper_holds: bool = False
    gap_holds: bool = False

    def condition(self, name: str) -> ConditionVerdict:
        return next(v for v in self.conditions if v.condition == name)


def check_condition(condition: str, relation: str, measured: Optional[float], threshold: Optional[float],
                    m_pairs: int) -> ConditionVerdict:
    """Compare a Monte Carlo rate over ``m_pairs`` draws with its threshold."""
    if m_pairs < 1:
        raise InvalidInputError(f"m_pairs must be positive, got {m_pairs}")
    if measured is None or threshold is None:
        return ConditionVerdict(condition=condition, relation=relation, measured=measured, threshold=threshold)
    tolerance = VERDICT_Z * math.sqrt(measured * (1.0 - measured) / m_pairs)
    if relation == "<=":
        holds = measured <= threshold + tolerance
    else:
        holds = measured >= threshold - tolerance
    return ConditionVerdict(condition=condition, relation=relation, measured=measured, threshold=threshold,
                            tolerance=tolerance, holds=bool(holds))


class BoundReport(BaseModel):
    """Every bound quantity of one theorem instance, with the inputs that produced it."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    example: str
    applicable: bool = True
    eps_A_hat: Optional[float] = None
    eps_A: Optional[float] = None
    eps_B: float = 0.0
    eps_C: Optional[float] = None
    eps_E: Optional[float] = None
    alpha_term: Optional[float] = None
    t_star: Optional[float] = None
    eps_max_Z: Optional[float] = None
    beta: Optional[float] = None
    eps_min: Optional[float] = None
    delta_R_lower: Optional[float] = None
    r: Optional[float] = None
    delta: float
    vacuous: bool = False
    params: Dict[str, Any] = Field(default_factory=dict)
    verdict: Optional[CompositionVerdict] = None

    @model_validator(mode="after")
    def _check_composition(self):
        if self.eps_max_Z is not None and self.eps_C is not None and self.alpha_term is not None:
            expected = self.eps_C + self.alpha_term + self.eps_B
            if not math.isclose(self.eps_max_Z, expected, rel_tol=1e-12, abs_tol=1e-15):
                raise ValueError(f"eps_max_Z {self.eps_max_Z} is not eps_C + eps_B + alpha = {expected}")
        return self


def _is_vacuous(eps_max_Z: Optional[float], eps_min: Optional[float], delta_R: Optional[float]) -> bool:
    return bool(
        (eps_max_Z is not None and eps_max_Z >= 1)
        or (eps_min is not None and eps_min <= 0)
        or (delta_R is not None and delta_R <= 0)
    )


def not_applicable_report(example: str, delta: float, params: Dict[str, Any]) -> BoundReport:
    return BoundReport(example=example, applicable=False, delta=delta, vacuous=True, params=params)


def cluster_bounds(n: int, s: Side, k: int, m_u: int, m_l: int, delta: float,
                   beta: Optional[float] = None, beta_sample_size: Optional[int] = None,
                   eps_E: Optional[float] = None, eps_A_hat: float = 0.0) -> BoundReport:
    """Cluster-example bounds without sampling; beta may come from data or be assumed."""
    eps_A = eps_A_cluster(s, n, m_u, delta)
    eps_C = eps_A
    alpha, t_star = alpha_max(AlphaProblem(k_bins=k + 1, delta=delta / 3, m_l=m_l))
    eps_max_Z = eps_C + alpha
    eps_min = delta_R = None
    m_beta = beta_sample_size or m_u
    if beta is not None:
        eps_min = eps_min_cluster(beta, n, m_beta, delta)
        delta_R = eps_min - eps_max_Z
    vacuous = _is_vacuous(eps_max_Z, eps_min, delta_R)
    if vacuous:
        logger.info(f"Cluster bound is vacuous (eps_max_Z={eps_max_Z:.4g}, delta_R={delta_R})")
    return BoundReport(
        example="cluster", eps_A_hat=eps_A_hat, eps_A=eps_A, eps_B=0.0, eps_C=eps_C, eps_E=eps_E,
        alpha_term=alpha, t_star=t_star, eps_max_Z=eps_max_Z, beta=beta, eps_min=eps_min,
        delta_R_lower=delta_R, delta=delta, vacuous=vacuous,
        params={"n": n, "s": float(s), "k": k, "m_u": m_u, "m_l": m_l, "beta_sample_size": m_beta},
    )


def manifold_bounds(n: int, s: Side, gamma_len: float, j: int, m_u: int, m_l: int, delta: float,
                    eps_B: float, occupied_counts: Optional[Mapping[Any, int]] = None,
                    eps_A_hat: float = 0.0) -> BoundReport:
    """Manifold-example bounds without sampling; the report carries no beta, eps_min or gap."""
    eps_A = eps_A_manifold(s, n, gamma_len, m_u, delta)
    eps_C = eps_A
    bins = manifold_bins(gamma_len, j, s)
    alpha, t_star = alpha_max(AlphaProblem(k_bins=bins, delta=delta / 3, m_l=m_l))
    eps_max_Z = eps_max_Z_manifold(eps_A, eps_B, gamma_len, j, s, m_l, delta)
    r = None
    if occupied_counts:
        r = binomial_r(m_u, occupied_counts, r_tau(s, delta, gamma_len))
    vacuous = _is_vacuous(eps_max_Z, None, None)
    if vacuous:
        logger.info(f"Manifold bound is vacuous (eps_max_Z={eps_max_Z:.4g})")
    return BoundReport(
        example="manifold", eps_A_hat=eps_A_hat, eps_A=eps_A, eps_B=eps_B, eps_C=eps_C,
        alpha_term=alpha, t_star=t_star, eps_max_Z=eps_max_Z, r=r, delta=delta, vacuous=vacuous,
        params={"n": n, "s": float(s), "gamma_len": gamma_len, "j": j, "m_u": m_u, "m_l": m_l},
    )


def compose_bounds(report: BoundReport, risks: Optional[Mapping[str, Optional[float]]] = None,
                   m_pairs: int = 1) -> CompositionVerdict:
    """Compose a report's epsilons into bounds and judge the conditions behind them.

    ``risks`` holds oracle estimates (R_a_hat, R_B_hat, R_C_hat, R_E_hat)
    over ``m_pairs`` labeled draws. D is established by the analysis that
    produced eps_max_Z, F by the one that produced eps_min.
    """
    risks = risks or {}
    if report.applicable:
        a = check_condition("A", "<=", risks.get("R_a_hat"), report.eps_A, m_pairs)
    else:
        a = ConditionVerdict(condition="A", relation="<=", threshold=report.eps_A, holds=False)
    d_holds = report.eps_max_Z is not None
    f_holds = report.eps_min is not None if report.example == "cluster" else None
    conditions = [
        a,
        check_condition("B", "<=", risks.get("R_B_hat"), report.eps_B, m_pairs),
        check_condition("C", "<=", risks.get("R_C_hat"), report.eps_C, m_pairs),
        ConditionVerdict(condition="D", relation="analysis", holds=d_holds),
        check_condition("E", ">=", risks.get("R_E_hat"), report.eps_E, m_pairs),
        ConditionVerdict(condition="F", relation="analysis", holds=f_holds),
    ]
    upper_holds = report.applicable and d_holds and all(v.holds is not False for v in conditions[:4])
    gap = None
    if report.eps_min is not None and report.eps_max_Z is not None:
        gap = report.eps_min - report.eps_max_Z
    gap_holds = upper_holds and gap is not None and all(v.holds is not False for v in conditions[4:])
    return CompositionVerdict(
        conditions=conditions, upper_bound=report.eps_max_Z, lower_bound=report.eps_min,
        gap_bound=gap, upper_holds=bool(upper_holds), gap_holds=bool(gap_holds),
    )
