"""
Theorem engine - Compose property tests, learners and bounds into risk reports,
select a feature learner by its bound, validate the bounds by simulation and
emit figure data
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from riskgap.bound_calc import (
    AlphaProblem,
    BoundReport,
    CompositionVerdict,
    ConditionVerdict,
    DomainAssumptions,
    alpha_max,
    alpha_objective,
    check_condition,
    cluster_bounds,
    compose_bounds,
    eps_A_cluster,
    eps_A_manifold,
    eps_min_cluster,
    manifold_bins,
    manifold_bounds,
    not_applicable_report,
    beta_pairwise,
)
from riskgap.cluster_pipeline import cluster_feature_map, cluster_property_test
from riskgap.exceptions import InvalidInputError
from riskgap.grid import GridSpec, as_points, occupied_cells
from riskgap.learners import HYPOTHESIS_LEARNERS, MAX_DIM, MAX_SAMPLE, transform_sample
from riskgap.manifold_pipeline import DEFAULT_MAX_EXPANSIONS, manifold_feature_map, manifold_property_test
from riskgap.synthgen import (
    MIN_M_TEST,
    ClusterWorld,
    ManifoldWorld,
    build_world,
    condition_risks,
    make_rng,
    sample_labeled,
    sample_unlabeled,
    true_risk,
)

logger = logging.getLogger(__name__)

# random streams derived from one seed
STREAM_UNLABELED = 0
STREAM_LABELED = 1
STREAM_BETA = 2
STREAM_TEST = 3
STREAM_CONDITIONS = 4

MIN_TRIALS = 100
FIGURE_KINDS = ("alpha_curve", "alpha_surface", "manifold_surface", "cluster_gap_surface")

# parameters of the published surfaces
ALPHA_CURVE_K = 10
ALPHA_CURVE_M_L = (50, 100, 200, 500, 1000)
FIGURE_DELTA = 0.05
CLUSTER_FIGURE = {"beta": 0.2, "s": 0.1, "n": 2, "k": 2}
MANIFOLD_FIGURE = {"eps_B": 0.05, "j": 3, "s": 0.1, "n": 2, "gamma_len": 20.0}


class WorldSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str
    params: Dict[str, Any] = Field(default_factory=dict)


class ScenarioConfig(BaseModel):
    """Everything one theorem run needs; manifold-only fields are present exactly for manifold runs."""

    model_config = ConfigDict(extra="forbid")

    example: Literal["cluster", "manifold"]
    n: int = Field(2, ge=1)
    q: int = Field(..., ge=1)
    world: WorldSpec
    m_u: int = Field(..., ge=1)
    m_l: int = Field(..., ge=1)
    delta: float = Field(..., gt=0.0, lt=1.0)
    assumptions: DomainAssumptions = Field(default_factory=DomainAssumptions)
    gamma_len: Optional[float] = Field(None, gt=0.0)
    j: Optional[int] = Field(None, ge=1)
    beta: Optional[float] = Field(None, ge=0.0, le=1.0)
    beta_sample_size: Optional[int] = Field(None, ge=2)
    m_test: int = Field(100_000, ge=MIN_M_TEST)
    seed: int = Field(0, ge=0)
    max_expansions: int = Field(DEFAULT_MAX_EXPANSIONS, ge=1)
    strict_self_intersection: bool = False
    erm_max_dim: int = Field(MAX_DIM, ge=1, le=MAX_DIM)
    erm_max_sample: int = Field(MAX_SAMPLE, ge=1, le=MAX_SAMPLE)
    condition_pairs: int = Field(20_000, ge=1)

    @model_validator(mode="after")
    def _example_fields(self):
        if self.example == "manifold":
            if self.gamma_len is None or self.j is None:
                raise ValueError("manifold scenarios need gamma_len and j")
            if self.beta is not None or self.beta_sample_size is not None:
                raise ValueError("beta applies to cluster scenarios only")
        else:
            if self.gamma_len is not None or self.j is not None:
                raise ValueError("gamma_len and j apply to manifold scenarios only")
            if self.assumptions.eps_B != 0:
                raise ValueError("cluster scenarios assume eps_B = 0")
        return self

    @property
    def grid(self) -> GridSpec:
        return GridSpec(n=self.n, q=self.q)


class RegistryEntry(BaseModel):
    """One selectable (feature learner, hypothesis learner, property test) combination."""

    model_config = ConfigDict(extra="forbid")

    name: str
    feature_learner: Literal["identity", "cluster", "manifold"]
    hypothesis_learner: str
    test: Optional[Literal["none", "cluster", "manifold"]] = None
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _resolve(self):
        if self.hypothesis_learner not in HYPOTHESIS_LEARNERS:
            raise ValueError(
                f"unknown hypothesis learner '{self.hypothesis_learner}' "
                f"(known: {', '.join(sorted(HYPOTHESIS_LEARNERS))})"
            )
        expected = "none" if self.feature_learner == "identity" else self.feature_learner
        if self.test is None:
            self.test = expected
        elif self.test != expected:
            raise ValueError(f"feature learner '{self.feature_learner}' pairs with test '{expected}', not '{self.test}'")
        return self


@dataclass(frozen=True, eq=False)
class ComposedHypothesis:
    """h^Z o f: a hypothesis trained on features, applied to raw inputs."""

    feature_map: Any
    inner: Callable

    def predict(self, X) -> np.ndarray:
        return self.inner(transform_sample(self.feature_map, X))

    def __call__(self, X) -> np.ndarray:
        return self.predict(X)


@dataclass(frozen=True, eq=False)
class TheoremArtifacts:
    test_result: Any
    feature_map: Any = None
    h: Optional[Callable] = None
    h_Z: Optional[ComposedHypothesis] = None
    S_u: Optional[np.ndarray] = None
    X_l: Optional[np.ndarray] = None
    y_l: Optional[np.ndarray] = None


def _world_for(cfg: ScenarioConfig):
    world = build_world(cfg.world.kind, **cfg.world.params)
    wanted = ClusterWorld if cfg.example == "cluster" else ManifoldWorld
    if not isinstance(world, wanted):
        raise InvalidInputError(f"world '{cfg.world.kind}' does not fit a {cfg.example} scenario")
    if world.grid.n != cfg.n:
        raise InvalidInputError(f"world dimension {world.grid.n} differs from scenario n={cfg.n}")
    return world


def _params(cfg: ScenarioConfig) -> Dict[str, Any]:
    return cfg.model_dump(mode="json")


def run_cluster_theorem(cfg: ScenarioConfig) -> Tuple[BoundReport, TheoremArtifacts]:
    """Cluster example end to end: test, bounds (with beta), feature map, h and h^Z."""
    if cfg.example != "cluster":
        raise InvalidInputError(f"run_cluster_theorem needs a cluster scenario, got {cfg.example}")
    world = _world_for(cfg)
    grid = cfg.grid

    S_u = sample_unlabeled(world, cfg.m_u, make_rng(cfg.seed, STREAM_UNLABELED))
    result = cluster_property_test(grid, S_u)
    if not result.passed:
        return not_applicable_report("cluster", cfg.delta, _params(cfg)), TheoremArtifacts(result, S_u=S_u)

    beta = cfg.beta
    m_beta = cfg.m_u
    if beta is None:
        m_beta = min(cfg.beta_sample_size or cfg.erm_max_sample, cfg.m_u)
        subset = None
        if m_beta < cfg.m_u:
            subset = np.sort(make_rng(cfg.seed, STREAM_BETA).choice(cfg.m_u, size=m_beta, replace=False))
        beta = beta_pairwise(result, S_u, subset=subset, max_sample=cfg.erm_max_sample, max_dim=cfg.erm_max_dim)
    elif cfg.beta_sample_size is not None:
        m_beta = cfg.beta_sample_size

    report = cluster_bounds(
        n=cfg.n, s=grid.s, k=result.k, m_u=cfg.m_u, m_l=cfg.m_l, delta=cfg.delta,
        beta=beta, beta_sample_size=m_beta, eps_E=cfg.assumptions.eps_E, eps_A_hat=result.r_a_hat,
    )
    report = report.model_copy(update={"params": {**report.params, "scenario": _params(cfg)}})

    fm = cluster_feature_map(result)
    X_l, y_l = sample_labeled(world, cfg.m_l, make_rng(cfg.seed, STREAM_LABELED))
    learner = HYPOTHESIS_LEARNERS["erm_linear"]
    options = {"max_dim": cfg.erm_max_dim, "max_sample": cfg.erm_max_sample}
    h = learner(X_l, y_l, **options)
    inner = learner(transform_sample(fm, X_l), y_l, **options)
    return report, TheoremArtifacts(result, fm, h, ComposedHypothesis(fm, inner), S_u, X_l, y_l)


def run_manifold_theorem(cfg: ScenarioConfig) -> Tuple[BoundReport, TheoremArtifacts]:
    """Manifold example end to end: curve search, bounds, arc-length map and 1-NN on both inputs."""
    if cfg.example != "manifold":
        raise InvalidInputError(f"run_manifold_theorem needs a manifold scenario, got {cfg.example}")
    world = _world_for(cfg)
    grid = cfg.grid

    S_u = sample_unlabeled(world, cfg.m_u, make_rng(cfg.seed, STREAM_UNLABELED))
    result = manifold_property_test(
        grid, S_u, cfg.gamma_len, max_expansions=cfg.max_expansions,
        strict_self_intersection=cfg.strict_self_intersection,
    )
    if not result.passed:
        return not_applicable_report("manifold", cfg.delta, _params(cfg)), TheoremArtifacts(result, S_u=S_u)

    report = manifold_bounds(
        n=cfg.n, s=grid.s, gamma_len=cfg.gamma_len, j=cfg.j, m_u=cfg.m_u, m_l=cfg.m_l,
        delta=cfg.delta, eps_B=cfg.assumptions.eps_B, occupied_counts=occupied_cells(grid, S_u),
        eps_A_hat=result.r_a_hat,
    )
    report = report.model_copy(update={"params": {**report.params, "scenario": _params(cfg)}})

    fm = manifold_feature_map(result)
    X_l, y_l = sample_labeled(world, cfg.m_l, make_rng(cfg.seed, STREAM_LABELED))
    learner = HYPOTHESIS_LEARNERS["one_nn"]
    h = learner(X_l, y_l)
    inner = learner(transform_sample(fm, X_l), y_l)
    return report, TheoremArtifacts(result, fm, h, ComposedHypothesis(fm, inner), S_u, X_l, y_l)


def _condition_risks(cfg: ScenarioConfig, feature_map=None, r: float = 0.0) -> Optional[Dict[str, Optional[float]]]:
    """Oracle condition risks of the scenario's world, or None when its grid does not refine the scenario's."""
    world = _world_for(cfg)
    grid = cfg.grid
    if world.grid.q % grid.q != 0:
        logger.info(f"World grid q={world.grid.q} does not refine q={grid.q}; conditions left unchecked")
        return None
    j = cfg.j if cfg.example == "manifold" else None
    return condition_risks(world, grid, feature_map, j=j, m_pairs=cfg.condition_pairs,
                           rng=make_rng(cfg.seed, STREAM_CONDITIONS), r=r)


def world_conditions(cfg: ScenarioConfig) -> List[ConditionVerdict]:
    """Conditions B and E of the scenario's world against its domain assumptions."""
    risks = _condition_risks(cfg) or {}
    return [
        check_condition("B", "<=", risks.get("R_B_hat"), cfg.assumptions.eps_B, cfg.condition_pairs),
        check_condition("E", ">=", risks.get("R_E_hat"), cfg.assumptions.eps_E, cfg.condition_pairs),
    ]


def run_theorem(cfg: ScenarioConfig, check_conditions: bool = True) -> Tuple[BoundReport, TheoremArtifacts]:
    """Run one scenario and attach the composed bounds with their condition verdicts.

    With ``check_conditions`` the world's oracle estimates R_a, R_B, R_C and
    R_E are compared with the report's epsilons.
    """
    report, artifacts = run_cluster_theorem(cfg) if cfg.example == "cluster" else run_manifold_theorem(cfg)
    risks = None
    if check_conditions and report.applicable:
        risks = _condition_risks(cfg, artifacts.feature_map, r=report.r or 0.0)
    verdict = compose_bounds(report, risks, cfg.condition_pairs)
    if check_conditions and not verdict.upper_holds and report.applicable:
        failed = [v.condition for v in verdict.conditions if v.holds is False]
        logger.warning(f"Conditions {', '.join(failed)} do not hold; the risk cap is not established")
    return report.model_copy(update={"verdict": verdict}), artifacts


# Feature-learner selection

def _identity_bound(entry: RegistryEntry, X: np.ndarray, m_l: int, delta: float) -> float:
    return 1.0


def _entry_grid(entry: RegistryEntry, X: np.ndarray) -> GridSpec:
    try:
        grid = GridSpec(n=int(entry.params.get("n", X.shape[1])), q=int(entry.params["q"]))
    except KeyError:
        raise InvalidInputError(f"registry entry '{entry.name}' needs params.q") from None
    if grid.n != X.shape[1]:
        raise InvalidInputError(f"registry entry '{entry.name}' has n={grid.n}, sample has {X.shape[1]}")
    return grid


def _cluster_bound(entry: RegistryEntry, X: np.ndarray, m_l: int, delta: float) -> float:
    grid = _entry_grid(entry, X)
    result = cluster_property_test(grid, X)
    if not result.passed:
        return math.inf
    alpha, _ = alpha_max(AlphaProblem(k_bins=result.k + 1, delta=delta / 3, m_l=m_l))
    return eps_A_cluster(grid.s, grid.n, X.shape[0], delta) + alpha


def _manifold_bound(entry: RegistryEntry, X: np.ndarray, m_l: int, delta: float) -> float:
    grid = _entry_grid(entry, X)
    try:
        gamma_len = float(entry.params["gamma_len"])
        j = int(entry.params["j"])
    except KeyError as e:
        raise InvalidInputError(f"registry entry '{entry.name}' needs params.{e.args[0]}") from None
    eps_B = float(entry.params.get("eps_B", 0.0))
    result = manifold_property_test(
        grid, X, gamma_len, max_expansions=int(entry.params.get("max_expansions", DEFAULT_MAX_EXPANSIONS)),
    )
    if not result.passed:
        return math.inf
    eps_A = eps_A_manifold(grid.s, grid.n, gamma_len, X.shape[0], delta)
    alpha, _ = alpha_max(AlphaProblem(k_bins=manifold_bins(gamma_len, j, grid.s), delta=delta / 3, m_l=m_l))
    return eps_A + eps_B + alpha


BOUND_EVALUATORS: Dict[str, Callable[[RegistryEntry, np.ndarray, int, float], float]] = {
    "identity": _identity_bound,
    "cluster": _cluster_bound,
    "manifold": _manifold_bound,
}


def evaluate_registry(registry: Sequence[RegistryEntry], sample, h_L: str, m_l: int,
                      delta: float) -> List[Tuple[str, float]]:
    """Upper bound on R(h^Z o f) for every entry that pairs with ``h_L``, in registry order."""
    if not 0 < delta < 1:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")
    matching = [e for e in registry if e.hypothesis_learner == h_L]
    if not matching:
        raise InvalidInputError(f"no registry entry uses hypothesis learner '{h_L}'")
    if not any(e.feature_learner == "identity" for e in matching):
        raise InvalidInputError(f"the registry needs an identity entry for hypothesis learner '{h_L}'")
    X = np.asarray(sample, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidInputError("selection needs a non-empty 2-D sample")

    bounds = []
    for entry in matching:
        if entry.feature_learner != "identity":
            X = as_points(_entry_grid(entry, X), X)
        bound = BOUND_EVALUATORS[entry.feature_learner](entry, X, m_l, delta)
        logger.info(f"Registry entry '{entry.name}': bound {bound:.6g}")
        bounds.append((entry.name, bound))
    return bounds


def lowest_bound(bounds: Sequence[Tuple[str, float]]) -> Tuple[str, float]:
    """Entry with the smallest bound; the first listed wins ties."""
    best_name, best_bound = bounds[0]
    for name, bound in bounds[1:]:
        if bound < best_bound:
            best_name, best_bound = name, bound
    return best_name, best_bound


def select_feature_learner(registry: Sequence[RegistryEntry], sample, h_L: str, m_l: int,
                           delta: float) -> Tuple[str, float]:
    return lowest_bound(evaluate_registry(registry, sample, h_L, m_l, delta))


# Monte Carlo validation

def wilson_interval(k: int, n: int, z: float = 1.96) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion k/n."""
    if n == 0:
        return 0.0, 1.0
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


class RateSummary(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    count: int
    eligible: int
    rate: float
    low: float
    high: float


class ValidationReport(BaseModel):
    """Outcome of repeated seeded theorem runs; rates use only trials whose bound is non-vacuous."""

    model_config = ConfigDict(extra="forbid")

    example: str
    trials: int
    seed: int
    delta: float
    test_pass_count: int
    vacuous_count: int
    upper_bound_eligible: int
    upper_bound_violations: int
    gap_eligible: int
    gap_violations: int
    positive_gap_count: int
    condition_failure_count: int = 0
    world_conditions_hold: bool = True
    conditions: List[ConditionVerdict] = Field(default_factory=list)
    rates: Dict[str, RateSummary]
    records: List[Dict[str, Any]]


def _rate(count: int, eligible: int) -> RateSummary:
    low, high = wilson_interval(count, eligible)
    return RateSummary(count=count, eligible=eligible, rate=count / eligible if eligible else 0.0,
                       low=low, high=high)


def trial_seed(master: int, trial: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(trial,)).generate_state(1)[0])


def _run_trial(payload: Tuple[Dict[str, Any], int]) -> Dict[str, Any]:
    raw, trial = payload
    cfg = ScenarioConfig.model_validate(raw)
    seed = trial_seed(cfg.seed, trial)
    cfg = cfg.model_copy(update={"seed": seed})
    report, artifacts = run_theorem(cfg)

    record: Dict[str, Any] = {
        "trial": trial, "seed": seed, "passed": report.applicable, "vacuous": report.vacuous,
        "eps_max_Z": report.eps_max_Z, "delta_R_lower": report.delta_R_lower,
        "risk_h": None, "risk_h_Z": None, "se_h": None, "se_h_Z": None,
        "upper_conditions_hold": report.verdict.upper_holds, "gap_conditions_hold": report.verdict.gap_holds,
    }
    if not report.applicable:
        return record

    world = _world_for(cfg)
    rng = make_rng(seed, STREAM_TEST)
    record["risk_h_Z"], record["se_h_Z"] = true_risk(world, artifacts.h_Z, cfg.m_test, rng)
    record["risk_h"], record["se_h"] = true_risk(world, artifacts.h, cfg.m_test, rng)
    return record


def _batch_progress(done: int, total: int) -> bool:
    step = max(1, total // 10)
    return done % step == 0 or done == total


def validate(cfg: ScenarioConfig, trials: int, workers: int = 1) -> ValidationReport:
    """Repeat the theorem run over independent seeds and count bound violations.

    A trial's risks are Monte Carlo estimates; an upper-bound violation needs
    the estimate minus 3 standard errors above eps_max_Z, and a gap violation
    needs the empirical gap plus 3 combined standard errors below the bound.
    The world is checked once against the scenario's domain assumptions and
    every passing trial records whether its conditions held.
    """
    if trials < MIN_TRIALS:
        raise InvalidInputError(f"validation needs at least {MIN_TRIALS} trials, got {trials}")
    if workers < 1:
        raise InvalidInputError(f"workers must be positive, got {workers}")

    conditions = world_conditions(cfg)
    world_ok = all(v.holds is not False for v in conditions)
    if not world_ok:
        logger.warning(f"World {cfg.world.kind} breaks its domain assumptions; violations are not counterexamples")

    raw = cfg.model_dump(mode="json")
    payloads = [(raw, t) for t in range(trials)]
    records: List[Dict[str, Any]] = []
    if workers == 1:
        results = map(_run_trial, payloads)
        for record in results:
            records.append(record)
            if _batch_progress(len(records), trials):
                logger.info(f"Validation progress: {len(records)}/{trials} trials")
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            for record in executor.map(_run_trial, payloads):
                records.append(record)
                if _batch_progress(len(records), trials):
                    logger.info(f"Validation progress: {len(records)}/{trials} trials")

    passes = vacuous = upper_eligible = upper_viol = gap_eligible = gap_viol = positive = failures = 0
    for r in records:
        if not r["passed"]:
            continue
        passes += 1
        failures += int(not r["upper_conditions_hold"])
        vacuous += int(r["vacuous"])
        if r["eps_max_Z"] is not None and r["eps_max_Z"] < 1:
            upper_eligible += 1
            if r["risk_h_Z"] - 3 * r["se_h_Z"] > r["eps_max_Z"]:
                upper_viol += 1
        gap = r["risk_h"] - r["risk_h_Z"]
        positive += int(gap > 0)
        if r["delta_R_lower"] is not None and r["delta_R_lower"] > 0:
            gap_eligible += 1
            if gap + 3 * (r["se_h"] + r["se_h_Z"]) < r["delta_R_lower"]:
                gap_viol += 1

    report = ValidationReport(
        example=cfg.example, trials=trials, seed=cfg.seed, delta=cfg.delta,
        test_pass_count=passes, vacuous_count=vacuous,
        upper_bound_eligible=upper_eligible, upper_bound_violations=upper_viol,
        gap_eligible=gap_eligible, gap_violations=gap_viol, positive_gap_count=positive,
        condition_failure_count=failures, world_conditions_hold=world_ok, conditions=conditions,
        rates={
            "test_pass": _rate(passes, trials),
            "upper_bound_violation": _rate(upper_viol, upper_eligible),
            "gap_violation": _rate(gap_viol, gap_eligible),
            "positive_gap": _rate(positive, passes),
        },
        records=records,
    )
    logger.info(
        f"Validation finished: {passes}/{trials} passed, {upper_viol}/{upper_eligible} upper-bound "
        f"and {gap_viol}/{gap_eligible} gap violations"
    )
    return report


# Figure data

def log_axis(points: int = 26, lo: float = 2.0, hi: float = 7.0) -> np.ndarray:
    """Integer sample sizes log-spaced from 10**lo to 10**hi.

    The default uses 26 points rather than 25 so every integer decade,
    10**5 included, lands exactly on the axis (step 0.2 in the exponent).
    Pass ``points=25`` for the coarser grid; decades then fall between points.
    """
    return np.unique(np.rint(10.0 ** np.linspace(lo, hi, points)).astype(np.int64))


def _write_figure(path: Path, header: Dict[str, Any], frame: pd.DataFrame) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        for key, value in header.items():
            f.write(f"# {key}: {value}\n")
        frame.to_csv(f, index=False, float_format="%.12g", lineterminator="\n")
    logger.info(f"Figure data written: {path}")
    return path


def alpha_curve_frame() -> pd.DataFrame:
    rows = []
    for m_l in ALPHA_CURVE_M_L:
        # g returns to zero at the root of k = delta * (1-t)^(-m_l)
        root = 1.0 - (FIGURE_DELTA / ALPHA_CURVE_K) ** (1.0 / m_l)
        t = np.linspace(0.0, 1.25 * root, 201)
        g = alpha_objective(t, ALPHA_CURVE_K, FIGURE_DELTA, m_l)
        rows.append(pd.DataFrame({"m_l": m_l, "t": t, "g": g}))
    return pd.concat(rows, ignore_index=True)


def alpha_surface_frame(m_ls: np.ndarray, ks: Sequence[int] = tuple(range(1, 21))) -> pd.DataFrame:
    rows = []
    for m_l in m_ls:
        for k in ks:
            alpha, t_star = alpha_max(AlphaProblem(k_bins=k, delta=FIGURE_DELTA, m_l=int(m_l)))
            rows.append({"m_l": int(m_l), "k": k, "alpha": alpha, "t_star": t_star})
    return pd.DataFrame(rows)


def manifold_surface_frame(m_us: np.ndarray, m_ls: np.ndarray) -> pd.DataFrame:
    p = MANIFOLD_FIGURE
    bins = manifold_bins(p["gamma_len"], p["j"], p["s"])
    alphas = {int(m_l): alpha_max(AlphaProblem(k_bins=bins, delta=FIGURE_DELTA / 3, m_l=int(m_l)))[0]
              for m_l in m_ls}
    rows = []
    for m_u in m_us:
        eps_A = eps_A_manifold(p["s"], p["n"], p["gamma_len"], int(m_u), FIGURE_DELTA)
        for m_l in m_ls:
            rows.append({"m_u": int(m_u), "m_l": int(m_l),
                         "eps_max_Z": eps_A + p["eps_B"] + alphas[int(m_l)]})
    return pd.DataFrame(rows)


def cluster_gap_surface_frame(m_us: np.ndarray, m_ls: np.ndarray) -> pd.DataFrame:
    p = CLUSTER_FIGURE
    alphas = {int(m_l): alpha_max(AlphaProblem(k_bins=p["k"] + 1, delta=FIGURE_DELTA / 3, m_l=int(m_l)))[0]
              for m_l in m_ls}
    rows = []
    for m_u in m_us:
        eps_A = eps_A_cluster(p["s"], p["n"], int(m_u), FIGURE_DELTA)
        eps_min = eps_min_cluster(p["beta"], p["n"], int(m_u), FIGURE_DELTA)
        for m_l in m_ls:
            eps_max_Z = eps_A + alphas[int(m_l)]
            rows.append({"m_u": int(m_u), "m_l": int(m_l), "eps_max_Z": eps_max_Z,
                         "eps_min": eps_min, "delta_R_lower": eps_min - eps_max_Z})
    return pd.DataFrame(rows)


def emit_figures(which: str, out_dir, points_per_axis: int = 26, min_exponent: float = 2.0,
                 max_exponent: float = 7.0) -> List[Path]:
    """Write one CSV per requested figure (or all four for ``which='all'``) into ``out_dir``."""
    kinds = FIGURE_KINDS if which == "all" else (which,)
    unknown = [k for k in kinds if k not in FIGURE_KINDS]
    if unknown:
        raise InvalidInputError(f"unknown figure '{unknown[0]}' (known: {', '.join(FIGURE_KINDS)}, all)")
    out_dir = Path(out_dir)
    axis = log_axis(points_per_axis, min_exponent, max_exponent)

    written = []
    for kind in kinds:
        if kind == "alpha_curve":
            header = {"figure": kind, "k": ALPHA_CURVE_K, "delta": FIGURE_DELTA}
            frame = alpha_curve_frame()
        elif kind == "alpha_surface":
            header = {"figure": kind, "delta": FIGURE_DELTA}
            frame = alpha_surface_frame(axis)
        elif kind == "manifold_surface":
            header = {"figure": kind, "delta": FIGURE_DELTA, **MANIFOLD_FIGURE}
            frame = manifold_surface_frame(axis, axis)
        else:
            header = {"figure": kind, "delta": FIGURE_DELTA, **CLUSTER_FIGURE}
            frame = cluster_gap_surface_frame(axis, axis)
        written.append(_write_figure(out_dir / f"{kind}.csv", header, frame))
    return written
