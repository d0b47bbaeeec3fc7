"""Scenario generators, true-surface oracles and the Monte Carlo study harness."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate, stats

from ._numeric import bisect_quantile
from .bootstrap import BbConfig, SeedLike, as_seed_sequence, bb_estimate
from .classical import nrd0_branch, plug_in_surface, vus_estimate
from .core import (
    InvalidArgumentError,
    ProbabilityGrid,
    RocSurfaceEstimate,
    ThreeGroupSample,
    default_grid,
    emse,
)

__all__ = [
    "Normal",
    "Gamma",
    "StudentT",
    "Beta",
    "ChiSquare",
    "NormalMixture",
    "PointMass",
    "distribution_from_dict",
    "ScenarioSpec",
    "SCENARIOS",
    "scenario",
    "generate_dataset",
    "true_surface",
    "true_vus",
    "true_vus_integral",
    "reference_true_vus",
    "StudyConfig",
    "StudyRecord",
    "StudyResult",
    "run_study",
    "run_emse_study",
    "run_coverage_study",
    "coverage_rate",
    "ESTIMATORS",
]


def _positive(**params):
    for name, value in params.items():
        if not (np.isfinite(value) and value > 0):
            raise InvalidArgumentError(f"{name} must be positive, got {value!r}")


class _ScipyBacked:
    """Distribution descriptor delegating to a frozen ``scipy.stats`` law."""

    family = ""

    def _frozen(self):
        raise NotImplementedError

    def cdf(self, x):
        return self._frozen().cdf(x)

    def ppf(self, p):
        return self._frozen().ppf(p)

    def rvs(self, rng, size):
        return self._frozen().rvs(size=size, random_state=rng)

    def to_dict(self) -> dict:
        return {"family": self.family, **self.__dict__}


@dataclass(frozen=True)
class Normal(_ScipyBacked):
    mean: float = 0.0
    sd: float = 1.0
    family = "normal"

    def __post_init__(self):
        _positive(sd=self.sd)

    def _frozen(self):
        return stats.norm(self.mean, self.sd)


@dataclass(frozen=True)
class Gamma(_ScipyBacked):
    """Gamma law in the shape-rate parameterization (mean ``shape / rate``)."""

    shape: float
    rate: float = 1.0
    family = "gamma"

    def __post_init__(self):
        _positive(shape=self.shape, rate=self.rate)

    def _frozen(self):
        return stats.gamma(self.shape, scale=1.0 / self.rate)


@dataclass(frozen=True)
class StudentT(_ScipyBacked):
    df: float
    family = "student_t"

    def __post_init__(self):
        _positive(df=self.df)

    def _frozen(self):
        return stats.t(self.df)


@dataclass(frozen=True)
class Beta(_ScipyBacked):
    a: float
    b: float
    family = "beta"

    def __post_init__(self):
        _positive(a=self.a, b=self.b)

    def _frozen(self):
        return stats.beta(self.a, self.b)


@dataclass(frozen=True)
class ChiSquare(_ScipyBacked):
    df: float
    family = "chi_square"

    def __post_init__(self):
        _positive(df=self.df)

    def _frozen(self):
        return stats.chi2(self.df)


@dataclass(frozen=True)
class NormalMixture:
    """``weight * N(mean1, sd1^2) + (1 - weight) * N(mean2, sd2^2)``."""

    weight: float
    mean1: float
    sd1: float
    mean2: float
    sd2: float
    family = "normal_mixture"

    def __post_init__(self):
        _positive(sd1=self.sd1, sd2=self.sd2)
        if not 0.0 <= self.weight <= 1.0:
            raise InvalidArgumentError("mixture weight must be in [0, 1]")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.weight * stats.norm.cdf(x, self.mean1, self.sd1) + (
            1.0 - self.weight
        ) * stats.norm.cdf(x, self.mean2, self.sd2)

    def ppf(self, p):
        # No closed form; bisection on the mixture CDF.
        lo = min(self.mean1 - 40 * self.sd1, self.mean2 - 40 * self.sd2)
        hi = max(self.mean1 + 40 * self.sd1, self.mean2 + 40 * self.sd2)
        p = np.asarray(p, dtype=float)
        out = bisect_quantile(self.cdf, p, lo, hi, tol=1e-10)
        return np.where(p <= 0, -np.inf, np.where(p >= 1, np.inf, out))

    def rvs(self, rng, size):
        first = rng.random(size) < self.weight
        a = rng.normal(self.mean1, self.sd1, size)
        b = rng.normal(self.mean2, self.sd2, size)
        return np.where(first, a, b)

    def to_dict(self) -> dict:
        return {"family": self.family, **self.__dict__}


@dataclass(frozen=True)
class PointMass:
    """Degenerate law at ``value``; useful for oracle checks only."""

    value: float
    family = "point_mass"

    def cdf(self, x):
        return (np.asarray(x, dtype=float) >= self.value).astype(float)

    def ppf(self, p):
        return np.full(np.shape(p), float(self.value))

    def rvs(self, rng, size):
        return np.full(size, float(self.value))

    def to_dict(self) -> dict:
        return {"family": self.family, "value": self.value}


_FAMILIES = {
    cls.family: cls for cls in (Normal, Gamma, StudentT, Beta, ChiSquare, NormalMixture, PointMass)
}

Distribution = Union[Normal, Gamma, StudentT, Beta, ChiSquare, NormalMixture, PointMass]


def distribution_from_dict(spec: dict) -> Distribution:
    """Build a descriptor from ``{"family": ..., **params}``."""
    spec = dict(spec)
    family = spec.pop("family", None)
    if family not in _FAMILIES:
        raise InvalidArgumentError(f"unknown distribution family {family!r}")
    try:
        return _FAMILIES[family](**spec)
    except TypeError as exc:
        raise InvalidArgumentError(f"bad parameters for {family}: {exc}") from None


@dataclass(frozen=True)
class ScenarioSpec:
    id: Union[int, str]
    dist1: Distribution
    dist2: Distribution
    dist3: Distribution

    @property
    def dists(self):
        return (self.dist1, self.dist2, self.dist3)

    def to_dict(self) -> dict:
        return {"id": self.id, "groups": [d.to_dict() for d in self.dists]}

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        groups = data.get("groups")
        if not isinstance(groups, list) or len(groups) != 3:
            raise InvalidArgumentError("scenario needs a 'groups' list of three distributions")
        return cls(data.get("id", "custom"), *(distribution_from_dict(g) for g in groups))


SCENARIOS = {
    1: ScenarioSpec(1, Normal(0, 1), Normal(1.5, 1), Normal(3, 1)),
    2: ScenarioSpec(2, Gamma(2, 1), Gamma(3, 1), Gamma(5, 2)),
    3: ScenarioSpec(3, StudentT(2), Beta(2, 2), ChiSquare(2)),
    4: ScenarioSpec(
        4,
        NormalMixture(0.5, 0, 1, 3, 1),
        NormalMixture(0.5, 1, 1, 4, 1.5),
        NormalMixture(0.5, 2, 1, 5, 2),
    ),
}


def scenario(scenario_id: int) -> ScenarioSpec:
    try:
        return SCENARIOS[int(scenario_id)]
    except (KeyError, ValueError):
        raise InvalidArgumentError(f"unknown scenario {scenario_id!r}; choose from 1-4") from None


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(as_seed_sequence(0 if rng is None else rng))


def generate_dataset(spec: ScenarioSpec, sizes: Sequence[int], rng=None) -> ThreeGroupSample:
    """Independent draws of sizes ``(n1, n2, n3)`` from the scenario's groups."""
    if len(sizes) != 3 or any(int(n) != n or n < 1 for n in sizes):
        raise InvalidArgumentError(f"sizes must be three positive integers, got {sizes!r}")
    gen = _generator(rng)
    return ThreeGroupSample(*(d.rvs(gen, int(n)) for d, n in zip(spec.dists, sizes)))


def true_surface(spec: ScenarioSpec, grid: Optional[ProbabilityGrid] = None) -> RocSurfaceEstimate:
    """Exact ROC surface of the scenario on ``grid``."""
    grid = grid or default_grid()
    d1, d2, d3 = spec.dists
    upper = np.asarray(d2.cdf(d3.ppf(1.0 - grid.p3_points)), dtype=float)
    lower = np.asarray(d2.cdf(d1.ppf(grid.p1_points)), dtype=float)
    values = np.clip(upper[None, :] - lower[:, None], 0.0, 1.0)
    return RocSurfaceEstimate(grid, values)


def true_vus(spec: ScenarioSpec, mc_draws: int = 10**6, rng=None, *, chunk: int = 10**6) -> float:
    """Monte Carlo estimate of Pr(Y1 < Y2 < Y3); standard error <= 0.5 / sqrt(mc_draws)."""
    if int(mc_draws) != mc_draws or mc_draws < 1:
        raise InvalidArgumentError("mc_draws must be a positive integer")
    gen = _generator(rng)
    hits, remaining = 0, int(mc_draws)
    while remaining:
        m = min(chunk, remaining)
        y1, y2, y3 = (d.rvs(gen, m) for d in spec.dists)
        hits += int(np.count_nonzero((y1 < y2) & (y2 < y3)))
        remaining -= m
    return hits / int(mc_draws)


def true_vus_integral(spec: ScenarioSpec) -> float:
    """Pr(Y1 < Y2 < Y3) by quadrature over the group-2 quantile scale.

    Valid for continuous group laws: ``integral_0^1 F1(Q2(u)) (1 - F3(Q2(u))) du``.
    """
    d1, d2, d3 = spec.dists

    def integrand(u):
        y = d2.ppf(u)
        return float(d1.cdf(y) * (1.0 - d3.cdf(y)))

    value, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-10, limit=500)
    return value


@lru_cache(maxsize=None)
def _truth_table() -> dict:
    with resources.files("rocsbb.data").joinpath("scenario_truth.json").open() as fh:
        return json.load(fh)


def reference_true_vus(scenario_id: int) -> float:
    """Checked-in Monte Carlo true VUS of a built-in scenario."""
    entry = _truth_table()["scenarios"].get(str(int(scenario_id)))
    if entry is None:
        raise InvalidArgumentError(f"no reference constant for scenario {scenario_id!r}")
    return float(entry["vus_mc"])


def _truth_for(spec: ScenarioSpec) -> float:
    if spec.id in SCENARIOS and SCENARIOS[spec.id] == spec:
        return reference_true_vus(spec.id)
    return true_vus_integral(spec)


ESTIMATORS = ("bb", "empirical", "kernel-nrd0", "kernel-ucv", "normal", "oracle")


@dataclass(frozen=True)
class StudyConfig:
    scenario: ScenarioSpec
    sample_sizes: tuple[int, int, int] = (50, 50, 50)
    n_datasets: int = 300
    estimators: tuple[str, ...] = ("bb", "empirical", "kernel-nrd0", "kernel-ucv")
    bb_config: BbConfig = field(default_factory=BbConfig)
    seed: SeedLike = 0
    threads: int = 1
    true_vus: Optional[float] = None

    def __post_init__(self):
        if len(self.sample_sizes) != 3 or any(n < 1 for n in self.sample_sizes):
            raise InvalidArgumentError("sample_sizes must be three positive integers")
        if int(self.n_datasets) != self.n_datasets or self.n_datasets < 1:
            raise InvalidArgumentError("n_datasets must be a positive integer")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown or not self.estimators:
            raise InvalidArgumentError(f"unknown estimators {sorted(unknown)}")
        as_seed_sequence(self.seed)


@dataclass(frozen=True)
class StudyRecord:
    dataset: int
    estimator: str
    emse: float
    vus: float
    ci_lower: float = math.nan
    ci_upper: float = math.nan
    covered: Optional[bool] = None
    bandwidth_branch: str = ""
    error: str = ""


@dataclass
class StudyResult:
    scenario_id: Union[int, str]
    sample_sizes: tuple[int, int, int]
    true_vus: float
    records: list[StudyRecord]

    def _values(self, estimator, attr):
        return np.array(
            [getattr(r, attr) for r in self.records if r.estimator == estimator and not r.error]
        )

    def emse(self, estimator: str) -> np.ndarray:
        return self._values(estimator, "emse")

    def vus(self, estimator: str) -> np.ndarray:
        return self._values(estimator, "vus")

    @property
    def estimators(self) -> list[str]:
        return list(dict.fromkeys(r.estimator for r in self.records))

    def coverage(self, estimator: str = "bb") -> float:
        flags = [r.covered for r in self.records if r.estimator == estimator and r.covered is not None]
        return float(np.mean(flags)) if flags else math.nan

    def summary(self) -> dict:
        out = {
            "scenario": self.scenario_id,
            "sizes": list(self.sample_sizes),
            "true_vus": self.true_vus,
            "estimators": {},
        }
        for est in self.estimators:
            e, v = self.emse(est), self.vus(est)
            n_fail = sum(1 for r in self.records if r.estimator == est and r.error)
            row = {"n_ok": int(e.size), "n_failed": n_fail}
            if e.size:
                q1, med, q3 = np.quantile(e, [0.25, 0.5, 0.75])
                row.update(
                    emse_median=float(med),
                    emse_iqr=float(q3 - q1),
                    vus_mean=float(v.mean()),
                    vus_bias=float(v.mean() - self.true_vus),
                )
            cov = self.coverage(est)
            if not math.isnan(cov):
                row["coverage"] = cov
            out["estimators"][est] = row
        return out


def coverage_rate(intervals, truth: float) -> float:
    """Fraction of closed intervals ``(lo, hi)`` containing ``truth``."""
    intervals = np.asarray(intervals, dtype=float).reshape(-1, 2)
    return float(np.mean((intervals[:, 0] <= truth) & (truth <= intervals[:, 1])))


def _one_dataset(config, index, seed, truth_surface, truth_vus, with_coverage):
    data_seed, bb_seed = seed.spawn(2)
    sample = generate_dataset(config.scenario, config.sample_sizes, np.random.default_rng(data_seed))
    grid = config.bb_config.grid
    records = []
    for est in config.estimators:
        try:
            lo = hi = math.nan
            covered = None
            branch = ""
            if est == "bb":
                surf, post = bb_estimate(sample, replace(config.bb_config, seed=bb_seed))
                values, vus = surf.values, post.mean
                lo, hi = post.interval
                if with_coverage:
                    covered = bool(lo <= truth_vus <= hi)
            elif est == "oracle":
                values, vus = truth_surface.values, truth_vus
            else:
                values = plug_in_surface(sample, est, grid).values
                vus = vus_estimate(sample, est)
                if est == "kernel-nrd0":
                    branch = ",".join(nrd0_branch(y) for y in sample.groups)
            records.append(
                StudyRecord(index, est, emse(values, truth_surface.values), float(vus), lo, hi, covered, branch)
            )
        except (ValueError, ArithmeticError) as exc:
            records.append(StudyRecord(index, est, math.nan, math.nan, error=f"{type(exc).__name__}: {exc}"))
    return records


def run_study(config: StudyConfig, *, coverage: bool = True) -> StudyResult:
    """Simulate ``config.n_datasets`` datasets and score every estimator.

    Dataset ``k`` draws from its own substream of ``config.seed``; results do
    not depend on ``config.threads``. Estimator failures are recorded in the
    ``error`` column instead of aborting the study.
    """
    truth_surface = true_surface(config.scenario, config.bb_config.grid)
    truth_vus = config.true_vus if config.true_vus is not None else _truth_for(config.scenario)
    seeds = as_seed_sequence(config.seed).spawn(int(config.n_datasets))

    def work(k):
        return _one_dataset(config, k, seeds[k], truth_surface, truth_vus, coverage)

    indices = range(int(config.n_datasets))
    if config.threads and config.threads > 1:
        with ThreadPoolExecutor(max_workers=int(config.threads)) as pool:
            chunks = list(pool.map(work, indices))
    else:
        chunks = [work(k) for k in indices]
    records = [r for chunk in chunks for r in chunk]
    return StudyResult(config.scenario.id, tuple(config.sample_sizes), truth_vus, records)


def run_emse_study(config: StudyConfig) -> StudyResult:
    return run_study(config, coverage=False)


def run_coverage_study(config: StudyConfig) -> float:
    """Fraction of datasets whose BB credible interval covers the true VUS."""
    if "bb" not in config.estimators:
        raise InvalidArgumentError("coverage study requires the 'bb' estimator")
    result = run_study(replace(config, estimators=("bb",)), coverage=True)
    return result.coverage("bb")
