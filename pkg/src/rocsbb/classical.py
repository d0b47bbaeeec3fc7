"""Frequentist competitors: empirical, kernel-smoothed and normal plug-in estimators.

Also hosts the two bandwidth rules for the Gaussian-kernel CDF, the
closed-form empirical and kernel VUS, and a percentile bootstrap for VUS
confidence intervals.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate
from scipy.special import ndtr, ndtri

from ._numeric import bisect_quantile
from .bootstrap import SeedLike, as_seed_sequence
from .core import (
    DegenerateInputError,
    InvalidArgumentError,
    ProbabilityGrid,
    RocSurfaceEstimate,
    ThreeGroupSample,
    default_grid,
    percentile_interval,
)

__all__ = [
    "BandwidthRule",
    "BandwidthBoundaryWarning",
    "UcvResult",
    "FrequentistVusResult",
    "empirical_cdf",
    "kernel_cdf",
    "bandwidth_nrd0",
    "nrd0_branch",
    "ucv_criterion",
    "select_bandwidth_ucv",
    "bandwidth_ucv",
    "plug_in_surface",
    "empirical_vus",
    "kernel_vus",
    "normal_vus",
    "vus_estimate",
    "bootstrap_vus_ci",
]

_SQRT_PI = math.sqrt(math.pi)


class BandwidthBoundaryWarning(UserWarning):
    """The UCV optimum sits on an end of the search interval."""


def _values(values, min_size: int = 1) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidArgumentError("values must be nonempty")
    if arr.size < min_size:
        raise DegenerateInputError(f"need at least {min_size} values, got {arr.size}")
    return arr


def empirical_cdf(values, z):
    """Fraction of ``values`` at or below ``z`` (vectorized over ``z``)."""
    xs = np.sort(_values(values))
    out = np.searchsorted(xs, np.asarray(z, dtype=float), side="right") / xs.size
    return out if np.ndim(out) else float(out)


def kernel_cdf(values, h: float, z):
    """Gaussian-kernel CDF estimate ``mean(Phi((z - y_i) / h))``."""
    xs = _values(values)
    if not h > 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {h!r}")
    z = np.asarray(z, dtype=float)
    out = ndtr((z[..., None] - xs) / h).mean(axis=-1)
    return out if np.ndim(out) else float(out)


def bandwidth_nrd0(values) -> float:
    """Rule-of-thumb bandwidth ``0.9 * min(SD, IQR / 1.34) * n ** -0.2``.

    SD uses divisor ``n - 1``; quartiles interpolate linearly between order
    statistics. When the IQR is zero but the SD is not, the SD is used alone.

    >>> round(bandwidth_nrd0([1, 2, 3, 4, 5]), 4)
    0.9736
    """
    xs = _values(values, min_size=2)
    sd = float(np.std(xs, ddof=1))
    if not sd > 0:
        raise DegenerateInputError("bandwidth undefined for data with zero spread")
    q1, q3 = np.quantile(xs, [0.25, 0.75], method="linear")
    spread = min(sd, (q3 - q1) / 1.34)
    if not spread > 0:
        spread = sd
    return float(0.9 * spread * xs.size ** -0.2)


def nrd0_branch(values) -> str:
    """Which term of the nrd0 minimum is active: ``"sd"`` or ``"iqr"``."""
    xs = _values(values, min_size=2)
    q1, q3 = np.quantile(xs, [0.25, 0.75], method="linear")
    iqr = (q3 - q1) / 1.34
    return "iqr" if 0 < iqr < np.std(xs, ddof=1) else "sd"


def _pair_distances(xs: np.ndarray):
    # Distinct |y_i - y_j| over unordered pairs, with multiplicities.
    i, j = np.triu_indices(xs.size, k=1)
    return np.unique(np.abs(xs[i] - xs[j]), return_counts=True)


def _ucv(h, n, dist, counts):
    d = dist / h
    term = np.exp(-0.25 * d * d) - math.sqrt(8.0) * np.exp(-0.5 * d * d)
    # Cross terms are normalized by n^2 (the common software convention);
    # summing unordered pairs absorbs the 1/(2 sqrt(pi)) density factor.
    return 1.0 / (2.0 * n * h * _SQRT_PI) + float(term @ counts) / (n * n * h * _SQRT_PI)


def ucv_criterion(values, h: float) -> float:
    """Unbiased least-squares cross-validation score of a Gaussian KDE."""
    xs = _values(values, min_size=2)
    if not h > 0:
        raise InvalidArgumentError("bandwidth must be positive")
    dist, counts = _pair_distances(xs)
    return _ucv(h, xs.size, dist, counts)


@dataclass(frozen=True)
class UcvResult:
    bandwidth: float
    criterion: float
    search_interval: tuple[float, float]
    at_boundary: bool


def _golden_section(f, lo, hi, rtol):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rtol * (abs(c) + abs(d)) / 2.0:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = c if fc <= fd else d
    return x, min(fc, fd), (a == lo or b == hi)


def select_bandwidth_ucv(values, search_interval: Optional[tuple[float, float]] = None) -> UcvResult:
    """Minimize the UCV score by golden-section search.

    The default interval ``[h_nrd0 / 20, 5 * h_nrd0]`` keeps the search away
    from ``h -> 0``, where the score of data with ties diverges to ``-inf``.
    """
    xs = _values(values, min_size=2)
    if search_interval is None:
        h0 = bandwidth_nrd0(xs)
        search_interval = (h0 / 20.0, 5.0 * h0)
    elif not np.std(xs) > 0:
        raise DegenerateInputError("bandwidth undefined for data with zero spread")
    lo, hi = (float(v) for v in search_interval)
    if not 0 < lo < hi:
        raise InvalidArgumentError("search interval must satisfy 0 < lower < upper")
    dist, counts = _pair_distances(xs)
    h, crit, edge = _golden_section(lambda h: _ucv(h, xs.size, dist, counts), lo, hi, 1e-4)
    return UcvResult(h, crit, (lo, hi), edge)


def bandwidth_ucv(values, search_interval: Optional[tuple[float, float]] = None) -> float:
    result = select_bandwidth_ucv(values, search_interval)
    if result.at_boundary:
        warnings.warn(
            f"UCV minimum at the end of the search interval {result.search_interval}",
            BandwidthBoundaryWarning,
            stacklevel=2,
        )
    return result.bandwidth


@dataclass(frozen=True)
class BandwidthRule:
    """How each group's kernel bandwidth is chosen: ``nrd0``, ``ucv`` or ``fixed``."""

    kind: str = "nrd0"
    fixed_value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("nrd0", "ucv", "fixed"):
            raise InvalidArgumentError(f"unknown bandwidth rule {self.kind!r}")
        if (self.kind == "fixed") != (self.fixed_value is not None):
            raise InvalidArgumentError("fixed_value is required iff kind == 'fixed'")
        if self.fixed_value is not None and not self.fixed_value > 0:
            raise InvalidArgumentError("fixed_value must be positive")

    def __call__(self, values) -> float:
        if self.kind == "nrd0":
            return bandwidth_nrd0(values)
        if self.kind == "ucv":
            return select_bandwidth_ucv(values).bandwidth
        return float(self.fixed_value)


Estimator = Union[str, BandwidthRule]


def _resolve(estimator: Estimator):
    """Map an estimator spec onto ``("empirical" | "kernel" | "normal", rule)``."""
    if isinstance(estimator, BandwidthRule):
        return "kernel", estimator
    if estimator in ("empirical", "normal"):
        return estimator, None
    if estimator in ("kernel", "kernel-nrd0"):
        return "kernel", BandwidthRule("nrd0")
    if estimator == "kernel-ucv":
        return "kernel", BandwidthRule("ucv")
    raise InvalidArgumentError(f"unknown estimator {estimator!r}")


class _EmpiricalFit:
    def __init__(self, xs):
        self.xs = np.sort(xs)
        uniq, counts = np.unique(self.xs, return_counts=True)
        self._support = uniq
        self._levels = np.cumsum(counts) / xs.size

    def cdf(self, z):
        return np.searchsorted(self.xs, z, side="right") / self.xs.size

    def quantile(self, p):
        # inf{x : F(x) >= p}; -inf when p <= 0.
        p = np.asarray(p, dtype=float)
        k = np.searchsorted(self._levels, p, side="left")
        out = self._support[np.minimum(k, self._support.size - 1)]
        return np.where(p <= 0.0, -np.inf, out)


class _KernelFit:
    def __init__(self, xs, h):
        self.xs, self.h = xs, float(h)

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        return ndtr((z[..., None] - self.xs) / self.h).mean(axis=-1)

    def quantile(self, p):
        pad = 10.0 * self.h
        return bisect_quantile(self.cdf, p, self.xs.min() - pad, self.xs.max() + pad)


class _NormalFit:
    def __init__(self, xs):
        if xs.size < 2:
            raise DegenerateInputError("normal fit needs at least 2 values per group")
        self.mu = float(xs.mean())
        self.sigma = float(xs.std(ddof=0))
        if not self.sigma > 0:
            raise DegenerateInputError("normal fit undefined for zero spread")

    def cdf(self, z):
        return ndtr((np.asarray(z, dtype=float) - self.mu) / self.sigma)

    def quantile(self, p):
        return self.mu + self.sigma * ndtri(np.asarray(p, dtype=float))


def _fit_groups(sample: ThreeGroupSample, estimator: Estimator):
    kind, rule = _resolve(estimator)
    if kind == "empirical":
        return [_EmpiricalFit(y) for y in sample.groups]
    if kind == "normal":
        return [_NormalFit(y) for y in sample.groups]
    return [_KernelFit(y, rule(y)) for y in sample.groups]


def plug_in_surface(
    sample: ThreeGroupSample,
    cdf_estimator: Estimator = "empirical",
    grid: Optional[ProbabilityGrid] = None,
) -> RocSurfaceEstimate:
    """ROC surface with each group CDF replaced by an estimate.

    Entry ``(i, j)`` is ``max(0, F2(F3^-(1 - p3_j)) - F2(F1^-(p1_i)))`` where
    ``F^-`` is the generalized inverse ``inf{x : F(x) >= p}``.

    The empirical variant is evaluated through placement values instead:
    the share of group-2 outcomes whose group-3 survival exceeds ``p3``,
    minus the share whose group-1 CDF (ties counted, ``<=``) is at most
    ``p1``. Both forms agree on tie-free data; with ties across groups the
    placement form keeps the same conventions as the Bayesian bootstrap.

    Parameters
    ----------
    cdf_estimator : {"empirical", "kernel-nrd0", "kernel-ucv", "normal"} or BandwidthRule
    """
    grid = grid or default_grid()
    if _resolve(cdf_estimator)[0] == "empirical":
        return _empirical_placement_surface(sample, grid)
    f1, f2, f3 = _fit_groups(sample, cdf_estimator)
    upper = f2.cdf(f3.quantile(1.0 - grid.p3_points))
    lower = f2.cdf(f1.quantile(grid.p1_points))
    values = np.clip(upper[None, :] - lower[:, None], 0.0, 1.0)
    return RocSurfaceEstimate(grid, values)


def _empirical_placement_surface(sample: ThreeGroupSample, grid: ProbabilityGrid) -> RocSurfaceEstimate:
    n1, n2, n3 = sample.sizes
    y2 = sample.y2
    u1 = np.searchsorted(np.sort(sample.y1), y2, side="right") / n1
    u3 = (n3 - np.searchsorted(np.sort(sample.y3), y2, side="right")) / n3
    upper = 1.0 - (u3[:, None] <= grid.p3_points[None, :]).sum(axis=0) / n2
    lower = (u1[:, None] <= grid.p1_points[None, :]).sum(axis=0) / n2
    values = np.clip(upper[None, :] - lower[:, None], 0.0, 1.0)
    return RocSurfaceEstimate(grid, values)


def empirical_vus(sample: ThreeGroupSample) -> float:
    """Fraction of triples with ``y1 < y2 < y3``, computed exactly."""
    y1, y2, y3 = (np.sort(y) for y in sample.groups)
    n1, n2, n3 = sample.sizes
    below = np.searchsorted(y1, y2, side="left")
    above = n3 - np.searchsorted(y3, y2, side="right")
    hits = sum(int(a) * int(c) for a, c in zip(below, above))
    return hits / (n1 * n2 * n3)


def kernel_vus(sample: ThreeGroupSample, h1: float, h2: float, h3: float) -> float:
    """Closed-form VUS of the Gaussian-kernel CDF estimates."""
    if not (h1 > 0 and h2 > 0 and h3 > 0):
        raise InvalidArgumentError("bandwidths must be positive")
    y1, y2, y3 = sample.groups
    left = ndtr((y2[None, :] - y1[:, None]) / math.hypot(h1, h2)).sum(axis=0)
    right = ndtr((y3[:, None] - y2[None, :]) / math.hypot(h2, h3)).sum(axis=0)
    return float(left @ right) / (y1.size * y2.size * y3.size)


def normal_vus(sample: ThreeGroupSample) -> float:
    """Pr(Y1 < Y2 < Y3) under independent normal fits to each group."""
    f1, f2, f3 = (_NormalFit(y) for y in sample.groups)

    def integrand(z):
        y = f2.mu + f2.sigma * z
        return float(f1.cdf(y) * (1.0 - f3.cdf(y))) * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)

    value, _ = integrate.quad(integrand, -12.0, 12.0, epsabs=1e-12, limit=200)
    return min(max(value, 0.0), 1.0)


def vus_estimate(sample: ThreeGroupSample, estimator: Estimator = "empirical") -> float:
    """Point VUS for a frequentist estimator spec."""
    kind, rule = _resolve(estimator)
    if kind == "empirical":
        return empirical_vus(sample)
    if kind == "normal":
        return normal_vus(sample)
    return kernel_vus(sample, *(rule(y) for y in sample.groups))


@dataclass(frozen=True)
class FrequentistVusResult:
    point: float
    interval: tuple[float, float]
    resamples: int
    draws: Optional[np.ndarray] = None


def _resampled_vus(sample, estimator, seed, max_retries):
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(max_retries + 1):
        boot = ThreeGroupSample(*(rng.choice(y, size=y.size, replace=True) for y in sample.groups))
        try:
            return vus_estimate(boot, estimator)
        except DegenerateInputError:
            continue
    raise DegenerateInputError(f"no usable resample after {max_retries} redraws")


def bootstrap_vus_ci(
    sample: ThreeGroupSample,
    estimator: Estimator = "empirical",
    resamples: int = 1000,
    level: float = 0.95,
    seed: SeedLike = 0,
    *,
    threads: int = 1,
    max_retries: int = 100,
) -> FrequentistVusResult:
    """Percentile bootstrap interval for a frequentist VUS estimator.

    Groups are resampled with replacement within themselves, and kernel
    bandwidths are recomputed for every resample. A resample that leaves a
    group with zero spread is redrawn, up to ``max_retries`` times.
    """
    if int(resamples) != resamples or resamples < 1:
        raise InvalidArgumentError("resamples must be a positive integer")
    point = vus_estimate(sample, estimator)
    seeds = as_seed_sequence(seed).spawn(int(resamples))

    def one(s):
        return _resampled_vus(sample, estimator, s, max_retries)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            draws = np.array(list(pool.map(one, seeds)))
    else:
        draws = np.array([one(s) for s in seeds])
    return FrequentistVusResult(point, percentile_interval(draws, level), int(resamples), draws)
