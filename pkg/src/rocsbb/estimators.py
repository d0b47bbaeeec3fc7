"""scikit-learn style estimators for three-class ROC surfaces.

All estimators take test outcomes ``X`` (1-D, or one column) and group labels
``y``; ``classes`` gives the expected order of the groups from lowest to
highest outcome. After ``fit`` the gridded surface lives in ``surface_`` and
the VUS estimate in ``vus_``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_grid_params, check_level, check_seed, check_three_groups
from .bootstrap import BbConfig, bb_estimate
from .classical import (
    BandwidthRule,
    bootstrap_vus_ci,
    plug_in_surface,
    vus_estimate,
)
from .core import InvalidArgumentError, RocSurfaceEstimate

__all__ = [
    "BayesianBootstrapROCSurface",
    "EmpiricalROCSurface",
    "KernelROCSurface",
    "NormalROCSurface",
]


class _BaseROCSurface(BaseEstimator):
    def _prepare(self, X, y):
        sample, classes = check_three_groups(X, y, self.classes)
        self.classes_ = classes
        self.n_samples_per_class_ = np.array(sample.sizes)
        self.grid_ = check_grid_params(self.n_grid_points, self.grid_bounds)
        return sample

    @property
    def surface_estimate_(self) -> RocSurfaceEstimate:
        check_is_fitted(self, "surface_")
        return RocSurfaceEstimate(self.grid_, self.surface_, getattr(self, "surface_draws_", None))

    def score(self, X=None, y=None):
        """Fitted VUS. ``X`` and ``y`` are ignored; present for API symmetry."""
        check_is_fitted(self, "vus_")
        return self.vus_


class BayesianBootstrapROCSurface(_BaseROCSurface):
    """Bayesian-bootstrap ROC surface with a VUS credible interval.

    Parameters
    ----------
    n_replicates : int, default=2000
        Number of Bayesian-bootstrap replicates.
    credibility_level : float, default=0.95
    n_grid_points : int, default=50
        Points per axis of the ``(p1, p3)`` grid.
    grid_bounds : tuple of float, default=(0.0001, 0.9999)
    classes : array-like of shape (3,), default=None
        Group labels ordered from lowest to highest expected outcome.
    keep_draws : bool, default=False
        Keep every replicate surface in ``surface_draws_``.
    random_state : int or None, default=0
    n_jobs : int, default=1
        Threads used across replicates; results do not depend on it.

    Attributes
    ----------
    surface_ : ndarray of shape (n_grid_points, n_grid_points)
        Posterior-mean surface, rows indexed by ``p1``.
    vus_ : float
        Posterior-mean VUS.
    vus_interval_ : tuple of float
    vus_draws_ : ndarray of shape (n_replicates,)
    """

    def __init__(
        self,
        n_replicates=2000,
        credibility_level=0.95,
        n_grid_points=50,
        grid_bounds=(0.0001, 0.9999),
        classes=None,
        keep_draws=False,
        random_state=0,
        n_jobs=1,
    ):
        self.n_replicates = n_replicates
        self.credibility_level = credibility_level
        self.n_grid_points = n_grid_points
        self.grid_bounds = grid_bounds
        self.classes = classes
        self.keep_draws = keep_draws
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        sample = self._prepare(X, y)
        config = BbConfig(
            b_replicates=self.n_replicates,
            grid=self.grid_,
            credibility_level=check_level(self.credibility_level, "credibility_level"),
            seed=check_seed(self.random_state),
        )
        surface, posterior = bb_estimate(
            sample, config, threads=self.n_jobs, keep_draws=self.keep_draws
        )
        self.surface_ = surface.values
        if self.keep_draws:
            self.surface_draws_ = surface.draws
        self.vus_ = posterior.mean
        self.vus_interval_ = posterior.interval
        self.vus_draws_ = posterior.draws
        return self


class _FrequentistROCSurface(_BaseROCSurface):
    """Shared fit for plug-in estimators with an optional bootstrap interval."""

    def _estimator_spec(self):
        raise NotImplementedError

    def _fit_frequentist(self, sample):
        spec = self._estimator_spec()
        self.surface_ = plug_in_surface(sample, spec, self.grid_).values
        if self.n_resamples:
            result = bootstrap_vus_ci(
                sample,
                spec,
                resamples=self.n_resamples,
                level=check_level(self.confidence_level, "confidence_level"),
                seed=check_seed(self.random_state),
                threads=self.n_jobs,
            )
            self.vus_ = result.point
            self.vus_interval_ = result.interval
            self.vus_resamples_ = result.draws
        else:
            self.vus_ = vus_estimate(sample, spec)
        return self


class EmpiricalROCSurface(_FrequentistROCSurface):
    """Empirical plug-in surface; closed-form VUS over strictly ordered triples.

    Set ``n_resamples`` to add a percentile bootstrap interval
    (``vus_interval_``).
    """

    def __init__(
        self,
        n_resamples=0,
        confidence_level=0.95,
        n_grid_points=50,
        grid_bounds=(0.0001, 0.9999),
        classes=None,
        random_state=0,
        n_jobs=1,
    ):
        self.n_resamples = n_resamples
        self.confidence_level = confidence_level
        self.n_grid_points = n_grid_points
        self.grid_bounds = grid_bounds
        self.classes = classes
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _estimator_spec(self):
        return "empirical"

    def fit(self, X, y=None):
        return self._fit_frequentist(self._prepare(X, y))


class KernelROCSurface(_FrequentistROCSurface):
    """Surface from Gaussian-kernel CDF estimates of each group.

    Parameters
    ----------
    bandwidth : {"nrd0", "ucv"} or float, default="nrd0"
        Bandwidth rule applied to every group, or one fixed bandwidth.

    Attributes
    ----------
    bandwidths_ : ndarray of shape (3,)
        Bandwidths used on the training data.
    """

    def __init__(
        self,
        bandwidth="nrd0",
        n_resamples=0,
        confidence_level=0.95,
        n_grid_points=50,
        grid_bounds=(0.0001, 0.9999),
        classes=None,
        random_state=0,
        n_jobs=1,
    ):
        self.bandwidth = bandwidth
        self.n_resamples = n_resamples
        self.confidence_level = confidence_level
        self.n_grid_points = n_grid_points
        self.grid_bounds = grid_bounds
        self.classes = classes
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _estimator_spec(self):
        if isinstance(self.bandwidth, str):
            if self.bandwidth not in ("nrd0", "ucv"):
                raise InvalidArgumentError(f"unknown bandwidth rule {self.bandwidth!r}")
            return BandwidthRule(self.bandwidth)
        return BandwidthRule("fixed", float(self.bandwidth))

    def fit(self, X, y=None):
        sample = self._prepare(X, y)
        rule = self._estimator_spec()
        self.bandwidths_ = np.array([rule(g) for g in sample.groups])
        return self._fit_frequentist(sample)


class NormalROCSurface(_BaseROCSurface):
    """Parametric comparator: independent normal fits (MLE) per group."""

    def __init__(self, n_grid_points=50, grid_bounds=(0.0001, 0.9999), classes=None):
        self.n_grid_points = n_grid_points
        self.grid_bounds = grid_bounds
        self.classes = classes

    def fit(self, X, y=None):
        sample = self._prepare(X, y)
        self.means_ = np.array([g.mean() for g in sample.groups])
        self.scales_ = np.array([g.std() for g in sample.groups])
        self.surface_ = plug_in_surface(sample, "normal", self.grid_).values
        self.vus_ = vus_estimate(sample, "normal")
        return self
