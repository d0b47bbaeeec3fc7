import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from rocsbb.classical import (
    BandwidthBoundaryWarning,
    BandwidthRule,
    bandwidth_nrd0,
    bandwidth_ucv,
    bootstrap_vus_ci,
    empirical_cdf,
    empirical_vus,
    kernel_cdf,
    kernel_vus,
    normal_vus,
    nrd0_branch,
    plug_in_surface,
    select_bandwidth_ucv,
    ucv_criterion,
    vus_estimate,
)
from rocsbb.core import DegenerateInputError, InvalidArgumentError, ThreeGroupSample, default_grid
from rocsbb.simulation import scenario, true_surface

from helpers import random_sample

EXAMPLE = ThreeGroupSample([1, 2], [1.5, 3], [2.5, 4])


def brute_force_vus(sample):
    hits = sum(a < b < c for a, b, c in itertools.product(*sample.groups))
    return hits / np.prod(sample.sizes)


class TestCdfs:
    def test_empirical_count(self):
        assert empirical_cdf([1, 2, 3], 2) == pytest.approx(2 / 3)

    def test_empirical_tails(self):
        assert empirical_cdf([1, 2, 3], 0.5) == 0.0
        assert empirical_cdf([1, 2, 3], 3) == 1.0

    def test_empirical_empty(self):
        with pytest.raises(InvalidArgumentError):
            empirical_cdf([], 0.0)

    def test_kernel_symmetry(self):
        assert kernel_cdf([0.0], 1.0, 0.0) == 0.5

    def test_kernel_normal_fact(self):
        assert kernel_cdf([0.0], 1.0, 1.96) == pytest.approx(0.975, abs=1e-4)

    def test_kernel_small_h(self):
        assert kernel_cdf([1, 2, 3], 1e-9, 2.5) == pytest.approx(2 / 3, abs=1e-12)
        assert kernel_cdf([1, 2, 3], 1e-9, 2.0) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("h", [0.0, -1.0])
    def test_kernel_bad_h(self, h):
        with pytest.raises(InvalidArgumentError):
            kernel_cdf([1.0], h, 0.0)


class TestNrd0:
    def test_hand_value(self):
        sd, iqr = math.sqrt(2.5), 2.0 / 1.34
        assert bandwidth_nrd0([1, 2, 3, 4, 5]) == pytest.approx(0.9 * min(sd, iqr) * 5**-0.2)
        assert nrd0_branch([1, 2, 3, 4, 5]) == "iqr"

    def test_homogeneous(self, rng):
        y = rng.normal(size=40)
        assert bandwidth_nrd0(3.7 * y) == pytest.approx(3.7 * bandwidth_nrd0(y))

    def test_rate(self):
        q = norm.ppf((np.arange(1, 801) - 0.5) / 800)
        q2 = norm.ppf((np.arange(1, 25601) - 0.5) / 25600)
        ratio = bandwidth_nrd0(q2) / bandwidth_nrd0(q)
        assert ratio == pytest.approx(32**-0.2, rel=0.01)

    def test_iqr_zero_falls_back_to_sd(self):
        y = [0, 0, 0, 0, 0, 0, 0, 10]
        assert bandwidth_nrd0(y) == pytest.approx(0.9 * np.std(y, ddof=1) * 8**-0.2)
        assert nrd0_branch(y) == "sd"

    @pytest.mark.parametrize("y", [[1.0], [2.0, 2.0, 2.0]])
    def test_degenerate(self, y):
        with pytest.raises(DegenerateInputError):
            bandwidth_nrd0(y)


class TestUcv:
    def test_single_pair_hand_value(self):
        expected = 1 / (4 * math.sqrt(math.pi)) + 0.5 * (norm.pdf(1, scale=math.sqrt(2)) - 2 * norm.pdf(1))
        assert ucv_criterion([0.0, 1.0], 1.0) == pytest.approx(expected, rel=1e-12)

    def test_duplicated_sample_guarded(self, rng):
        y = np.repeat(rng.normal(size=30), 2)
        assert ucv_criterion(y, 1e-6) < ucv_criterion(y, 1e-3) < 0
        r = select_bandwidth_ucv(y)
        assert r.bandwidth >= r.search_interval[0] > 0

    def test_boundary_warning(self, rng):
        y = np.repeat(rng.normal(size=30), 2)
        h0 = bandwidth_nrd0(y)
        with pytest.warns(BandwidthBoundaryWarning):
            h = bandwidth_ucv(y, (1e-6, h0 / 100))
        assert h > 0

    def test_no_warning_interior(self, rng):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            bandwidth_ucv(rng.normal(size=200))

    def test_normal_data_near_nrd0(self):
        rng = np.random.default_rng(7)
        ratios = []
        for _ in range(50):
            y = rng.normal(size=500)
            ratios.append(bandwidth_ucv(y) / bandwidth_nrd0(y))
        assert 0.5 < np.mean(ratios) < 2.0

    def test_degenerate(self):
        with pytest.raises(DegenerateInputError):
            select_bandwidth_ucv([1.0, 1.0, 1.0])

    def test_rule_validation(self):
        with pytest.raises(InvalidArgumentError):
            BandwidthRule("silverman")
        with pytest.raises(InvalidArgumentError):
            BandwidthRule("fixed")
        assert BandwidthRule("fixed", 0.3)([1.0]) == 0.3


class TestPlugInSurface:
    def test_separated(self):
        s = ThreeGroupSample([1, 2, 3], [10, 11, 12], [20, 21])
        assert plug_in_surface(s, "empirical").vus >= 0.99

    def test_normal_exact_parameters(self):
        grid = default_grid(25)
        q = norm.ppf((np.arange(1, 2001) - 0.5) / 2000)
        q = (q - q.mean()) / q.std()  # MLE mean 0, sd 1 exactly, up to rounding
        s = ThreeGroupSample(q, q + 1.5, q + 3.0)
        got = plug_in_surface(s, "normal", grid).values
        ref = true_surface(scenario(1), grid).values
        np.testing.assert_allclose(got, ref, atol=1e-10)

    def test_kernel_monotone(self, rng):
        s = random_sample(rng, 20)
        v = plug_in_surface(s, "kernel-nrd0", default_grid(12)).values
        assert np.all(np.diff(v, axis=0) <= 1e-12) and np.all(np.diff(v, axis=1) <= 1e-12)

    def test_grid_average_near_vus(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            s = ThreeGroupSample(rng.normal(0, 1, 80), rng.normal(1, 1, 80), rng.normal(2, 1, 80))
            assert abs(plug_in_surface(s, "empirical").vus - empirical_vus(s)) < 0.02

    def test_unknown_estimator(self):
        with pytest.raises(InvalidArgumentError):
            plug_in_surface(EXAMPLE, "spline")

    def test_normal_degenerate(self):
        with pytest.raises(DegenerateInputError):
            plug_in_surface(ThreeGroupSample([1, 1], [2, 3], [4, 5]), "normal")


class TestVus:
    def test_enumeration_example(self):
        assert empirical_vus(EXAMPLE) == 0.5

    def test_separated(self):
        assert empirical_vus(ThreeGroupSample([1], [2], [3])) == 1.0

    def test_single_tie(self):
        assert empirical_vus(ThreeGroupSample([4], [4], [4])) == 0.0

    def test_brute_force_with_ties(self, rng):
        for _ in range(50):
            s = random_sample(rng, 8, ties=True)
            assert empirical_vus(s) == brute_force_vus(s)

    def test_kernel_symmetric(self):
        assert kernel_vus(ThreeGroupSample([0], [0], [0]), 0.7, 0.7, 0.7) == pytest.approx(0.25)

    def test_kernel_limit(self):
        assert kernel_vus(EXAMPLE, 1e-8, 1e-8, 1e-8) == pytest.approx(0.5, abs=1e-6)

    def test_kernel_bad_bandwidth(self):
        with pytest.raises(InvalidArgumentError):
            kernel_vus(EXAMPLE, 1.0, 0.0, 1.0)

    def test_normal_vus_scenario1(self):
        q = norm.ppf((np.arange(1, 4001) - 0.5) / 4000)
        q = (q - q.mean()) / q.std()
        s = ThreeGroupSample(q, q + 1.5, q + 3.0)
        from rocsbb.simulation import true_vus_integral

        assert normal_vus(s) == pytest.approx(true_vus_integral(scenario(1)), abs=1e-9)

    def test_estimate_dispatch(self):
        assert vus_estimate(EXAMPLE, "empirical") == 0.5
        h = [bandwidth_nrd0(y) for y in EXAMPLE.groups]
        assert vus_estimate(EXAMPLE, "kernel-nrd0") == kernel_vus(EXAMPLE, *h)


finite = st.floats(-1e3, 1e3, allow_nan=False)
groups = st.lists(finite, min_size=1, max_size=6, unique=True)


# Integer outcomes keep the transform strictly increasing in floating point.
int_groups = st.lists(st.integers(-200, 200), min_size=1, max_size=6)


@settings(max_examples=80, deadline=None)
@given(int_groups, int_groups, int_groups)
def test_vus_invariant_under_increasing_maps(a, b, c):
    s = ThreeGroupSample(a, b, c)
    t = s.map(lambda y: np.exp(y / 64.0) + y**3)
    assert empirical_vus(s) == empirical_vus(t)


@settings(max_examples=80, deadline=None)
@given(st.lists(finite, min_size=3, max_size=15, unique=True), st.data())
def test_six_orderings_sum_to_one(values, data):
    values = np.array(values)
    cut = sorted(data.draw(st.lists(st.integers(1, len(values) - 1), min_size=2, max_size=2, unique=True)))
    g = np.split(values, cut)
    total = sum(empirical_vus(ThreeGroupSample(*(g[k] for k in perm))) for perm in itertools.permutations(range(3)))
    assert total == pytest.approx(1.0, abs=1e-12)


class TestBootstrapCi:
    def test_single_resample(self, rng):
        s = random_sample(rng, 10)
        r = bootstrap_vus_ci(s, "empirical", resamples=1, seed=3)
        assert r.interval[0] == r.interval[1] == r.draws[0]

    def test_separated(self):
        s = ThreeGroupSample([1, 2, 3], [10, 11], [20, 21, 22])
        r = bootstrap_vus_ci(s, "empirical", resamples=50)
        assert r.interval == (1.0, 1.0)

    def test_thread_independent(self, rng):
        s = random_sample(rng, 15)
        a = bootstrap_vus_ci(s, "kernel-nrd0", resamples=60, seed=8)
        b = bootstrap_vus_ci(s, "kernel-nrd0", resamples=60, seed=8, threads=4)
        np.testing.assert_array_equal(a.draws, b.draws)

    def test_redraw_then_fail(self):
        s = ThreeGroupSample([1.0, 1.0, 1.0, 2.0], [3.0, 4.0], [5.0, 6.0])
        r = bootstrap_vus_ci(s, "kernel-ucv", resamples=20, seed=0)
        assert np.all(np.isfinite(r.draws))
        with pytest.raises(DegenerateInputError):
            bootstrap_vus_ci(ThreeGroupSample([1.0, 1.0, 1.0, 2.0], [3.0, 3.0, 3.0, 4.0], [5.0] * 20 + [6.0]),
                             "kernel-ucv", resamples=200, seed=0, max_retries=0)

    def test_tmt_empirical_interval(self, tmt):
        r = bootstrap_vus_ci(tmt, "empirical", resamples=1000, seed=1)
        assert abs(r.interval[0] - 0.66) <= 0.04 and abs(r.interval[1] - 0.83) <= 0.04
