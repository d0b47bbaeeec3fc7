import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rocsbb.core import (
    InvalidArgumentError,
    ProbabilityGrid,
    RocSurfaceEstimate,
    ThreeGroupSample,
    VusPosterior,
    default_grid,
    emse,
    percentile_interval,
    vus_from_surface,
)


class TestVusFromSurface:
    def test_constant(self):
        assert vus_from_surface(np.full((7, 4), 0.3)) == pytest.approx(0.3)

    def test_zero(self):
        assert vus_from_surface(np.zeros((5, 5))) == 0.0

    def test_two_by_two(self):
        assert vus_from_surface([[1, 0], [1, 0]]) == 0.5

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            vus_from_surface(np.zeros((3, 3)), default_grid(4))


class TestEmse:
    def test_identity(self):
        a = np.random.default_rng(0).random((4, 4))
        assert emse(a, a) == 0.0

    def test_scalar(self):
        assert emse([[0.5]], [[0.0]]) == 0.25

    def test_column(self):
        assert emse([[1], [0]], [[0], [0]]) == 0.5

    def test_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            emse(np.zeros((2, 2)), np.zeros((2, 3)))


class TestDefaultGrid:
    def test_two(self):
        g = default_grid(2)
        np.testing.assert_array_equal(g.p1_points, [0.0001, 0.9999])

    def test_three(self):
        np.testing.assert_allclose(default_grid(3).p3_points, [0.0001, 0.5, 0.9999])

    def test_fifty(self):
        p = default_grid(50).p1_points
        assert p[0] == 0.0001 and p[-1] == 0.9999
        np.testing.assert_allclose(np.diff(p), (0.9999 - 0.0001) / 49)

    @pytest.mark.parametrize("n", [0, 1, -3])
    def test_too_small(self, n):
        with pytest.raises(InvalidArgumentError):
            default_grid(n)


class TestTypes:
    def test_sample_rejects_nonfinite(self):
        with pytest.raises(InvalidArgumentError):
            ThreeGroupSample([1.0, np.nan], [2.0], [3.0])

    def test_sample_rejects_empty(self):
        with pytest.raises(InvalidArgumentError):
            ThreeGroupSample([], [2.0], [3.0])

    def test_sample_is_read_only(self):
        s = ThreeGroupSample([1.0], [2.0], [3.0])
        with pytest.raises(ValueError):
            s.y1[0] = 5.0
        assert s.sizes == (1, 1, 1)

    def test_grid_must_increase(self):
        with pytest.raises(InvalidArgumentError):
            ProbabilityGrid([0.2, 0.1], [0.5])
        with pytest.raises(InvalidArgumentError):
            ProbabilityGrid([0.2, 1.5], [0.5])

    def test_grid_equality(self):
        assert default_grid(5) == default_grid(5)
        assert hash(default_grid(5)) == hash(default_grid(5))
        assert default_grid(5) != default_grid(6)

    def test_surface_rejects_out_of_range(self):
        g = default_grid(2)
        with pytest.raises(InvalidArgumentError):
            RocSurfaceEstimate(g, np.full((2, 2), 1.5))

    def test_posterior_interval_contains_mean(self):
        draws = np.random.default_rng(3).beta(5, 2, size=500)
        post = VusPosterior.from_draws(draws, 0.95)
        assert post.interval[0] <= post.mean <= post.interval[1]

    def test_percentile_interval_linear(self):
        assert percentile_interval(np.arange(11.0), 0.8) == pytest.approx((1.0, 9.0))


matrices = arrays(np.float64, (6, 5), elements=st.floats(0, 1))


@settings(max_examples=60, deadline=None)
@given(matrices, matrices, st.floats(0, 1))
def test_vus_linear(a, b, alpha):
    lhs = vus_from_surface(alpha * a + (1 - alpha) * b)
    rhs = alpha * vus_from_surface(a) + (1 - alpha) * vus_from_surface(b)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(matrices, matrices)
def test_emse_symmetric(a, b):
    assert emse(a, b) == emse(b, a) >= 0
    assert (emse(a, b) == 0) == np.array_equal(a, b)
