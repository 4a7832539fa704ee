import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import tailtest as tt

# frozen with mpmath (dps=60): regularized upper incomplete gamma Q(k, x)
ERLANG_UPPER_5_5 = 0.44049328506521241144
ERLANG_UPPER_20_25 = 0.13357483408565040568


def erlang_upper(k: int, x: float) -> float:
    """Independent oracle: P(Gamma(k,1) >= x) = e^-x sum_{i<k} x^i/i! for integer k."""
    term = math.exp(-x)
    total = term
    for i in range(1, k):
        term *= x / i
        total += term
    return total


def sort_reference(sample, k):
    s = np.sort(np.asarray(sample, dtype=float))
    return s[len(s) - k - 1], s[len(s) - k:]


class TestSelectTopK:
    def test_enumerated_example(self):
        tail = tt.select_top_k([5, 1, 3, 2, 4], 2)
        assert tail.threshold == 3.0
        assert np.array_equal(tail.exceedances, [4.0, 5.0])
        assert tail.n == 5 and tail.k == 2

    def test_k_equals_n_minus_1(self):
        sample = [9.0, -2.0, 4.4, 0.0]
        tail = tt.select_top_k(sample, 3)
        assert tail.threshold == min(sample)

    @pytest.mark.parametrize("k", [0, 5, 6, -1])
    def test_k_out_of_range(self, k):
        with pytest.raises(tt.UsageError):
            tt.select_top_k([1.0, 2.0, 3.0, 4.0, 5.0], k)

    def test_non_finite_reported_with_index(self):
        with pytest.raises(tt.DataError, match="index 2"):
            tt.select_top_k([1.0, 2.0, math.nan, 4.0], 2)
        with pytest.raises(tt.DataError, match="index 0"):
            tt.select_top_k([math.inf, 2.0, 3.0], 1)

    def test_matches_full_sort_on_1000_random_instances(self):
        # sizes 10..1e5 log-uniform, k uniform over the valid range
        rng = np.random.default_rng(314159)
        for _ in range(1000):
            n = int(round(10 ** rng.uniform(1.0, 5.0)))
            k = int(rng.integers(1, n))
            x = rng.standard_normal(n)
            tail = tt.select_top_k(x, k)
            thr_ref, exc_ref = sort_reference(x, k)
            assert tail.threshold == thr_ref
            assert np.array_equal(tail.exceedances, exc_ref)

    @given(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
            min_size=2,
            max_size=40,
        ),
        st.data(),
    )
    def test_matches_full_sort_property(self, sample, data):
        k = data.draw(st.integers(min_value=1, max_value=len(sample) - 1))
        tail = tt.select_top_k(sample, k)
        thr_ref, exc_ref = sort_reference(sample, k)
        assert tail.threshold == thr_ref
        assert np.array_equal(tail.exceedances, exc_ref)

    def test_tie_counting(self):
        assert tt.select_top_k([1.0, 2.0, 2.0, 2.0, 3.0], 2).ties == 1
        assert tt.select_top_k([1.0, 2.0, 2.0, 2.0], 2).ties == 2
        assert tt.select_top_k([1.0, 2.0, 3.0, 4.0], 2).ties == 0


class TestRStatistic:
    def test_exponential_example(self):
        tail = tt.select_top_k([0.5, 1.0, 2.0, 4.0], 2)
        assert tail.threshold == 1.0
        assert tt.r_statistic(tail, tt.Exponential(1.0)) == 2.0

    def test_pareto_example(self):
        tail = tt.select_top_k([1.0, 2.0, 4.0, 8.0], 2)
        r = tt.r_statistic(tail, tt.Pareto(1.0))
        assert_allclose(r, 1.5 * math.log(2.0), rtol=1e-14)

    def test_degenerate_equal_values(self):
        tail = tt.TailSlice(n=4, k=2, threshold=3.0, exceedances=np.array([3.0, 3.0]), ties=2)
        assert tt.r_statistic(tail, tt.Exponential(1.0)) == 0.0

    def test_support_violation_counts_offenders(self):
        tail = tt.select_top_k([0.1, 0.2, 1.5, 2.5], 2)
        with pytest.raises(tt.DataError, match="2 exceedance"):
            tt.r_statistic(tail, tt.Uniform(0.0, 1.0))

    def test_threshold_beyond_support(self):
        tail = tt.TailSlice(n=4, k=1, threshold=2.0, exceedances=np.array([3.0]))
        with pytest.raises(tt.DataError, match="threshold"):
            tt.r_statistic(tail, tt.Uniform(0.0, 1.0))

    @given(
        st.lists(
            st.floats(min_value=0.01, max_value=50.0), min_size=3, max_size=50
        ),
        st.data(),
    )
    def test_nonnegative(self, sample, data):
        k = data.draw(st.integers(min_value=1, max_value=len(sample) - 1))
        tail = tt.select_top_k(sample, k)
        assert tt.r_statistic(tail, tt.Exponential(1.0)) >= 0.0

    def test_probability_integral_invariance(self):
        # testing exp:1 data against exp:1 equals testing the exponentiated
        # data against pareto:1, by invariance under increasing maps
        x = tt.Exponential(1.0).sample(424242, 600)
        for k in (10, 120, 599):
            r_exp = tt.r_statistic(tt.select_top_k(x, k), tt.Exponential(1.0))
            r_par = tt.r_statistic(tt.select_top_k(np.exp(x), k), tt.Pareto(1.0))
            assert abs(r_exp - r_par) <= 1e-10


class TestZAndPValues:
    @pytest.mark.parametrize("r,k,expected", [(1.0, 400, 0.0), (1.1, 400, 2.0), (0.8, 100, -2.0)])
    def test_z_examples(self, r, k, expected):
        assert_allclose(tt.z_statistic(r, k), expected, atol=1e-12)

    def test_exact_upper_closed_forms(self):
        assert_allclose(tt.p_values(1.0, 1, "upper")[0], math.exp(-1.0), rtol=1e-12)
        assert_allclose(tt.p_values(1.0, 2, "upper")[0], 3.0 * math.exp(-2.0), rtol=1e-12)

    def test_exact_tail_matches_erlang_sum_oracle(self):
        for k, r in [(1, 0.4), (2, 1.7), (5, 1.0), (20, 1.25), (40, 0.9)]:
            p_upper, _ = tt.p_values(r, k, "upper")
            assert_allclose(p_upper, erlang_upper(k, k * r), rtol=1e-11)

    def test_frozen_arbitrary_precision_values(self):
        assert_allclose(tt.p_values(1.0, 5, "upper")[0], ERLANG_UPPER_5_5, rtol=1e-12)
        assert_allclose(tt.p_values(1.25, 20, "upper")[0], ERLANG_UPPER_20_25, rtol=1e-12)

    def test_two_sided_center(self):
        p_exact, p_normal = tt.p_values(1.0, 400, "two")
        assert p_normal == 1.0
        assert 0.9 < p_exact <= 1.0

    def test_sided_semantics(self):
        k, r = 30, 1.3
        up_e, up_n = tt.p_values(r, k, "upper")
        lo_e, lo_n = tt.p_values(r, k, "lower")
        two_e, two_n = tt.p_values(r, k, "two")
        assert_allclose(up_e + lo_e, 1.0, rtol=1e-12)
        assert two_e == min(1.0, 2.0 * min(up_e, lo_e))
        assert two_n == min(1.0, 2.0 * min(up_n, lo_n))

    def test_validation(self):
        with pytest.raises(tt.UsageError):
            tt.p_values(-0.5, 10, "two")
        with pytest.raises(tt.UsageError):
            tt.p_values(1.0, 10, "both")


class TestHillEstimator:
    def test_example(self):
        tail = tt.TailSlice(n=3, k=2, threshold=2.0, exceedances=np.array([4.0, 8.0]))
        assert_allclose(tt.hill_estimator(tail), 1.5 * math.log(2.0), rtol=1e-14)

    def test_degenerate(self):
        tail = tt.TailSlice(n=3, k=2, threshold=2.0, exceedances=np.array([2.0, 2.0]), ties=2)
        assert tt.hill_estimator(tail) == 0.0

    def test_nonpositive_rejected(self):
        tail = tt.TailSlice(n=3, k=1, threshold=-1.0, exceedances=np.array([2.0]))
        with pytest.raises(tt.DataError):
            tt.hill_estimator(tail)

    def test_pareto_identity_sample_by_sample(self):
        gamma = 2.0
        f0 = tt.Pareto(gamma)
        for seed in range(10):
            x = f0.sample(seed, 5000)
            tail = tt.select_top_k(x, 250)
            r = tt.r_statistic(tail, f0)
            assert abs(r - tt.hill_estimator(tail) / gamma) <= 1e-12


class TestRunTest:
    def test_documented_composition(self):
        report = tt.run_test([0.5, 1.0, 2.0, 4.0], tt.Exponential(1.0), k=2)
        assert report.r == 2.0
        assert_allclose(report.z, math.sqrt(2.0), rtol=1e-12)
        assert report.threshold == 1.0
        # exact two-sided: k r = 4, upper = 5 e^-4
        assert_allclose(report.p_exact, 2.0 * 5.0 * math.exp(-4.0), rtol=1e-12)
        assert not report.reject
        assert report.ties == 0

    def test_rejects_far_shifted_tail(self):
        rng = np.random.default_rng(5)
        x = np.concatenate([rng.exponential(size=400), 40.0 + rng.exponential(size=100)])
        report = tt.run_test(x, tt.Exponential(1.0), k=100)
        assert report.reject and report.z > 0.0

    def test_k_out_of_range(self):
        with pytest.raises(tt.UsageError):
            tt.run_test([1.0, 2.0, 3.0], tt.Exponential(1.0), k=5)

    def test_level_validated(self):
        with pytest.raises(tt.UsageError):
            tt.run_test([1.0, 2.0, 3.0], tt.Exponential(1.0), k=1, level=1.5)

    def test_report_dict_keys(self):
        report = tt.run_test([0.5, 1.0, 2.0, 4.0], tt.Exponential(1.0), k=2)
        assert list(report.to_dict()) == [
            "n", "k", "threshold", "r", "z", "p_exact", "p_normal",
            "sided", "level", "reject", "ties",
        ]
