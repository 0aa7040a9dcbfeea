import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from kendep.errors import DomainError, ShapeError, UndefinedStatisticError
from kendep.kendall_core import (
    ProductKendallLaw,
    Sample,
    auk_estimate,
    auk_from_counts,
    descending_factorial_integral,
    empirical_kendall_cdf,
    kendall_tau_pairwise,
    multivariate_ecdf_at_points,
    product_kendall_cdf,
    product_kendall_pdf,
    pseudo_obs_excluding_self,
)
from kendep.dataio import load_biomarkers

LN2 = math.log(2.0)


class TestSample:
    def test_defaults_and_read_only(self):
        s = Sample([[1, 2], [3, 4], [5, 6]])
        assert (s.n, s.d) == (3, 2)
        assert s.columns == ("X1", "X2")
        with pytest.raises(ValueError):
            s.values[0, 0] = 7.0

    @pytest.mark.parametrize("bad", [[[1, 2]], [[1], [2]], [1, 2, 3]])
    def test_shape_errors(self, bad):
        with pytest.raises(ShapeError):
            Sample(bad)

    def test_non_finite_rejected_with_location(self):
        with pytest.raises(DomainError, match="row 2, column 1"):
            Sample([[0, 0], [np.nan, 1]])

    def test_select_by_label_and_index(self):
        s = Sample(np.arange(12.0).reshape(4, 3), ("a", "b", "c"))
        assert s.select(["c", "a"]).columns == ("c", "a")
        np.testing.assert_array_equal(s.select([1, 2]).values, s.values[:, 1:])
        with pytest.raises(ShapeError):
            s.select(["z", "a"])


class TestProductKendallLaw:
    def test_endpoints(self):
        for d in range(2, 11):
            law = ProductKendallLaw(d)
            assert law.cdf(1.0) == pytest.approx(1.0, abs=1e-15)
            assert law.cdf(0.0) == 0.0

    def test_closed_form_values(self):
        # Direct evaluation of t * sum_k (-ln t)^k / k!.
        assert product_kendall_cdf(2, 0.5) == pytest.approx(0.5 + 0.5 * LN2, rel=1e-14)
        assert product_kendall_cdf(3, 0.5) == pytest.approx(0.5 * (1 + LN2 + LN2 ** 2 / 2), rel=1e-14)
        assert product_kendall_cdf(2, 0.5) == pytest.approx(0.8465736, abs=1e-7)
        assert product_kendall_cdf(3, 0.5) == pytest.approx(0.9666869, abs=1e-7)

    def test_cdf_against_monte_carlo_product(self):
        rng = np.random.default_rng(11)
        prod = rng.random((200_000, 2)).prod(axis=1)
        assert np.mean(prod <= 0.5) == pytest.approx(product_kendall_cdf(2, 0.5), abs=0.005)

    def test_pdf_values(self):
        assert product_kendall_pdf(2, 0.5) == pytest.approx(LN2, rel=1e-14)
        assert product_kendall_pdf(3, math.exp(-1.0)) == pytest.approx(0.5, rel=1e-14)
        assert product_kendall_pdf(2, 1.0 - 1e-12) == pytest.approx(0.0, abs=1e-11)

    @pytest.mark.parametrize("d", range(2, 11))
    def test_series_and_chi_square_forms_agree(self, d):
        law = ProductKendallLaw(d)
        t = np.concatenate([10.0 ** -np.arange(12, 0, -1), np.linspace(0.1, 0.9, 9),
                            1 - 10.0 ** -np.arange(1, 13)])
        np.testing.assert_allclose(law.cdf_series(t), law.cdf_chi2(t), rtol=0, atol=1e-10)
        np.testing.assert_allclose(law.pdf_series(t), law.pdf_chi2(t), rtol=1e-10, atol=1e-10)

    @pytest.mark.parametrize("d", range(2, 11))
    def test_cdf_dominates_identity_and_is_monotone(self, d):
        t = np.linspace(0.0, 1.0, 20001)
        K = ProductKendallLaw(d).cdf(t)
        assert np.all(K >= t - 1e-15)
        assert np.all(K <= 1.0)
        # Near t = 1 the true increments fall below one ulp of 1.0, so only
        # rounding-level decreases are tolerated there.
        assert np.all(np.diff(K) >= -4 * np.finfo(float).eps)
        assert np.all(np.diff(K[t <= 0.5]) > 0)

    @pytest.mark.parametrize("d", [2, 3, 5, 8])
    def test_density_integrates_to_one(self, d):
        law = ProductKendallLaw(d)
        eps = 1e-12
        # Substitute t = exp(-u) so the log singularity at 0 becomes a smooth tail.
        value, _ = integrate.quad(lambda u: law.pdf(math.exp(-u)) * math.exp(-u), 0.0, -math.log(eps),
                                  limit=200)
        assert value == pytest.approx(1.0 - law.cdf(eps), abs=1e-9)
        if d <= 5:
            assert value == pytest.approx(1.0, abs=1e-6)

    def test_chi_square_relation(self):
        t = np.array([1e-8, 0.01, 0.3, 0.7])
        for d in (2, 4, 7):
            expected = stats.chi2.sf(-2 * np.log(t), 2 * d)
            np.testing.assert_allclose(ProductKendallLaw(d).cdf(t), expected, rtol=1e-12)

    @pytest.mark.parametrize("t", [-0.1, 1.1, np.nan])
    def test_domain_errors(self, t):
        with pytest.raises(DomainError):
            product_kendall_cdf(2, t)

    def test_pdf_open_interval(self):
        with pytest.raises(DomainError):
            product_kendall_pdf(2, 0.0)

    def test_invalid_dimension(self):
        with pytest.raises(DomainError):
            ProductKendallLaw(1)


class TestDescendingFactorialIntegral:
    @pytest.mark.parametrize("k,n,expected", [(1, 1, 0.25), (3, 1, 1 / 16), (2, 3, 6 / 3 ** 4)])
    def test_full_interval(self, k, n, expected):
        assert descending_factorial_integral(k, n, 1.0) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("k", [0, 1, 4])
    def test_plain_power(self, k):
        assert descending_factorial_integral(k, 0, 0.3) == pytest.approx(0.3 ** (k + 1) / (k + 1))

    @pytest.mark.parametrize("k,n,t", [(0, 2, 0.4), (2, 3, 0.7), (5, 4, 0.05), (1, 6, 1.0)])
    def test_against_quadrature(self, k, n, t):
        value, _ = integrate.quad(lambda x: x ** k * (-math.log(x)) ** n, 0.0, t, limit=200)
        assert descending_factorial_integral(k, n, t) == pytest.approx(value, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            descending_factorial_integral(-1, 0, 0.5)
        with pytest.raises(DomainError):
            descending_factorial_integral(0, 0, 1.5)


class TestPseudoObservations:
    def test_hand_counts(self):
        np.testing.assert_array_equal(multivariate_ecdf_at_points([[0, 0], [1, 1]]).t_hat, [0.5, 1.0])
        np.testing.assert_array_equal(multivariate_ecdf_at_points([[0, 1], [1, 0]]).t_hat, [0.5, 0.5])
        np.testing.assert_array_equal(pseudo_obs_excluding_self([[0, 0], [1, 1]]).t_hat, [0.0, 1.0])

    def test_comonotone_ranks(self):
        rng = np.random.default_rng(3)
        x = rng.permutation(50).astype(float)
        t = multivariate_ecdf_at_points(np.column_stack([x, np.exp(x), x ** 3])).t_hat
        np.testing.assert_array_equal(t, (x + 1) / 50)

    def test_ties_use_non_strict_order(self):
        t = multivariate_ecdf_at_points([[1, 1], [1, 1], [0, 2]]).t_hat
        np.testing.assert_array_equal(t, [2 / 3, 2 / 3, 1 / 3])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 40), st.integers(2, 5), st.integers(0, 2 ** 32 - 1))
    def test_bracket_between_conventions(self, n, d, seed):
        X = np.random.default_rng(seed).integers(0, 5, size=(n, d)).astype(float)
        inc = multivariate_ecdf_at_points(X).t_hat
        exc = pseudo_obs_excluding_self(X).t_hat
        assert np.all(inc >= 1 / n) and np.all(inc <= 1)
        assert np.all((exc >= 0) & (exc <= 1))
        assert np.all(exc <= inc + 1e-15) and np.all(inc <= exc + 1 / n + 1e-15)

    def test_auk_gap_bound(self):
        rng = np.random.default_rng(8)
        for n in (20, 100, 500):
            X = rng.random((n, 3))
            gap = auk_estimate(pseudo_obs_excluding_self(X)) - auk_estimate(multivariate_ecdf_at_points(X))
            assert 0.0 <= gap <= (1 + math.log(n)) / n

    def test_excluded_pseudo_obs_follow_product_law(self):
        X = np.random.default_rng(21).random((5000, 2))
        t = np.sort(pseudo_obs_excluding_self(X).t_hat)
        ks = np.max(np.abs(np.arange(1, t.size + 1) / t.size - ProductKendallLaw(2).cdf(t)))
        assert ks <= math.sqrt(math.log(2 / 0.01) / (2 * t.size))


class TestEmpiricalKendallCdf:
    def test_examples(self):
        p = multivariate_ecdf_at_points([[0, 0], [1, 1]])
        assert empirical_kendall_cdf(p, 0.5) == 0.5
        assert empirical_kendall_cdf(p, 0.99) == 0.5
        assert empirical_kendall_cdf(p, 1.0) == 1.0
        np.testing.assert_array_equal(empirical_kendall_cdf(p, [0.1, 0.5, 1.0]), [0.0, 0.5, 1.0])

    def test_domain(self):
        p = multivariate_ecdf_at_points([[0, 0], [1, 1]])
        with pytest.raises(DomainError):
            empirical_kendall_cdf(p, 1.5)


class TestAuk:
    def test_hand_arithmetic(self):
        p = multivariate_ecdf_at_points([[0, 0], [1, 1]])
        expected = 1 - (0.5 + 0.5 * LN2 + 1.0) / 2
        assert auk_estimate(p) == pytest.approx(expected, rel=1e-14)
        assert auk_estimate(p) == pytest.approx(0.0767132, abs=1e-7)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_independent_uniform_near_half(self, d):
        X = np.random.default_rng(d).random((5000, d))
        assert auk_estimate(multivariate_ecdf_at_points(X)) == pytest.approx(0.5, abs=0.02)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_comonotone_limit(self, d):
        x = np.arange(20000.0)
        auk = auk_estimate(multivariate_ecdf_at_points(np.tile(x[:, None], (1, d))))
        assert auk == pytest.approx(2.0 ** -d, abs=1e-3)

    def test_counts_route_matches_pseudo_route(self):
        X = np.random.default_rng(2).random((300, 3))
        p = multivariate_ecdf_at_points(X)
        counts = np.rint(p.t_hat * 300).astype(int)
        assert auk_from_counts(counts, 300, 3) == pytest.approx(auk_estimate(p), rel=1e-13)

    def test_increasing_transforms_leave_auk_unchanged(self):
        X = np.random.default_rng(4).normal(size=(200, 3))
        Y = np.column_stack([np.exp(X[:, 0]), X[:, 1] ** 3, np.arctan(X[:, 2])])
        a = auk_estimate(multivariate_ecdf_at_points(X))
        b = auk_estimate(multivariate_ecdf_at_points(Y))
        assert a == b

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            auk_estimate(multivariate_ecdf_at_points([[0, 0], [1, 1]]), ProductKendallLaw(3))


class TestKendallTau:
    def test_extremes(self):
        x = np.arange(30.0)
        assert kendall_tau_pairwise(np.column_stack([x, x ** 2])) == 1.0
        assert kendall_tau_pairwise(np.column_stack([x, -x])) == -1.0

    def test_biomarkers(self):
        assert kendall_tau_pairwise(load_biomarkers(["AST", "ALT"])) == pytest.approx(0.619, abs=0.001)

    def test_tie_correction_against_pair_count(self):
        rng = np.random.default_rng(9)
        X = rng.integers(0, 4, size=(40, 2)).astype(float)
        x, y = X.T
        dx = np.sign(x[:, None] - x[None, :])
        dy = np.sign(y[:, None] - y[None, :])
        iu = np.triu_indices(40, 1)
        s = (dx * dy)[iu].sum()
        tx = (dx[iu] != 0).sum()
        ty = (dy[iu] != 0).sum()
        assert kendall_tau_pairwise(X) == pytest.approx(s / math.sqrt(tx * ty), rel=1e-12)

    def test_errors(self):
        with pytest.raises(UndefinedStatisticError):
            kendall_tau_pairwise([[1, 0], [1, 1], [1, 2]])
        with pytest.raises(ShapeError):
            kendall_tau_pairwise(np.zeros((4, 3)) + np.arange(3))
