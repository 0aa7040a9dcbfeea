import csv

import numpy as np
import pytest

from kendep.diagnostics import (
    DEFAULT_GRID_SIZE,
    classify_class_membership,
    curve_grid,
    dkw_tolerance,
    kendall_curve,
    kendall_curves,
    write_curves_csv,
)
from kendep.distributions import sample_bivariate_family
from kendep.kendall_core import ProductKendallLaw


def _comonotone(n, d, seed=0):
    x = np.random.default_rng(seed).random(n)
    return np.column_stack([x ** (j + 1) for j in range(d)])


class TestCurves:
    def test_grid(self):
        g = curve_grid(64)
        assert g[0] == 1 / 64 and g[-1] == 1.0 and g.size == 64
        with pytest.raises(ValueError):
            curve_grid(8)

    def test_comonotone_pattern_zero_is_identity(self):
        n = 400
        curves = kendall_curves(_comonotone(n, 3))
        # T_hat takes each value i/n once, so K_hat(t) = floor(n t) / n.
        for idx in (0, 7):
            np.testing.assert_allclose(curves[idx].k_emp, curves[idx].grid, atol=1 / n)
        # Every mixed reflection is antitone somewhere: T_hat = 1/n for all points.
        for idx in range(1, 7):
            assert np.all(curves[idx].k_emp[curves[idx].grid >= 1 / n] == 1.0)

    def test_independent_uniforms_follow_product_law(self):
        u = np.random.default_rng(1).random((3000, 3))
        for curve in kendall_curves(u, grid_size=128):
            assert np.max(np.abs(curve.difference)) < 0.05

    def test_endpoints_and_monotone(self):
        curves = kendall_curves(np.random.default_rng(2).normal(size=(100, 2)))
        for curve in curves:
            assert curve.k_emp[-1] == 1.0 and curve.k_pi[-1] == 1.0
            assert np.all(np.diff(curve.k_emp) >= 0)
            np.testing.assert_allclose(curve.k_pi, ProductKendallLaw(2).cdf(curve.grid))

    def test_single_curve_matches_all_patterns(self):
        X = np.random.default_rng(3).normal(size=(80, 3))
        X[5] = X[6]
        everything = kendall_curves(X, grid_size=100)
        for p in range(8):
            single = kendall_curve(X, p, grid_size=100)
            assert single.pattern.index == p
            np.testing.assert_array_equal(single.k_emp, everything[p].k_emp)

    def test_csv_rows(self, tmp_path):
        curves = kendall_curves(np.random.default_rng(4).random((50, 3)), grid_size=32)
        path = tmp_path / "curves.csv"
        assert write_curves_csv(curves, path) == 8 * 32
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["pattern_index", "t", "k_emp", "k_pi"]
        assert len(rows) == 1 + 8 * 32
        assert {r[0] for r in rows[1:]} == {str(p) for p in range(8)}


class TestClassification:
    def test_dkw(self):
        assert dkw_tolerance(100) == pytest.approx(np.sqrt(np.log(40) / 200))
        assert dkw_tolerance(400) == pytest.approx(dkw_tolerance(100) / 2)

    def test_comonotone_in_x2(self):
        decision = classify_class_membership(_comonotone(500, 3))
        assert decision.in_X2 and decision.in_X1
        assert set(decision.c2_witnesses) == {0, 7}
        assert decision.grid_size == DEFAULT_GRID_SIZE

    def test_circle_crosses_product_law(self):
        # The circle's Kendall cdf t + 1/4 crosses K_Pi for every reflection.
        circle = sample_bivariate_family("circle", n=5000, seed=5)
        decision = classify_class_membership(circle, tolerance=0.0)
        assert not decision.in_X1 and not decision.in_X2
        assert decision.c1_witnesses == ()

    def test_independent_within_double_band(self):
        u = np.random.default_rng(6).random((2000, 2))
        decision = classify_class_membership(u, tolerance=2 * dkw_tolerance(2000))
        assert decision.in_X1

    def test_nesting(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            X = rng.normal(size=(60, 2))
            X[:, 1] += rng.uniform(-1, 1) * X[:, 0]
            decision = classify_class_membership(X)
            assert decision.in_X1 or not decision.in_X2
            assert set(decision.c2_witnesses) <= set(decision.c1_witnesses)

    def test_negative_tolerance(self):
        with pytest.raises(ValueError):
            classify_class_membership(np.random.default_rng(8).random((20, 2)), tolerance=-1)

    def test_serializes(self):
        d = classify_class_membership(_comonotone(50, 2)).to_dict()
        assert set(d) == {"in_X1", "in_X2", "c1_witnesses", "c2_witnesses", "tolerance", "grid_size"}
