"""
Unit tests for the limiting covariances
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from modules.asymptotics import (
    CovarianceQuery,
    gamma_closed_form,
    gamma_disjoint,
    gamma_quadrature,
    gumbel_diagonal_variances,
    hat_covariance,
    var_disjoint_hat,
    var_sliding_hat,
    variance_curve,
    variance_dominance_check,
)
from modules.copula_models import GumbelHougaard, TExtremeValue
from modules.errors import InvalidModelError
from tests.conftest import BETA_15

pytestmark = pytest.mark.unit


def _log_mean(x, y):
    return (x - y) / (math.log(x) - math.log(y))


class TestCovarianceQuery:
    """Tests for query validation"""

    def test_swaps_when_a_exceeds_c(self, gumbel):
        """a > c is answered through the swapped query"""
        q = CovarianceQuery(gumbel, u=(0.3, 0.4), v=(0.6, 0.7), a=2.0, c=1.0).ordered()
        assert (q.u, q.v, q.a, q.c) == ((0.6, 0.7), (0.3, 0.4), 1.0, 2.0)

    def test_rejects_nonpositive_scale(self, gumbel):
        """Block scales are positive"""
        with pytest.raises(InvalidModelError):
            CovarianceQuery(gumbel, u=(0.3, 0.4), v=(0.6, 0.7), a=0.0)

    def test_rejects_dimension_mismatch(self, gumbel):
        """Points need d coordinates"""
        with pytest.raises(InvalidModelError):
            CovarianceQuery(gumbel, u=(0.3, 0.4, 0.5), v=(0.6, 0.7))


class TestGamma:
    """Tests for the sliding-blocks covariance functional"""

    def test_independence_value(self, independence):
        """beta = 1, a = c = 1, u = v = (0.5, 0.5)"""
        u = 0.5
        expected = 2.0 * (_log_mean(u ** 2, u ** 4) - u ** 4)
        q = CovarianceQuery(independence, u=(u, u), v=(u, u))
        assert gamma_closed_form(q) == pytest.approx(expected, abs=1e-14)
        assert gamma_closed_form(q) == pytest.approx(0.145506, abs=1e-6)

    def test_quadrature_matches_closed_form_on_fixed_query(self, gumbel):
        """Both routes agree on an unequal-scale query"""
        q = CovarianceQuery(gumbel, u=(0.3, 0.8), v=(0.55, 0.45), a=0.7, c=1.6)
        assert gamma_quadrature(q) == pytest.approx(gamma_closed_form(q), abs=1e-8)

    def test_quadrature_matches_closed_form_random(self):
        """500 random queries with beta in [1, 3] and a <= c in [0.5, 2]"""
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(500):
            copula = GumbelHougaard(beta=float(rng.uniform(1.0, 3.0)))
            a, c = np.sort(rng.uniform(0.5, 2.0, size=2))
            q = CovarianceQuery(copula, u=tuple(rng.uniform(0.01, 0.99, 2)), v=tuple(rng.uniform(0.01, 0.99, 2)), a=a, c=c)
            worst = max(worst, abs(gamma_quadrature(q) - gamma_closed_form(q)))
        assert worst < 1e-8

    def test_symmetry_under_swap(self, gumbel):
        """gamma(v, u, c, a) = gamma(u, v, a, c)"""
        q = CovarianceQuery(gumbel, u=(0.3, 0.8), v=(0.55, 0.45), a=0.7, c=1.6)
        swapped = CovarianceQuery(gumbel, u=q.v, v=q.u, a=q.c, c=q.a)
        assert gamma_closed_form(swapped) == pytest.approx(gamma_closed_form(q), abs=1e-15)
        assert gamma_quadrature(swapped) == pytest.approx(gamma_quadrature(q), abs=1e-12)

    def test_variance_nonnegative(self):
        """gamma(u, u, a, a) >= 0"""
        rng = np.random.default_rng(5)
        for _ in range(100):
            copula = GumbelHougaard(beta=float(rng.uniform(1.0, 3.0)))
            u = tuple(rng.uniform(0.0, 1.0, 2))
            a = float(rng.uniform(0.5, 2.0))
            assert gamma_closed_form(CovarianceQuery(copula, u=u, v=u, a=a, c=a)) >= -1e-15

    def test_zero_coordinate(self, gumbel):
        """P = 0 branch: u with a zero coordinate has zero covariance"""
        q = CovarianceQuery(gumbel, u=(0.0, 0.5), v=(0.4, 0.6))
        assert gamma_closed_form(q) == pytest.approx(0.0, abs=1e-15)
        assert gamma_quadrature(q) == pytest.approx(0.0, abs=1e-12)

    def test_upper_corner(self, gumbel):
        """u = (1, 1) is degenerate"""
        q = CovarianceQuery(gumbel, u=(1.0, 1.0), v=(0.4, 0.6))
        assert gamma_closed_form(q) == pytest.approx(0.0, abs=1e-15)

    def test_near_singular_log_ratio(self, gumbel):
        """P close to Q uses the limit of the logarithmic mean"""
        q = CovarianceQuery(gumbel, u=(0.5, 0.5), v=(0.5, 0.5 + 1e-14))
        assert math.isfinite(gamma_closed_form(q))

    def test_disjoint(self, independence):
        """gamma^D = C(u ∧ v) - C(u) C(v)"""
        assert gamma_disjoint(independence, [0.5, 0.5], [0.5, 0.5]) == pytest.approx(0.25 - 0.0625)

    def test_t_attractor_quadrature(self):
        """The closed form holds for a non-Archimedean C_inf"""
        q = CovarianceQuery(TExtremeValue(nu=3, theta=0.4), u=(0.35, 0.6), v=(0.5, 0.7), a=0.8, c=1.3)
        assert gamma_quadrature(q) == pytest.approx(gamma_closed_form(q), abs=1e-8)


class TestEstimatedMarginsVariance:
    """Tests for the plug-in variances"""

    def test_disjoint_independence(self, independence):
        """beta = 1 at (0.5, 0.5): Var^D = 0.0625"""
        assert var_disjoint_hat(independence, [0.5, 0.5]) == pytest.approx(0.0625, abs=1e-14)

    def test_sliding_independence(self, independence):
        """beta = 1 at (0.5, 0.5): Var ≈ 0.03479"""
        u = 0.5
        expected = 2.0 * (_log_mean(u ** 2, u ** 4) - u ** 4) - 4.0 * (_log_mean(u ** 3, u ** 4) - u ** 4)
        value = var_sliding_hat(independence, [u, u])
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx(0.03479, abs=1e-4)

    @pytest.mark.parametrize("beta", [1.0, BETA_15, 2.5])
    def test_explicit_gumbel_formulas(self, beta):
        """Generic plug-in agrees with the explicit diagonal formulas"""
        copula = GumbelHougaard(beta=beta)
        diag = np.linspace(0.05, 0.95, 19)
        sliding, disjoint = gumbel_diagonal_variances(beta, diag)
        assert_allclose(sliding, [var_sliding_hat(copula, [t, t]) for t in diag], atol=1e-12)
        assert_allclose(disjoint, [var_disjoint_hat(copula, [t, t]) for t in diag], atol=1e-12)

    def test_corner_is_degenerate(self, gumbel):
        """Both variances vanish as u approaches (1, 1)"""
        assert var_sliding_hat(gumbel, [0.9999, 0.9999]) < 1e-3
        assert var_disjoint_hat(gumbel, [0.9999, 0.9999]) < 1e-3

    @pytest.mark.parametrize("beta", [1.0, BETA_15])
    def test_disjoint_dominates_pointwise(self, beta):
        """Var^D >= Var on the diagonal"""
        frame = variance_curve(GumbelHougaard(beta=beta), np.round(np.arange(1, 100) / 100.0, 10))
        assert np.all(frame["var_disjoint"] >= frame["var_sliding"] - 1e-12)
        ratio = frame["ratio"].to_numpy()
        assert np.all(ratio[np.isfinite(ratio)] > 1.0)

    def test_continuous_in_scale(self, gumbel):
        """|Var(a) - Var(a + 1e-4)| < 1e-2 over a in [0.5, 2]"""
        for a in np.linspace(0.5, 2.0, 16):
            gap = abs(var_sliding_hat(gumbel, [0.4, 0.6], a) - var_sliding_hat(gumbel, [0.4, 0.6], a + 1e-4))
            assert gap < 1e-2

    def test_known_margins(self, independence):
        """Known margins give the raw covariance kernel"""
        cov = hat_covariance(independence, [[0.5, 0.5]], "disjoint", margins="known")
        assert cov[0, 0] == pytest.approx(0.1875)

    def test_covariance_matrix_shape(self, gumbel):
        """k points give a symmetric k x k matrix"""
        points = np.array([[0.2, 0.3], [0.5, 0.5], [0.8, 0.6]])
        cov = hat_covariance(gumbel, points)
        assert cov.shape == (3, 3)
        assert np.array_equal(cov, cov.T)

    def test_unknown_scheme(self, gumbel):
        """Only sliding and disjoint"""
        with pytest.raises(InvalidModelError):
            hat_covariance(gumbel, [[0.5, 0.5]], scheme="overlapping")

    def test_variance_curve_columns(self, gumbel):
        """Rows per (u, a) with the documented columns"""
        frame = variance_curve(gumbel, [0.2, 0.5], a_values=(1.0, 2.0))
        assert list(frame.columns) == ["u", "a", "var_sliding", "var_disjoint", "ratio"]
        assert len(frame) == 4

    def test_gumbel_formulas_reject_boundary(self):
        """Diagonal values lie in (0, 1)"""
        with pytest.raises(InvalidModelError):
            gumbel_diagonal_variances(1.5, [0.0, 0.5])


class TestDominance:
    """Tests for the Loewner comparison"""

    @pytest.mark.parametrize("beta", [1.0, BETA_15])
    def test_loewner_order(self, beta):
        """Cov^D - Cov is positive semidefinite on 100 random point sets"""
        copula = GumbelHougaard(beta=beta)
        report = variance_dominance_check(copula, [[0.3, 0.3], [0.5, 0.7]], rng=np.random.default_rng(17))
        assert report.point_sets == 100
        assert report.min_eigenvalue >= -1e-9
        assert report.dominated

    def test_explicit_point_sets(self, gumbel):
        """Given point sets are used as-is"""
        sets = [np.array([[0.2, 0.4]]), np.array([[0.3, 0.3], [0.6, 0.8]])]
        report = variance_dominance_check(gumbel, [[0.5, 0.5]], point_sets=sets)
        assert report.point_sets == 2
        assert report.to_dict()["dominated"] is True
