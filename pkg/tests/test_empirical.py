"""Sample-based symmetrization, exact polygon symmetrals, and diagnostics."""

import math

import numpy as np
import pytest

from zonomed import (
    ConvexPolygon2D,
    EmpiricalSample,
    GaussianState,
    RegressorConfig,
    complement_basis,
    conjecture_explorer,
    norm_reduction_check,
    polygon_steiner_symmetral_2d,
    regression_coefficient,
    sample_uniform_polygon,
    symmetrize_gaussian,
    symmetrize_sample,
    theorem1_check,
)

DIAG_U = np.array([1.0, 1.0]) / math.sqrt(2.0)
SQUARE = ConvexPolygon2D([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def gaussian_sample(n, seed, cov=((1.0, 0.0), (0.0, 4.0))):
    rng = np.random.default_rng(seed)
    return EmpiricalSample(rng.multivariate_normal([0.0, 0.0], np.asarray(cov), size=n))


class TestComplementBasis:
    @pytest.mark.parametrize("seed", range(5))
    def test_orthonormal_complement(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 6))
        u = rng.standard_normal(d)
        u /= np.linalg.norm(u)
        b = complement_basis(u)
        assert b.shape == (d - 1, d)
        np.testing.assert_allclose(b @ b.T, np.eye(d - 1), atol=1e-12)
        np.testing.assert_allclose(b @ u, np.zeros(d - 1), atol=1e-12)

    def test_deterministic(self):
        u = np.array([0.6, 0.8])
        np.testing.assert_array_equal(complement_basis(u), complement_basis(u))


class TestSymmetrizeSample:
    def test_d1_centers_the_sample(self):
        sample = EmpiricalSample(np.array([[1.0], [2.0], [6.0]]))
        out = symmetrize_sample(sample, [1.0], RegressorConfig("knn", k=2))
        assert out.draws.mean() == pytest.approx(0.0, abs=1e-12)

    def test_gaussian_crosscheck_exact_linear(self):
        n = 100_000
        sample = gaussian_sample(n, seed=0)
        out = symmetrize_sample(sample, DIAG_U, RegressorConfig("exact_linear"))
        analytic = symmetrize_gaussian(GaussianState([0.0, 0.0], np.diag([1.0, 4.0])), DIAG_U)
        cov_hat = np.cov(out.draws, rowvar=False)
        gap = np.linalg.norm(cov_hat - analytic.cov, ord=2)
        assert gap <= 5.0 / math.sqrt(n) * np.linalg.norm(np.diag([1.0, 4.0]), ord=2)

    def test_reflection_symmetric_sample_small_shift(self):
        n = 10_000
        rng = np.random.default_rng(1)
        half = rng.normal(size=(n // 2, 2))
        u = DIAG_U
        reflected = half - 2.0 * (half @ u)[:, None] * u[None, :]
        sample = EmpiricalSample(np.vstack([half, reflected]))
        k = math.isqrt(n)
        out = symmetrize_sample(sample, u, RegressorConfig("knn", k=k))
        shift = np.abs((sample.draws - out.draws) @ u).max()
        assert shift <= 10.0 / math.sqrt(k) + n ** (-0.25)

    def test_projection_coordinates_untouched(self):
        sample = gaussian_sample(2000, seed=2)
        basis = complement_basis(DIAG_U)
        out = symmetrize_sample(sample, DIAG_U, RegressorConfig("knn", k=45))
        np.testing.assert_allclose(
            out.draws @ basis.T, sample.draws @ basis.T, atol=1e-12
        )

    def test_exact_linear_idempotent(self):
        sample = gaussian_sample(5000, seed=3)
        cfg = RegressorConfig("exact_linear")
        once = symmetrize_sample(sample, DIAG_U, cfg)
        twice = symmetrize_sample(once, DIAG_U, cfg)
        np.testing.assert_allclose(twice.draws, once.draws, atol=1e-10)

    def test_k_larger_than_n_rejected(self):
        sample = EmpiricalSample(np.zeros((3, 2)))
        with pytest.raises(ValueError):
            symmetrize_sample(sample, [1.0, 0.0], RegressorConfig("knn", k=5))

    def test_degenerate_projection_falls_back_to_mean(self):
        draws = np.column_stack([np.zeros(6), np.arange(6.0)])
        sample = EmpiricalSample(draws)
        out = symmetrize_sample(sample, [0.0, 1.0], RegressorConfig("knn", k=2))
        assert out.draws[:, 1].mean() == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(out.draws[:, 0], 0.0, atol=0.0)


class TestPolygonSymmetral:
    def test_rectangle_vertical_direction(self):
        rect = ConvexPolygon2D([[0.0, 1.0], [3.0, 1.0], [3.0, 2.0], [0.0, 2.0]])
        out = polygon_steiner_symmetral_2d(rect, [0.0, 1.0])
        assert out.area == pytest.approx(3.0, rel=1e-12)
        ys = np.sort(np.unique(np.round(out.vertices[:, 1], 12)))
        np.testing.assert_allclose(ys, [-0.5, 0.5])

    def test_right_triangle(self):
        tri = ConvexPolygon2D([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        out = polygon_steiner_symmetral_2d(tri, [0.0, 1.0])
        expected = {(0.0, -0.5), (1.0, 0.0), (0.0, 0.5)}
        got = {tuple(np.round(v, 12)) for v in out.vertices}
        assert got == expected
        assert out.area == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_area_preserved_and_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        from zonomed import Zonotope, zonotope_polygon_2d

        poly = zonotope_polygon_2d(Zonotope(rng.standard_normal((5, 2))))
        u = rng.standard_normal(2)
        u /= np.linalg.norm(u)
        out = polygon_steiner_symmetral_2d(poly, u)
        assert out.area == pytest.approx(poly.area, rel=1e-12)
        # reflection through the line {t * w} maps the vertex set to itself
        reflected = out.vertices - 2.0 * (out.vertices @ u)[:, None] * u[None, :]
        for v in reflected:
            assert np.min(np.linalg.norm(out.vertices - v, axis=1)) <= 1e-12


class TestSampleUniformPolygon:
    def test_square_moments(self):
        n = 100_000
        sample = sample_uniform_polygon(SQUARE, n, seed=4)
        np.testing.assert_allclose(
            sample.draws.mean(axis=0), [0.5, 0.5], atol=5.0 / math.sqrt(n)
        )

    def test_triangle_centroid(self):
        tri = ConvexPolygon2D([[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]])
        n = 100_000
        sample = sample_uniform_polygon(tri, n, seed=5)
        np.testing.assert_allclose(
            sample.draws.mean(axis=0), [2.0 / 3.0, 1.0], atol=5.0 / math.sqrt(n)
        )

    def test_membership(self):
        sample = sample_uniform_polygon(SQUARE, 5000, seed=6)
        assert np.all(SQUARE.contains(sample.draws))

    def test_reproducible(self):
        a = sample_uniform_polygon(SQUARE, 100, seed=7)
        b = sample_uniform_polygon(SQUARE, 100, seed=7)
        np.testing.assert_array_equal(a.draws, b.draws)


class TestTheorem1:
    def test_square_diagonal(self):
        n = 20_000
        k = math.isqrt(n) + 1
        report = theorem1_check(SQUARE, DIAG_U, n, RegressorConfig("knn", k=k), seed=8)
        assert report.inside_fraction >= 0.99
        assert report.area_rel_error < 1e-12
        assert report.delta == pytest.approx(3.0 * SQUARE.diameter / math.sqrt(k))

    def test_symmetric_polygon_small_shifts(self):
        # already u-symmetric: the symmetral is the body itself and the
        # estimated shifts are pure regression noise
        rect = ConvexPolygon2D([[-1.0, -0.5], [1.0, -0.5], [1.0, 0.5], [-1.0, 0.5]])
        n = 10_000
        sample = sample_uniform_polygon(rect, n, seed=9)
        out = symmetrize_sample(sample, [0.0, 1.0], RegressorConfig("knn", k=math.isqrt(n)))
        shift = np.abs(out.draws[:, 1] - sample.draws[:, 1]).max()
        assert shift <= 0.2

    def test_chi_square_reported(self):
        report = theorem1_check(SQUARE, DIAG_U, 5000, RegressorConfig("knn", k=70), seed=10)
        assert report.chi_square >= 0.0
        assert report.chi_square_dof > 0


class TestNormReduction:
    def test_ols_identity(self):
        sample = gaussian_sample(20_000, seed=11)
        res = norm_reduction_check(sample, DIAG_U, RegressorConfig("exact_linear"))
        assert res.decrease == pytest.approx(res.regression_mean_square, abs=1e-10)
        assert res.after <= res.before

    def test_symmetric_sample_no_decrease(self):
        rng = np.random.default_rng(12)
        half = rng.normal(size=(4000, 2))
        reflected = half - 2.0 * (half @ DIAG_U)[:, None] * DIAG_U[None, :]
        sample = EmpiricalSample(np.vstack([half, reflected]))
        res = norm_reduction_check(sample, DIAG_U, RegressorConfig("exact_linear"))
        assert res.decrease <= 1e-3 * res.before

    def test_gaussian_matches_analytic(self):
        n = 100_000
        sample = gaussian_sample(n, seed=13)
        res = norm_reduction_check(sample, DIAG_U, RegressorConfig("exact_linear"))
        _, row = regression_coefficient(np.diag([1.0, 4.0]), DIAG_U)
        analytic = float(row @ np.diag([1.0, 4.0]) @ row)
        assert abs(res.decrease - analytic) / analytic <= 5.0 / math.sqrt(n) * 10.0


class TestConjectureExplorer:
    def test_exact_linear_gaussian_converges(self):
        n = 100_000
        sample = gaussian_sample(n, seed=14, cov=((6.0, 0.0), (0.0, 0.5)))
        reports = conjecture_explorer(
            sample, 200, "random_seeded", RegressorConfig("exact_linear"), seed=15
        )
        assert reports[-1].anisotropy < 1.1

    def test_isotropic_shell_stays_isotropic(self):
        # the exact regressor sees the true (zero) conditional mean, so the
        # only disturbance is sampling noise at the 1/sqrt(N) scale
        n = 20_000
        rng = np.random.default_rng(16)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
        sample = EmpiricalSample(np.column_stack([np.cos(theta), np.sin(theta)]))
        reports = conjecture_explorer(
            sample, 10, "random_seeded", RegressorConfig("exact_linear"), seed=17
        )
        bound = 1.0 + 10.0 / math.sqrt(n)
        assert all(r.anisotropy < bound for r in reports)

    def test_isotropic_shell_knn_noise_budget(self):
        # knn shifts carry O(1/sqrt(k)) noise because the conditional law on
        # a shell is bimodal; the anisotropy budget scales accordingly
        n = 20_000
        k = math.isqrt(n)
        rng = np.random.default_rng(26)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
        sample = EmpiricalSample(np.column_stack([np.cos(theta), np.sin(theta)]))
        reports = conjecture_explorer(
            sample, 5, "random_seeded", RegressorConfig("knn", k=k), seed=27
        )
        bound = 1.0 + 10.0 / math.sqrt(k)
        assert all(r.anisotropy < bound for r in reports)

    def test_mean_square_nonincreasing_exact_linear(self):
        sample = gaussian_sample(20_000, seed=18, cov=((3.0, 1.0), (1.0, 2.0)))
        reports = conjecture_explorer(
            sample, 25, "random_seeded", RegressorConfig("exact_linear"), seed=19
        )
        assert all(r.mean_square_decrease >= -1e-12 for r in reports)
        assert all(r.regression_mean_square >= 0.0 for r in reports)

    def test_knn_reduces_anisotropy(self):
        sample = gaussian_sample(5000, seed=20, cov=((5.0, 0.0), (0.0, 0.5)))
        reports = conjecture_explorer(
            sample, 50, "max_anisotropy", RegressorConfig("knn", k=70), seed=21
        )
        assert reports[-1].anisotropy < reports[0].anisotropy * 0.5

    def test_cyclic_axes_policy(self):
        sample = gaussian_sample(2000, seed=22)
        reports = conjecture_explorer(
            sample, 4, "cyclic_axes", RegressorConfig("exact_linear"), seed=23
        )
        np.testing.assert_array_equal(reports[0].direction, [1.0, 0.0])
        np.testing.assert_array_equal(reports[1].direction, [0.0, 1.0])
        np.testing.assert_array_equal(reports[2].direction, [1.0, 0.0])

    def test_bad_policy_rejected(self):
        sample = gaussian_sample(100, seed=24)
        with pytest.raises(ValueError):
            conjecture_explorer(sample, 1, "sideways")
