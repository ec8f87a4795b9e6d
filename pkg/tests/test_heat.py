import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biclique.errors import ConfigError, OrderParityError
from biclique.kernels import biclique_gram_fast
from biclique.heat import (
    HeatConfig,
    circle_sampler,
    convergence_experiment,
    discrete_laplacian_matrix,
    energy,
    energy_tuple_sum,
    fitted_residual,
    gaussian_heat,
    heat_gram,
    interval_sampler,
    laplacian_tuple_action,
)

from conftest import two_blobs


class TestConfig:
    def test_schedule(self):
        assert HeatConfig(alpha=2.0).time(16) == pytest.approx(0.5)

    def test_fixed_time(self):
        assert HeatConfig(t=0.3).time(1000) == 0.3

    def test_odd_order(self):
        with pytest.raises(OrderParityError):
            HeatConfig(m=3)

    @pytest.mark.parametrize("kwargs", [{"t": 0.0}, {"alpha": -1.0}, {"d": 0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            HeatConfig(**kwargs)


class TestHeatKernel:
    def test_unit_normalizer(self):
        assert gaussian_heat(1 / (4 * math.pi), 1)([0.3], [0.3]) == pytest.approx(1.0, rel=1e-15)

    def test_large_time(self):
        t = 1e8
        assert gaussian_heat(t, 2)([0.0, 0.0], [1.0, 1.0]) == pytest.approx((4 * math.pi * t) ** -1.0, rel=1e-7)

    def test_unit_distance(self):
        assert gaussian_heat(0.25, 1)([0.0], [1.0]) == pytest.approx(math.exp(-1) / math.sqrt(math.pi), rel=1e-15)

    def test_nonpositive_time(self):
        with pytest.raises(ConfigError):
            gaussian_heat(0.0, 1)

    def test_gram_matches_pointwise(self):
        X = np.random.default_rng(0).normal(size=(5, 2))
        k = gaussian_heat(0.4, 2)
        np.testing.assert_allclose(heat_gram(X, 0.4, 2), [[k(a, b) for b in X] for a in X], rtol=1e-13)


class TestLaplacian:
    def test_order_two_is_graph_laplacian(self):
        X = np.random.default_rng(1).normal(size=(6, 1))
        cfg = HeatConfig(t=0.5)
        A = heat_gram(X, 0.5, 1)
        np.testing.assert_allclose(discrete_laplacian_matrix(X, cfg), np.diag(A.sum(axis=1)) - A, rtol=1e-14)

    def test_order_two_kills_constants(self):
        X = np.random.default_rng(2).normal(size=(10, 1))
        L = discrete_laplacian_matrix(X, HeatConfig(t=0.3))
        np.testing.assert_allclose(L @ np.ones(10), 0.0, atol=1e-13)

    def test_constant_at_order_four(self):
        X = np.random.default_rng(3).normal(size=(5, 1))
        L = discrete_laplacian_matrix(X, HeatConfig(t=0.3, m=4))
        A = biclique_gram_fast(heat_gram(X, 0.3, 1), 4)
        np.testing.assert_allclose(L @ np.ones(5), (1 / 2 - 1) * A.sum(axis=1), rtol=1e-13)

    @pytest.mark.parametrize("m", [2, 4])
    @pytest.mark.parametrize("n", [3, 5])
    def test_matrix_equals_tuple_sum(self, n, m):
        rng = np.random.default_rng(10 * n + m)
        X = rng.normal(size=(n, 2))
        f = rng.normal(size=n)
        cfg = HeatConfig(t=0.7, m=m, d=2)
        Lf = discrete_laplacian_matrix(X, cfg) @ f
        np.testing.assert_allclose(Lf, laplacian_tuple_action(X, cfg, f), rtol=1e-8, atol=1e-12)

    def test_decomposable_group_function_agrees_only_at_order_two(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(4, 1))
        f = rng.normal(size=4)
        cfg2, cfg4 = HeatConfig(t=0.5), HeatConfig(t=0.5, m=4)
        np.testing.assert_allclose(laplacian_tuple_action(X, cfg2, f, decomposable=True),
                                   discrete_laplacian_matrix(X, cfg2) @ f, rtol=1e-10)
        assert not np.allclose(laplacian_tuple_action(X, cfg4, f, decomposable=True),
                               discrete_laplacian_matrix(X, cfg4) @ f)

    def test_scaled_matches_full(self):
        X = np.random.default_rng(5).normal(size=(6, 1))
        cfg = HeatConfig(t=0.5, m=6)
        np.testing.assert_allclose(discrete_laplacian_matrix(X, cfg, scaled=True) * 6.0**4,
                                   discrete_laplacian_matrix(X, cfg), rtol=1e-13)


class TestEnergy:
    def test_constant_order_two(self):
        X = np.random.default_rng(6).normal(size=(8, 1))
        assert energy(X, HeatConfig(t=0.2), np.ones(8)) == pytest.approx(0.0, abs=1e-12)

    def test_blob_indicator(self):
        X, truth = two_blobs(n_per=6, distance=50.0, seed=7)
        f = truth.astype(float)
        cfg = HeatConfig(t=0.05, d=2)
        scale = np.abs(discrete_laplacian_matrix(X, cfg)).sum()
        assert abs(energy(X, cfg, f)) <= 1e-12 * scale

    @pytest.mark.parametrize("m", [2, 4])
    def test_matches_tuple_sum(self, m):
        rng = np.random.default_rng(8 + m)
        X = rng.normal(size=(5, 1))
        f = rng.normal(size=5)
        cfg = HeatConfig(t=0.4, m=m)
        assert energy(X, cfg, f) == pytest.approx(energy_tuple_sum(X, cfg, f), rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 15))
def test_order_two_energy_nonnegative(seed, n):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    f = rng.normal(size=n)
    L = discrete_laplacian_matrix(X, HeatConfig(t=0.5, d=2))
    assert f @ L @ f >= -1e-8 * np.abs(L).sum()


class TestSamplers:
    def test_circle(self):
        P, theta = circle_sampler(50, np.random.default_rng(0))
        np.testing.assert_allclose(np.hypot(P[:, 0], P[:, 1]), 1.0)
        np.testing.assert_allclose(np.arctan2(P[:, 1], P[:, 0]) % (2 * np.pi), theta % (2 * np.pi))

    def test_interval_has_unit_length(self):
        P, s = interval_sampler(50, np.random.default_rng(0))
        np.testing.assert_allclose(np.hypot(P[:, 0], P[:, 1]), 1 / (2 * np.pi))
        assert np.all((0 <= s) & (s < 1))


class TestConvergence:
    def test_fitted_residual_exact_multiple(self):
        Lf = np.array([1.0, -2.0, 3.0])
        assert fitted_residual(Lf, 2.5 * Lf) == pytest.approx(0.0, abs=1e-15)

    def test_fitted_residual_zero_operator(self):
        assert fitted_residual(np.zeros(3), np.array([1.0, -1.0, 2.0])) == pytest.approx(4 / 3)

    def test_constant_function(self):
        report = convergence_experiment(circle_sampler, np.ones_like, np.zeros_like, [50, 100], seeds=range(3))
        assert np.all(report.mean_errors() < 1e-12)

    def test_grid_must_increase(self):
        with pytest.raises(ConfigError):
            convergence_experiment(circle_sampler, np.sin, np.sin, [200, 100])

    def test_circle_order_two_values(self):
        # frozen from a run of the experiment (seeds 0..9)
        report = convergence_experiment(circle_sampler, np.sin, np.sin, [100, 200, 400], 1.0, 2, range(10))
        np.testing.assert_allclose(report.mean_errors(),
                                   [0.1287014837459014, 0.11260855489014643, 0.1043179816764596], rtol=1e-8)

    def test_report_csv(self):
        report = convergence_experiment(circle_sampler, np.sin, np.sin, [20, 40], seeds=range(2))
        lines = report.to_csv().splitlines()
        assert lines[0] == "m,alpha,n,t,seeds,mean_error,std_error"
        assert [int(line.split(",")[2]) for line in lines[1:]] == [20, 40]

    def test_interval(self):
        two_pi = 2 * np.pi
        report = convergence_experiment(interval_sampler, lambda s: np.sin(two_pi * s),
                                        lambda s: two_pi**2 * np.sin(two_pi * s), [100, 400], seeds=range(3))
        assert np.all(np.isfinite(report.mean_errors()))
