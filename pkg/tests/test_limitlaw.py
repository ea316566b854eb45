import math

import numpy as np
import pytest
from scipy import stats

import wcontrast as wc
from wcontrast.errors import HypothesisError, TruncationError, ValidationError
from wcontrast.limitlaw import (bridge_cov_kernel, grid_mean_oracle_E,
                                grid_mean_oracle_W2, iter_bridge_paths)


@pytest.fixture(scope="module")
def gauss_grid(gauss_equal_pair):
    return wc.build_bridge_grid(gauss_equal_pair, m=255, delta=1e-4)


def test_grid_geometry(gauss_grid):
    g = gauss_grid
    assert g.m == 255
    assert g.u[0] == pytest.approx(1e-4)
    assert g.u[-1] == pytest.approx(1 - 1e-4)
    assert np.all(np.diff(g.u) > 0)
    assert g.weights.sum() == pytest.approx(g.u[-1] - g.u[0])


def test_factor_reproduces_covariance(gauss_grid):
    assert gauss_grid.frobenius_rel_err <= 1e-6


def test_single_point_grid_variance(gauss_equal_pair):
    grid = wc.build_bridge_grid(gauss_equal_pair, m=1, delta=0.01)
    assert grid.u[0] == 0.5
    vals = np.concatenate([bx[0] for bx, _ in iter_bridge_paths(grid, 20000, seed=1)])
    assert vals.var() == pytest.approx(0.25, rel=0.05)


def test_cross_block_independent_and_comonotone(gauss_equal_pair):
    m = 32
    grid = wc.build_bridge_grid(gauss_equal_pair, m=m, delta=1e-3)
    sigma = grid.factor @ grid.factor.T
    assert np.allclose(sigma[:m, m:], 0.0, atol=1e-9)
    pair_c = wc.equal_pair(wc.gaussian(), wc.comonotone())
    grid_c = wc.build_bridge_grid(pair_c, m=m, delta=1e-3)
    sigma_c = grid_c.factor @ grid_c.factor.T
    bridge = np.minimum.outer(grid_c.u, grid_c.u) - np.outer(grid_c.u, grid_c.u)
    assert np.allclose(sigma_c[:m, m:], bridge, atol=1e-8)


def test_comonotone_equal_paths_coincide():
    pair = wc.equal_pair(wc.gaussian(), wc.comonotone())
    grid = wc.build_bridge_grid(pair, m=64, delta=1e-3)
    assert grid.degenerate
    for bx, by in iter_bridge_paths(grid, 50, seed=9):
        assert np.max(np.abs(bx - by)) < 1e-4   # up to factor tolerance (jitter)


def test_independent_cross_correlation_near_zero(gauss_equal_pair):
    grid = wc.build_bridge_grid(gauss_equal_pair, m=33, delta=1e-3)
    i = 16   # u = 0.5
    xs, ys = [], []
    for bx, by in iter_bridge_paths(grid, 10000, seed=21):
        xs.append(bx[i])
        ys.append(by[i])
    r = np.corrcoef(np.concatenate(xs), np.concatenate(ys))[0, 1]
    assert abs(r) <= 0.03


def test_marginal_normality_moments(gauss_grid):
    n_sim = 10000
    cols = []
    for bx, _ in iter_bridge_paths(gauss_grid, n_sim, seed=34):
        cols.append(bx)
    bx = np.concatenate(cols, axis=1)
    for i in (10, 127, 240):
        u = gauss_grid.u[i]
        vals = bx[i]
        assert abs(stats.skew(vals)) < 0.1
        assert abs(stats.kurtosis(vals)) < 0.2
        assert vals.var() == pytest.approx(u * (1 - u), rel=0.03)


def test_variance_bound_on_driving_bridge():
    # Var(B^X(u) - B^Y(u)) <= 4 min(u, 1-u) for every coupling
    for coup in (wc.independent(), wc.comonotone(), wc.gaussian_coupling(-0.7)):
        pair = wc.equal_pair(wc.gaussian(), coup)
        grid = wc.build_bridge_grid(pair, m=65, delta=1e-3)
        var_bridge = grid.var_bridge_diag * grid.h_x ** 2   # unscale by h
        bound = 4.0 * np.minimum(grid.u, 1 - grid.u)
        assert np.all(var_bridge <= bound + 1e-9)


def test_kernel_symmetry_psd(gauss_shift_pair):
    us = np.linspace(0.01, 0.99, 60)
    K = bridge_cov_kernel(gauss_shift_pair, us)
    assert np.allclose(K, K.T, atol=1e-12)
    eigs = np.linalg.eigvalsh(K)
    assert eigs.min() >= -1e-8 * eigs.max()


def test_draw_limit_E_mean_oracle(gauss_equal_pair):
    # symmetric b = 1 cost: E int |Bq| = sqrt(2/pi) int sd(u) du over the grid
    grid = wc.build_bridge_grid(gauss_equal_pair, m=511, delta=1e-4)
    cost = wc.power_cost(1)
    draws = wc.draw_limit_E(gauss_equal_pair, cost, grid, 5000, seed=4,
                            tail_frac=None, require_checks=False)
    oracle = grid_mean_oracle_E(gauss_equal_pair, cost, grid)
    hand = math.sqrt(2 / math.pi) * float(
        grid.weights @ (math.sqrt(2) * np.sqrt(grid.u * (1 - grid.u)) / grid.h_x))
    assert oracle == pytest.approx(hand, rel=1e-12)
    assert draws.values.mean() == pytest.approx(oracle, rel=0.03)


def test_draw_limit_E_symmetric_power_is_plain_integral(gauss_equal_pair):
    # pi_pm = 1 and equal branch indices: the functional is int |Bq|^p
    grid = wc.build_bridge_grid(gauss_equal_pair, m=127, delta=1e-3)
    cost = wc.power_cost(1.5)
    draws = wc.draw_limit_E(gauss_equal_pair, cost, grid, 64, seed=5,
                            tail_frac=None, require_checks=False)
    vals = []
    for bx, by in iter_bridge_paths(grid, 64, seed=5):
        bq = bx / grid.h_x[:, None] - by / grid.h_y[:, None]
        vals.append(grid.weights @ np.abs(bq) ** 1.5)
    assert np.allclose(np.concatenate([v for v in vals]), draws.values)


def test_draw_limit_W2_uniform_third(gauss_equal_pair):
    pair = wc.equal_pair(wc.uniform())
    grid = wc.build_bridge_grid(pair, m=511, delta=1e-4)
    draws = wc.draw_limit_W2(pair, grid, 5000, seed=6, tail_frac=None,
                             require_checks=False)
    assert grid_mean_oracle_W2(pair, grid) == pytest.approx(1 / 3, rel=1e-3)
    assert draws.values.mean() == pytest.approx(1 / 3, rel=0.03)


def test_draw_limit_W2_checker_blocks_gaussian(gauss_equal_pair):
    grid = wc.build_bridge_grid(gauss_equal_pair, m=64, delta=1e-3)
    with pytest.raises(HypothesisError, match="W2H"):
        wc.draw_limit_W2(gauss_equal_pair, grid, 10, seed=1, tail_frac=None)


def test_draw_limit_one_sample_uniform_mean():
    dist = wc.uniform()
    pair = wc.equal_pair(dist)
    grid = wc.build_bridge_grid(pair, m=511, delta=1e-4)
    draws = wc.draw_limit_one_sample(dist, 1.0, grid, 5000, seed=8,
                                     tail_frac=None, require_checks=False)
    expected = math.sqrt(2 / math.pi) * math.pi / 8
    assert draws.values.mean() == pytest.approx(expected, rel=0.02)
    assert np.all(draws.values > 0)


def test_draw_limit_one_sample_gaussian_p15_finite_positive(gauss_equal_pair):
    grid = wc.build_bridge_grid(gauss_equal_pair, m=255, delta=1e-4)
    draws = wc.draw_limit_one_sample(wc.gaussian(), 1.5, grid, 500, seed=9,
                                     tail_frac=None)
    assert np.all(np.isfinite(draws.values))
    assert np.all(draws.values > 0)


def test_one_sample_delta_stability():
    # shrinking delta changes the mean by less than the sum of tail bounds
    dist = wc.uniform()
    pair = wc.equal_pair(dist)
    means, bounds = [], []
    for delta in (1e-3, 1e-4):
        grid = wc.build_bridge_grid(pair, m=1023, delta=delta)
        draws = wc.draw_limit_one_sample(dist, 1.0, grid, 20000, seed=10,
                                         tail_frac=None, require_checks=False)
        means.append(draws.values.mean())
        bounds.append(draws.tail_bound)
    assert abs(means[0] - means[1]) <= sum(bounds) + 3e-3   # MC noise allowance


def test_draw_limit_ED_mixed_shape(bump_pair_comonotone):
    grid = wc.build_bridge_grid(bump_pair_comonotone, m=511, delta=1e-4)
    cost = wc.power_cost(1)
    draws = wc.draw_limit_ED(bump_pair_comonotone, cost, grid, 4000, seed=11,
                             tail_frac=None, require_checks=False)
    # comonotone: E-part vanishes, D-part is int_D Bq with variance Var(bump(U))
    var_expected = 0.15 ** 2 * 0.3 * 0.375 - 0.0225 ** 2
    assert draws.values.mean() == pytest.approx(0.0, abs=0.01)
    assert draws.values.var() == pytest.approx(var_expected, rel=0.08)


def test_draw_limit_ED_reduces_to_E_for_same_seed(gauss_equal_pair):
    # all-E partition, b = 1, L(0) = 1: the mixed dispatcher must reproduce
    # the equal-marginals draws exactly (shared path machinery)
    grid = wc.build_bridge_grid(gauss_equal_pair, m=255, delta=1e-4)
    cost = wc.power_cost(1)
    a = wc.draw_limit_ED(gauss_equal_pair, cost, grid, 256, seed=12,
                         tail_frac=None, require_checks=False)
    b = wc.draw_limit_E(gauss_equal_pair, cost, grid, 256, seed=12,
                        tail_frac=None, require_checks=False)
    assert np.allclose(a.values, b.values, rtol=1e-12)


def test_draw_limit_ED_gaussian_term_variance(gauss_shift_pair):
    # all-D partition with 1 < b < 2: draws are Gaussian with variance sigma2_D
    grid = wc.build_bridge_grid(gauss_shift_pair, m=511, delta=1e-4)
    cost = wc.power_cost(1.5)
    draws = wc.draw_limit_ED(gauss_shift_pair, cost, grid, 5000, seed=13,
                             tail_frac=None, require_checks=False)
    # |rho'(-1)| = 1.5; sigma^2 = 1.5^2 * 2 * Var-type Hoeffding integral = 4.5
    assert draws.values.var() == pytest.approx(1.5 ** 2 * 2.0, rel=0.08)
    assert stats.kstest(draws.values, stats.norm(0, 1.5 * math.sqrt(2)).cdf).statistic < 0.03


def test_grid_refinement_stability():
    # doubling m moves the mean by < 1% when the edge integrand is bounded
    # (compact-support built-ins); heavy edge spikes converge more slowly
    cost = wc.power_cost(1.5)
    for dist in (wc.uniform(), wc.beta_dist(2, 2)):
        pair = wc.equal_pair(dist)
        means = []
        for m in (255, 511):
            grid = wc.build_bridge_grid(pair, m=m, delta=1e-4)
            draws = wc.draw_limit_E(pair, cost, grid, 100_000, seed=14,
                                    tail_frac=None, require_checks=False)
            means.append(draws.values.mean())
        assert abs(means[1] / means[0] - 1) < 0.01, dist.name


def test_truncation_error_raised_when_bound_large():
    # Weibull(3) quadratic functional: over a third of the edge-integrability
    # mass sits beyond any feasible clip, so the 5% contract must trip
    pair = wc.equal_pair(wc.weibull(3.0))
    grid = wc.build_bridge_grid(pair, m=255, delta=1e-4)
    with pytest.raises(TruncationError, match="shrink delta"):
        wc.draw_limit_W2(pair, grid, 200, seed=15, require_checks=False)


def test_sigma2_hoeffding_oracle(gauss_shift_pair):
    assert wc.sigma2_D(gauss_shift_pair, wc.power_cost(2)) == pytest.approx(8.0, abs=0.08)


def test_sigma2_pinball(gauss_shift_pair):
    alpha = 0.3
    val = wc.sigma2_D(gauss_shift_pair, wc.pinball_cost(alpha))
    assert val == pytest.approx((1 - alpha) ** 2 * 2.0, abs=0.02)


def test_sigma2_zero_for_degenerate_pair():
    pair = wc.make_pair(wc.gaussian(0, 1), wc.gaussian(1, 1), wc.comonotone())
    val = wc.sigma2_D(pair, wc.power_cost(2))
    assert val == pytest.approx(0.0, abs=1e-10)


def test_grid_validation(gauss_equal_pair):
    with pytest.raises(ValidationError):
        wc.build_bridge_grid(gauss_equal_pair, m=0)
    with pytest.raises(ValidationError):
        wc.build_bridge_grid(gauss_equal_pair, m=16, delta=0.7)


def test_draws_reproducible(gauss_equal_pair):
    grid = wc.build_bridge_grid(gauss_equal_pair, m=64, delta=1e-3)
    cost = wc.power_cost(1.5)
    a = wc.draw_limit_E(gauss_equal_pair, cost, grid, 40, seed=77,
                        tail_frac=None, require_checks=False)
    b = wc.draw_limit_E(gauss_equal_pair, cost, grid, 40, seed=77,
                        tail_frac=None, require_checks=False)
    assert np.array_equal(a.values, b.values)
    # chunking must not matter
    c_small = [bx for bx, _ in iter_bridge_paths(grid, 40, seed=77, chunk=7)]
    c_big = [bx for bx, _ in iter_bridge_paths(grid, 40, seed=77, chunk=40)]
    assert np.allclose(np.concatenate(c_small, axis=1),
                       np.concatenate(c_big, axis=1))
