import numpy as np
import pytest

import wcontrast as wc
from wcontrast.errors import HypothesisError, ValidationError
from wcontrast.inference import wp_distance_to_dist

GRID = (511, 1e-4)


@pytest.fixture(scope="module")
def null_draws_p15(gauss_equal_pair):
    grid = wc.build_bridge_grid(gauss_equal_pair, m=GRID[0], delta=GRID[1])
    return wc.draw_limit_E(gauss_equal_pair, wc.power_cost(1.5), grid, 4000,
                           seed=301, tail_frac=None, require_checks=False)


@pytest.fixture(scope="module")
def one_sample_draws(gauss_equal_pair):
    grid = wc.build_bridge_grid(gauss_equal_pair, m=GRID[0], delta=GRID[1])
    return wc.draw_limit_one_sample(wc.gaussian(), 1.0, grid, 4000, seed=302,
                                    tail_frac=None, require_checks=False)


def test_identical_samples_p_value_one(gauss_equal_pair, null_draws_p15):
    xs = wc.gaussian().sample(400, np.random.default_rng(0))
    sample = wc.PairedSample(xs, xs.copy())
    res = wc.two_sample_test(sample, gauss_equal_pair, wc.power_cost(1.5),
                             sim=null_draws_p15)
    assert res.statistic == 0.0
    assert res.p_value == 1.0
    assert not res.reject


def test_alternative_rejects(gauss_equal_pair, gauss_shift_pair, null_draws_p15):
    sample = wc.sample_pairs(gauss_shift_pair, 2000, seed=5)
    res = wc.two_sample_test(sample, gauss_equal_pair, wc.power_cost(1.5),
                             sim=null_draws_p15)
    assert res.reject
    assert res.p_value == pytest.approx(1 / (1 + null_draws_p15.n_sim))


def test_p_value_monotone_and_addone(null_draws_p15):
    draws = null_draws_p15
    stats_grid = np.linspace(0, float(draws.values.max()) * 1.2, 50)
    ps = [draws.upper_tail_p(s) for s in stats_grid]
    assert all(a >= b for a, b in zip(ps, ps[1:]))
    assert min(ps) > 0.0


def test_reject_iff_p_below_level(gauss_equal_pair, null_draws_p15):
    rng = np.random.default_rng(8)
    for _ in range(10):
        xs = wc.gaussian().sample(300, rng)
        ys = wc.gaussian().sample(300, rng)
        res = wc.two_sample_test(wc.PairedSample(xs, ys), gauss_equal_pair,
                                 wc.power_cost(1.5), level=0.2, sim=null_draws_p15)
        assert res.reject == (res.p_value <= 0.2)


def test_two_sample_checker_gate(null_draws_p15):
    # Pareto(3) fails the equal-marginals compatibility check for b = 1.5
    null_pair = wc.equal_pair(wc.pareto(3.0))
    xs = wc.pareto(3.0).sample(100, np.random.default_rng(1))
    sample = wc.PairedSample(xs, xs.copy())
    with pytest.raises(HypothesisError, match="CFG_E"):
        wc.two_sample_test(sample, null_pair, wc.power_cost(1.5), n_sim=100,
                           grid=(64, 1e-3))
    res = wc.two_sample_test(sample, null_pair, wc.power_cost(1.5), n_sim=100,
                             grid=(64, 1e-3), seed=3, override_checks=True,
                             tail_frac=None)
    assert any("overridden" in n for n in res.notes)


def test_two_sample_quadratic_dispatch():
    # b = 2 on light tails routes to the n-rate regime
    null_pair = wc.equal_pair(wc.weibull(3.0))
    xs = wc.weibull(3.0).sample(500, np.random.default_rng(2))
    sample = wc.PairedSample(xs, wc.weibull(3.0).sample(500, np.random.default_rng(3)))
    res = wc.two_sample_test(sample, null_pair, wc.power_cost(2), n_sim=400,
                             seed=4, grid=(255, 1e-4), tail_frac=None)
    assert res.theorem_used == "quadratic"
    assert res.scaled_statistic == pytest.approx(500 * res.statistic)


def test_two_sample_requires_equal_null(gauss_shift_pair):
    xs = np.random.default_rng(0).normal(size=50)
    sample = wc.PairedSample(xs, xs.copy())
    with pytest.raises(ValidationError):
        wc.two_sample_test(sample, gauss_shift_pair, wc.power_cost(1.5))


def test_wp_distance_stratified_is_minimal():
    g = wc.gaussian()
    n = 500
    xs = np.asarray(g.quantile((np.arange(n) + 0.5) / n))
    near_min = wp_distance_to_dist(xs, g, 1.0)
    rng = np.random.default_rng(4)
    random_val = np.mean([wp_distance_to_dist(g.sample(n, rng), g, 1.0)
                          for _ in range(5)])
    assert near_min < 0.3 * random_val


def test_wp_distance_exactness_uniform():
    # single observation at 0.5 against Uniform(0,1), p = 1:
    # int |0.5 - u| du = 1/4
    val = wp_distance_to_dist(np.array([0.5]), wc.uniform(), 1.0)
    assert val == pytest.approx(0.25, abs=1e-9)


def test_gof_stratified_high_p(one_sample_draws):
    g = wc.gaussian()
    n = 2000
    xs = np.asarray(g.quantile((np.arange(n) + 0.5) / n))
    res = wc.gof_test(xs, g, p=1.0, sim=one_sample_draws)
    assert res.p_value > 0.5


def test_gof_shift_rejects(one_sample_draws):
    xs = wc.gaussian().sample(500, np.random.default_rng(6)) + 1.0
    res = wc.gof_test(xs, wc.gaussian(), p=1.0, sim=one_sample_draws)
    assert res.reject


def test_gof_tail_gate():
    xs = np.abs(np.random.default_rng(7).standard_cauchy(100)) + 1
    with pytest.raises(HypothesisError, match="dominance"):
        wc.gof_test(xs, wc.pareto(3.0), p=1.0, n_sim=50, grid=(64, 1e-3))


def test_gof_size_calibration(one_sample_draws):
    g = wc.gaussian()
    n, reps = 2000, 1000
    rejections = 0
    for i in range(reps):
        xs = g.quantile(wc.derive_rng(1234, "gof", i).random(n))
        stat = wp_distance_to_dist(np.asarray(xs), g, 1.0)
        p = one_sample_draws.upper_tail_p(n ** 0.5 * stat)
        rejections += p <= 0.05
    rate = rejections / reps
    assert 0.03 <= rate <= 0.07, rate


def test_power_monotone_in_shift(gauss_equal_pair, null_draws_p15):
    n, reps = 500, 300
    cost = wc.power_cost(1.5)
    vn = wc.rate_vn(cost, n)
    crit = float(np.quantile(null_draws_p15.values, 0.95))
    rates = []
    for shift in (0.0, 0.25, 0.5, 1.0):
        rej = 0
        for i in range(reps):
            rng = wc.derive_rng(777, "power", i)   # seed-paired across shifts
            xs = np.asarray(wc.gaussian().quantile(rng.random(n)))
            ys = np.asarray(wc.gaussian().quantile(rng.random(n))) + shift
            stat = vn * wc.w_cost_empirical(wc.PairedSample(xs, ys), cost)
            rej += stat > crit
        rates.append(rej / reps)
    assert all(b >= a - 0.01 for a, b in zip(rates, rates[1:])), rates
    assert rates[-1] >= 0.99


def test_clt_alternative_dispatch(gauss_shift_pair, bump_pair_comonotone):
    s2 = wc.clt_alternative_distribution(gauss_shift_pair, wc.power_cost(2))
    assert s2 == pytest.approx(8.0, abs=0.1)
    draws = wc.clt_alternative_distribution(bump_pair_comonotone, wc.power_cost(1),
                                            n_sim=500, grid=(255, 1e-4),
                                            tail_frac=None)
    assert isinstance(draws, wc.LimitDraws)
    assert draws.theorem == "mixed"


def test_clt_alternative_requires_D(gauss_equal_pair):
    with pytest.raises(ValidationError):
        wc.clt_alternative_distribution(gauss_equal_pair, wc.power_cost(1.5))
