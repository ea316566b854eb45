import numpy as np
import pytest

import wcontrast as wc


@pytest.fixture(scope="session")
def std_gaussian():
    return wc.gaussian()


@pytest.fixture(scope="session")
def gauss_equal_pair(std_gaussian):
    return wc.equal_pair(std_gaussian)


@pytest.fixture(scope="session")
def gauss_shift_pair():
    return wc.make_pair(wc.gaussian(0, 1), wc.gaussian(1, 1))


@pytest.fixture(scope="session")
def bump_pair_comonotone():
    warp, dwarp = wc.bump_warp(0.15, 0.2, 0.5)
    base = wc.gaussian()
    warped = wc.warped_dist(base, warp, dwarp, (0.2, 0.5))
    partition = wc.Partition((0.0, 0.2, 0.5, 1.0), ("E", "D", "E"))
    return wc.PairSpec(base, warped, wc.comonotone(), partition)


@pytest.fixture(scope="session")
def builtin_dists():
    return {
        "gaussian": wc.gaussian(),
        "exponential": wc.exponential(),
        "pareto": wc.pareto(4.0),
        "weibull": wc.weibull(3.0),
        "beta": wc.beta_dist(2, 2),
        "uniform": wc.uniform(),
    }


def exp_growth_cost(b: float, gamma: float) -> wc.CostSpec:
    """Custom cost x^b exp(x^gamma): power index b at 0, log-cost index gamma."""

    def rho(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return x ** b * np.exp(np.minimum(x ** gamma, 709.0))

    def log_rho(xi):
        xi = np.asarray(xi, dtype=float)
        with np.errstate(over="ignore"):
            return b * xi + np.exp(np.minimum(gamma * xi, 700.0))

    return wc.spliced_cost(
        rho, rho, b=(b, b), gamma=(gamma, gamma),
        log_rho=(log_rho, log_rho), name=f"expcost(b={b},g={gamma})",
    )
