"""Simulation of the coupled scaled Brownian-bridge limit laws.

The joint Gaussian process has per-marginal Brownian-bridge covariance
``min(u,v) - uv`` and cross covariance ``C(u,v) - uv`` where ``C`` is the
copula of the pair; the driving process is ``Bq(u) = B^X(u)/h_X(u) -
B^Y(u)/h_Y(u)``. Limits are evaluated on a delta-clipped equispaced grid
by trapezoid quadrature of one shared path per draw, with an explicit
bound on the truncated tail contribution derived from the edge
integrability of the relevant functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import roots_legendre

from .assumptions import (PASS, check_cfg_e, check_cfg_ed, check_compact,
                          check_pareto_dominance, check_w2_hypotheses)
from .costs import CostSpec, abs_moment_normal, derivative
from .distributions import LEFT, RIGHT, DistSpec, PairSpec, equal_pair
from .errors import (HypothesisError, NumericalError, TruncationError,
                     ValidationError)
from .seeding import derive_rng
from .tails import CONVERGENT, assess_tail

__all__ = [
    "BridgeGrid",
    "LimitDraws",
    "build_bridge_grid",
    "draw_limit_E",
    "draw_limit_W2",
    "draw_limit_ED",
    "draw_limit_one_sample",
    "sigma2_D",
    "grid_mean_oracle_E",
    "grid_mean_oracle_W2",
]

_JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)
_FROBENIUS_RTOL = 1e-6
_DEGENERATE_VAR = 1e-12
_DEFAULT_TAIL_FRAC = 0.05

THEOREM_EQUAL = "equal"            # quantiles agree everywhere, rate v_n
THEOREM_QUADRATIC = "quadratic"    # b = 2 regime, rate n
THEOREM_GAUSSIAN = "gaussian"      # quantiles differ, sqrt(n) CLT
THEOREM_MIXED = "mixed"            # mixed partition, sqrt(n), shared path
THEOREM_ONE_SAMPLE = "one_sample"  # single marginal against its own law


@dataclass(frozen=True)
class BridgeGrid:
    """Factorized joint covariance of the two bridges on a clipped grid."""

    u: np.ndarray
    delta: float
    factor: np.ndarray           # lower-triangular, shape (2m, 2m)
    jitter: float
    h_x: np.ndarray
    h_y: np.ndarray
    weights: np.ndarray          # trapezoid weights on the grid
    var_bridge_diag: np.ndarray  # Var(Bq(u)) from the pre-jitter covariance
    frobenius_rel_err: float
    pair_fingerprint: str

    @property
    def m(self) -> int:
        return len(self.u)

    @property
    def degenerate(self) -> bool:
        """True when the driving process is almost surely 0 on the grid."""
        return bool(np.max(self.var_bridge_diag) <= _DEGENERATE_VAR)

    def summary(self) -> dict:
        return {
            "m": self.m,
            "delta": self.delta,
            "jitter": self.jitter,
            "frobenius_rel_err": self.frobenius_rel_err,
            "degenerate": self.degenerate,
            "pair": self.pair_fingerprint,
        }


@dataclass(frozen=True)
class LimitDraws:
    """Seeded realizations of a limiting random variable."""

    values: np.ndarray
    theorem: str
    grid_meta: dict
    seed: int
    tail_bound: float

    @property
    def n_sim(self) -> int:
        return len(self.values)

    def upper_tail_p(self, statistic: float) -> float:
        """Add-one upper-tail probability (1 + #{draws >= s}) / (1 + N)."""
        return (1.0 + float(np.sum(self.values >= statistic))) / (1.0 + self.n_sim)

    def quantiles(self, qs=(0.9, 0.95, 0.99)) -> dict:
        return {float(q): float(np.quantile(self.values, q)) for q in qs}


def build_bridge_grid(pair: PairSpec, m: int = 2047, delta: float = 1e-4) -> BridgeGrid:
    """Assemble and factorize the 2m x 2m joint covariance on the
    delta-clipped equispaced grid, escalating diagonal jitter
    (0, 1e-12, 1e-10, 1e-8) until the Cholesky factorization succeeds.
    """
    if m < 1:
        raise ValidationError("bridge grid requires m >= 1")
    if not 0.0 < delta < 0.5:
        raise ValidationError("bridge grid requires 0 < delta < 1/2")
    u = np.linspace(delta, 1.0 - delta, m) if m >= 2 else np.array([0.5])

    K = np.minimum.outer(u, u) - np.outer(u, u)
    if pair.coupling.kind == "independent":
        cross = np.zeros_like(K)
    elif pair.coupling.kind == "comonotone":
        cross = K.copy()
    else:
        cross = np.asarray(pair.coupling.copula(u[:, None], u[None, :]), dtype=float) \
            - np.outer(u, u)

    h_x = np.asarray(pair.dist_x.density_quantile(u), dtype=float)
    h_y = np.asarray(pair.dist_y.density_quantile(u), dtype=float)
    for name, h in (("X", h_x), ("Y", h_y)):
        if not np.all(np.isfinite(h)) or np.any(h <= 0.0):
            raise ValidationError(f"density-quantile of marginal {name} must be positive "
                                  "and finite on the grid")

    two_m = 2 * m
    sigma = np.empty((two_m, two_m))
    sigma[:m, :m] = K
    sigma[m:, m:] = K
    sigma[:m, m:] = cross
    sigma[m:, :m] = cross.T

    factor = None
    jitter_used = 0.0
    for jit in _JITTER_LADDER:
        try:
            factor = np.linalg.cholesky(sigma + jit * np.eye(two_m))
            jitter_used = jit
            break
        except np.linalg.LinAlgError:
            continue
    if factor is None:
        diag = np.diag(sigma)
        raise NumericalError(
            "joint bridge covariance could not be factorized at maximum jitter "
            f"{_JITTER_LADDER[-1]:g} (diag range [{diag.min():.3g}, {diag.max():.3g}])"
        )
    target = sigma + jitter_used * np.eye(two_m)
    frob = float(np.linalg.norm(factor @ factor.T - target) / np.linalg.norm(target))
    if frob > _FROBENIUS_RTOL:
        raise NumericalError(f"factor reproduces the covariance to {frob:.3g} > "
                             f"{_FROBENIUS_RTOL:g} (Frobenius relative)")

    if m >= 2:
        step = u[1] - u[0]
        weights = np.full(m, step)
        weights[0] = weights[-1] = step / 2.0
    else:
        weights = np.array([1.0 - 2.0 * delta])

    var_diag = (np.diag(K) / h_x ** 2 + np.diag(K) / h_y ** 2
                - 2.0 * np.diag(cross) / (h_x * h_y))
    return BridgeGrid(
        u=u, delta=delta, factor=factor, jitter=jitter_used,
        h_x=h_x, h_y=h_y, weights=weights,
        var_bridge_diag=np.maximum(var_diag, 0.0),
        frobenius_rel_err=frob,
        pair_fingerprint=pair.fingerprint(),
    )


def iter_bridge_paths(grid: BridgeGrid, n_sim: int, seed: int, chunk: int = 512):
    """Yield (B^X, B^Y) blocks of shape (m, k).

    Column j of a block is driven by a generator derived from
    (seed, "draw", global draw index), so results do not depend on the
    chunking or on any parallel execution layout.
    """
    m = grid.m
    for start in range(0, n_sim, chunk):
        k = min(chunk, n_sim - start)
        z = np.empty((2 * m, k))
        for j in range(k):
            rng = derive_rng(seed, "draw", start + j)
            z[:, j] = rng.standard_normal(2 * m)
        paths = grid.factor @ z
        yield paths[:m, :], paths[m:, :]


def _driving_process(grid: BridgeGrid, bx: np.ndarray, by: np.ndarray) -> np.ndarray:
    if grid.degenerate:
        return np.zeros_like(bx)
    return bx / grid.h_x[:, None] - by / grid.h_y[:, None]


# ---------------------------------------------------------------------------
# truncated-tail bounds
# ---------------------------------------------------------------------------

def _log_sigma_bar(pair: PairSpec, side: str, ts: np.ndarray) -> np.ndarray:
    """log of sqrt(u(1-u)) (1/h_X + 1/h_Y) at tail depth t (a pointwise
    upper bound for the standard deviation of the driving process)."""
    ts = np.asarray(ts, dtype=float)
    log_u1mu = np.log1p(-np.exp(-ts)) - ts
    lf_x = np.asarray(pair.dist_x.log_density_at_depth(side, ts), dtype=float)
    lf_y = np.asarray(pair.dist_y.log_density_at_depth(side, ts), dtype=float)
    return 0.5 * log_u1mu + np.logaddexp(-lf_x, -lf_y)


def _one_sided_power_tail(pair: PairSpec, side: str, power: float, t0: float) -> float:
    """int_{tail} sigma_bar(u)^power du, extrapolated beyond the probe range."""

    def log_g(ts):
        ts = np.asarray(ts, dtype=float)
        return power * _log_sigma_bar(pair, side, ts) - ts

    assessment = assess_tail(log_g, t0)
    if assessment.verdict == CONVERGENT:
        return assessment.total
    return math.inf


def truncated_tail_bound_E(pair: PairSpec, cost: CostSpec, delta: float) -> float:
    """Bound on the mass of the equal-marginals limit functional outside
    [delta, 1-delta]: per branch, pi * E 1_{sign} |N|^b <= pi * m_b/2 * sigma^b.
    """
    t0 = -math.log(delta)
    bound = 0.0
    for pi, b in ((cost.pi_minus, cost.b_minus), (cost.pi_plus, cost.b_plus)):
        if pi == 0.0:
            continue
        coef = pi * abs_moment_normal(b) / 2.0
        for side in (LEFT, RIGHT):
            bound += coef * _one_sided_power_tail(pair, side, b, t0)
    return bound


def truncated_tail_bound_W2(pair: PairSpec, delta: float) -> float:
    t0 = -math.log(delta)
    return sum(_one_sided_power_tail(pair, side, 2.0, t0) for side in (LEFT, RIGHT))


def truncated_tail_bound_one_sample(dist: DistSpec, p: float, delta: float) -> float:
    pair = equal_pair(dist)   # sigma_bar then uses 2/h; compensate by 2^-p
    t0 = -math.log(delta)
    coef = abs_moment_normal(p) / 2.0 ** p
    return coef * sum(_one_sided_power_tail(pair, side, p, t0) for side in (LEFT, RIGHT))


def truncated_tail_bound_ED(pair: PairSpec, cost: CostSpec, delta: float) -> float:
    """Bound for the mixed limit: linear Gaussian term on D-labeled tails,
    equal-marginals terms (b = 1 branches) on E-labeled tails."""
    t0 = -math.log(delta)
    bound = 0.0
    m1 = abs_moment_normal(1.0)
    for side, label in ((LEFT, pair.partition.left_label),
                        (RIGHT, pair.partition.right_label)):
        if label == "D":

            def log_g(ts, side=side):
                ts = np.asarray(ts, dtype=float)
                u = np.exp(-ts) if side == LEFT else -np.expm1(-ts)
                u = np.clip(u, 1e-300, 1.0 - 1e-16)
                tau = pair.tau(u)
                w = np.abs(derivative(cost, np.where(tau == 0.0, 1e-300, tau)))
                with np.errstate(divide="ignore"):
                    return np.log(np.maximum(w, 1e-300)) \
                        + _log_sigma_bar(pair, side, ts) - ts + math.log(m1)

            assessment = assess_tail(log_g, t0, t_hi=min(t0 + 30.0, 36.0), n=60)
            bound += assessment.total if assessment.verdict == CONVERGENT else math.inf
        else:
            for coef, b in ((cost.L0_minus, cost.b_minus), (cost.L0_plus, cost.b_plus)):
                if coef is None or b != 1.0:
                    continue
                bound += coef * (m1 / 2.0) * _one_sided_power_tail(pair, side, 1.0, t0)
    return bound


def _enforce_tail(bound: float, values: np.ndarray, tail_frac: Optional[float],
                  delta: float) -> None:
    if tail_frac is None:
        return
    med = float(np.median(np.abs(values)))
    if not math.isfinite(bound) or bound > tail_frac * max(med, 1e-300):
        raise TruncationError(
            f"truncated-tail bound {bound:.3g} exceeds {tail_frac:.0%} of the median "
            f"draw {med:.3g}; shrink delta below {delta:g} or relax tail_frac"
        )


# ---------------------------------------------------------------------------
# limit draws
# ---------------------------------------------------------------------------

def _require(report, override: bool, what: str) -> None:
    if override:
        return
    if report.verdict != PASS:
        raise HypothesisError(
            f"{report.condition} checker did not pass ({report.verdict}) for {what}; "
            "fix the configuration or override the check explicitly"
        )


def _check_equal_marginals(pair: PairSpec, cost: CostSpec, require_checks: bool) -> None:
    if not pair.partition.is_all_E:
        raise ValidationError("equal-marginals limit requires a partition declaring "
                              "agreement on all of (0,1)")
    lo, hi = pair.dist_x.support
    bounded = math.isfinite(lo) and math.isfinite(hi)
    if bounded:
        b_prime = max(cost.b_minus, cost.b_plus) + 0.5
        _require(check_compact(pair.dist_x, cost, b_prime), not require_checks,
                 f"{pair.dist_x.name} with {cost.name}")
    else:
        if cost.b >= 2.0:
            raise ValidationError(
                "equal-marginals limit with b >= 2 on unbounded support is the "
                "quadratic regime; use draw_limit_W2"
            )
        _require(check_cfg_e(pair.dist_x, cost), not require_checks,
                 f"{pair.dist_x.name} with {cost.name}")


def draw_limit_E(pair: PairSpec, cost: CostSpec, grid: BridgeGrid, n_sim: int,
                 seed: int, tail_frac: Optional[float] = _DEFAULT_TAIL_FRAC,
                 require_checks: bool = True) -> LimitDraws:
    """Draws of the equal-marginals limit:
    pi_- int 1_{Bq<0} |Bq|^{b_-} + pi_+ int 1_{Bq>0} |Bq|^{b_+}.
    """
    _check_equal_marginals(pair, cost, require_checks)
    w = grid.weights
    out = np.empty(n_sim)
    pos_done = 0
    for bx, by in iter_bridge_paths(grid, n_sim, seed):
        bq = _driving_process(grid, bx, by)
        absq = np.abs(bq)
        neg_part = w @ (np.where(bq < 0, absq ** cost.b_minus, 0.0))
        pos_part = w @ (np.where(bq > 0, absq ** cost.b_plus, 0.0))
        k = bq.shape[1]
        out[pos_done:pos_done + k] = cost.pi_minus * neg_part + cost.pi_plus * pos_part
        pos_done += k
    bound = 0.0 if grid.degenerate else truncated_tail_bound_E(pair, cost, grid.delta)
    _enforce_tail(bound, out, tail_frac, grid.delta)
    return LimitDraws(out, THEOREM_EQUAL, grid.summary(), seed, bound)


def draw_limit_W2(pair: PairSpec, grid: BridgeGrid, n_sim: int, seed: int,
                  tail_frac: Optional[float] = _DEFAULT_TAIL_FRAC,
                  require_checks: bool = True) -> LimitDraws:
    """Draws of the quadratic-regime limit int Bq(u)^2 du."""
    if not pair.partition.is_all_E:
        raise ValidationError("the quadratic limit requires equal marginals")
    _require(check_w2_hypotheses(pair.dist_x), not require_checks, pair.dist_x.name)
    w = grid.weights
    out = np.empty(n_sim)
    done = 0
    for bx, by in iter_bridge_paths(grid, n_sim, seed):
        bq = _driving_process(grid, bx, by)
        k = bq.shape[1]
        out[done:done + k] = w @ (bq ** 2)
        done += k
    bound = 0.0 if grid.degenerate else truncated_tail_bound_W2(pair, grid.delta)
    _enforce_tail(bound, out, tail_frac, grid.delta)
    return LimitDraws(out, THEOREM_QUADRATIC, grid.summary(), seed, bound)


def draw_limit_ED(pair: PairSpec, cost: CostSpec, grid: BridgeGrid, n_sim: int,
                  seed: int, tail_frac: Optional[float] = _DEFAULT_TAIL_FRAC,
                  require_checks: bool = True) -> LimitDraws:
    """Draws of the mixed-partition sqrt(n) limit, one shared path per draw:

    int_D |rho'(tau)| Bq du
      + 1_{b_-=1} L_-(0) int_E 1_{Bq<0} |Bq| du
      + 1_{b_+=1} L_+(0) int_E 1_{Bq>0} |Bq| du  (the last two only when b = 1).

    For b > 1 the agreement region contributes nothing at this rate and
    only the Gaussian term remains.
    """
    b = cost.b
    if b < 1.0:
        raise ValidationError(f"mixed-partition limit requires b >= 1; got b = {b}")
    if b == 1.0:
        if (cost.b_minus == 1.0 and cost.L0_minus is None) or \
           (cost.b_plus == 1.0 and cost.L0_plus is None):
            raise ValidationError("b = 1 limit requires finite L_pm(0) ((Lpi))")
    _require(check_cfg_ed(pair, cost), not require_checks,
             f"{pair.fingerprint()} with {cost.name}")

    d_mask = pair.partition.mask(grid.u, "D")
    e_mask = pair.partition.mask(grid.u, "E")
    w = grid.weights
    w_d = np.zeros_like(w)
    if d_mask.any():
        tau_d = pair.tau(grid.u[d_mask])
        w_d[d_mask] = w[d_mask] * np.abs(derivative(cost, tau_d))
    w_e = w * e_mask

    out = np.empty(n_sim)
    done = 0
    for bx, by in iter_bridge_paths(grid, n_sim, seed):
        bq = _driving_process(grid, bx, by)
        k = bq.shape[1]
        vals = w_d @ bq
        if b == 1.0 and e_mask.any():
            absq = np.abs(bq)
            if cost.b_minus == 1.0:
                vals = vals + cost.L0_minus * (w_e @ np.where(bq < 0, absq, 0.0))
            if cost.b_plus == 1.0:
                vals = vals + cost.L0_plus * (w_e @ np.where(bq > 0, absq, 0.0))
        out[done:done + k] = vals
        done += k
    bound = 0.0 if grid.degenerate else truncated_tail_bound_ED(pair, cost, grid.delta)
    _enforce_tail(bound, out, tail_frac, grid.delta)
    return LimitDraws(out, THEOREM_MIXED, grid.summary(), seed, bound)


def draw_limit_one_sample(dist: DistSpec, p: float, grid: BridgeGrid, n_sim: int,
                          seed: int, tail_frac: Optional[float] = _DEFAULT_TAIL_FRAC,
                          require_checks: bool = True) -> LimitDraws:
    """Draws of the one-sample limit int |B^X(u)/h(u)|^p du for 1 <= p < 2.

    Uses the X-marginal block of the supplied grid (any coupling); the
    marginal of the joint draws is a standard bridge.
    """
    if not 1.0 <= p < 2.0:
        raise ValidationError(f"one-sample limit requires 1 <= p < 2; got {p}")
    pareto_index = 2.0 * (p + 2.0) / (2.0 - p)
    _require(check_pareto_dominance(dist, pareto_index), not require_checks, dist.name)
    h = np.asarray(dist.density_quantile(grid.u), dtype=float)
    w = grid.weights
    out = np.empty(n_sim)
    done = 0
    for bx, _ in iter_bridge_paths(grid, n_sim, seed):
        scaled = np.abs(bx / h[:, None]) ** p
        k = bx.shape[1]
        out[done:done + k] = w @ scaled
        done += k
    bound = truncated_tail_bound_one_sample(dist, p, grid.delta)
    _enforce_tail(bound, out, tail_frac, grid.delta)
    return LimitDraws(out, THEOREM_ONE_SAMPLE, grid.summary(), seed, bound)


# ---------------------------------------------------------------------------
# grid oracles (deterministic expectations of the simulated functionals)
# ---------------------------------------------------------------------------

def bridge_cov_kernel(pair: PairSpec, us: np.ndarray, vs: Optional[np.ndarray] = None
                      ) -> np.ndarray:
    """Cov(Bq(u), Bq(v)) assembled from the four covariance blocks."""
    us = np.asarray(us, dtype=float)
    vs = us if vs is None else np.asarray(vs, dtype=float)
    hx_u = np.asarray(pair.dist_x.density_quantile(us), dtype=float)
    hy_u = np.asarray(pair.dist_y.density_quantile(us), dtype=float)
    hx_v = np.asarray(pair.dist_x.density_quantile(vs), dtype=float)
    hy_v = np.asarray(pair.dist_y.density_quantile(vs), dtype=float)
    K = np.minimum.outer(us, vs) - np.outer(us, vs)
    if pair.coupling.kind == "independent":
        cross_uv = np.zeros_like(K)
        cross_vu = np.zeros_like(K)
    elif pair.coupling.kind == "comonotone":
        cross_uv = K
        cross_vu = K
    else:
        cross_uv = np.asarray(pair.coupling.copula(us[:, None], vs[None, :]), dtype=float) \
            - np.outer(us, vs)
        cross_vu = np.asarray(pair.coupling.copula(vs[:, None], us[None, :]), dtype=float).T \
            - np.outer(us, vs)
    return (K / np.outer(hx_u, hx_v) + K / np.outer(hy_u, hy_v)
            - cross_uv / np.outer(hx_u, hy_v) - cross_vu / np.outer(hy_u, hx_v))


def grid_mean_oracle_E(pair: PairSpec, cost: CostSpec, grid: BridgeGrid) -> float:
    """E of the equal-marginals functional on the grid: per branch,
    pi * m_b/2 * sigma(u)^b under the exact pointwise variance."""
    sd = np.sqrt(grid.var_bridge_diag)
    total = 0.0
    for pi, b in ((cost.pi_minus, cost.b_minus), (cost.pi_plus, cost.b_plus)):
        if pi:
            total += pi * abs_moment_normal(b) / 2.0 * float(grid.weights @ sd ** b)
    return total


def grid_mean_oracle_W2(pair: PairSpec, grid: BridgeGrid) -> float:
    return float(grid.weights @ grid.var_bridge_diag)


# ---------------------------------------------------------------------------
# sigma^2 of the sqrt(n) CLT: quadrature cross-validated by simulation
# ---------------------------------------------------------------------------

_GL120 = roots_legendre(120)


def _composite_gl_nodes(delta: float):
    edges = np.array([delta, 1e-4, 1e-3, 1e-2, 0.1, 0.5,
                      0.9, 0.99, 0.999, 0.9999, 1.0 - delta])
    edges = np.unique(np.clip(edges, delta, 1.0 - delta))
    nodes, weights = [], []
    x, w = _GL120
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        nodes.append(0.5 * (b - a) * (x + 1.0) + a)
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _weight_fn(pair: PairSpec, cost: CostSpec, us: np.ndarray) -> np.ndarray:
    """|rho'(tau(u))| on D-labeled points, 0 elsewhere."""
    w = np.zeros_like(us)
    d_mask = pair.partition.mask(us, "D")
    if d_mask.any():
        w[d_mask] = np.abs(derivative(cost, pair.tau(us[d_mask])))
    return w


def sigma2_D(pair: PairSpec, cost: CostSpec, delta: float = 1e-6,
             mc_m: int = 1023, mc_n: int = 40000, seed: int = 202406,
             rel_agreement: float = 0.02) -> float:
    """Variance of int_D |rho'(tau)| Bq du.

    Deterministic route: composite Gauss-Legendre double quadrature of the
    weighted covariance kernel. Stochastic route: empirical variance of the
    simulated linear functional on an independent equispaced grid. The two
    must agree to ``rel_agreement`` (relative), else a numerical error
    reports both values.
    """
    if not pair.partition.has_D:
        raise ValidationError("sigma2_D requires a partition with a D-labeled interval")
    us, ws = _composite_gl_nodes(delta)
    wv = _weight_fn(pair, cost, us) * ws
    kernel = bridge_cov_kernel(pair, us)
    quad_val = float(wv @ kernel @ wv)

    grid = build_bridge_grid(pair, m=mc_m, delta=1e-4)
    q = _weight_fn(pair, cost, grid.u) * grid.weights
    samples = np.empty(mc_n)
    done = 0
    for bx, by in iter_bridge_paths(grid, mc_n, seed, chunk=2048):
        bq = _driving_process(grid, bx, by)
        k = bq.shape[1]
        samples[done:done + k] = q @ bq
        done += k
    mc_val = float(np.var(samples))

    scale = max(abs(quad_val), abs(mc_val))
    if scale < 1e-12:
        return max(quad_val, 0.0)      # degenerate coupling: both routes at zero
    if abs(quad_val - mc_val) / scale > rel_agreement:
        raise NumericalError(
            f"sigma^2 routes disagree beyond {rel_agreement:.0%}: quadrature "
            f"{quad_val:.6g} vs simulation {mc_val:.6g}"
        )
    return quad_val
