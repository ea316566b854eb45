"""Distributions, couplings, and paired-sample models.

``DistSpec`` packages everything the limit theory consumes: c.d.f.,
quantile, density, density-quantile ``h = f o F^{-1}``, tail exponents
``psi_pm(x) = -log P(X > x) / -log P(X < -x)``, and a seeded sampler.

Deep-tail quantities are exposed through a *tail-depth* API parametrized
by ``t = -log(tail mass)``: positions, log-magnitudes and log-densities at
depth ``t`` stay evaluable far beyond where ``u = 1 - exp(-t)`` saturates
in floating point. Built-in families override the generic root-finding
fallbacks with closed forms where they exist.

``PairSpec`` couples two marginals through a copula and carries the
user-declared partition of (0,1) into intervals where the quantile
functions agree (label ``E``) or differ (label ``D``); the partition is
verified numerically at construction, never inferred.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import stats
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .errors import DomainError, ValidationError
from .seeding import derive_rng

__all__ = [
    "DistSpec",
    "CouplingSpec",
    "Partition",
    "PairSpec",
    "builtin_dist",
    "gaussian",
    "exponential",
    "pareto",
    "weibull",
    "beta_dist",
    "uniform",
    "log_edge_dist",
    "warped_dist",
    "independent",
    "comonotone",
    "gaussian_coupling",
    "custom_coupling",
    "equal_pair",
    "make_pair",
    "bump_warp",
    "sample_pairs",
    "quantile_difference",
    "bvn_cdf",
]

RIGHT = "+"
LEFT = "-"


# ---------------------------------------------------------------------------
# marginal distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistSpec:
    """Immutable one-dimensional distribution. All callables are vectorized."""

    name: str
    cdf: Callable
    quantile: Callable
    density: Callable
    density_quantile: Callable          # h(u) = f(F^{-1}(u))
    log_density: Callable
    log_cdf: Callable
    log_sf: Callable
    support: tuple[float, float]
    params: dict = field(default_factory=dict)
    # optional closed-form tail hooks, keyed by side "+" / "-"
    tail_quantile_fn: dict = field(default_factory=dict)      # t -> position
    log_tail_magnitude_fn: dict = field(default_factory=dict)  # t -> log |position|
    log_density_at_depth_fn: dict = field(default_factory=dict)
    smooth_declared: bool = True        # C2 smoothness, verified only for built-ins

    # -- sampling ------------------------------------------------------
    def sample(self, n: int, rng) -> np.ndarray:
        """n i.i.d. draws by inverse transform (rng: Generator or seed)."""
        if not isinstance(rng, np.random.Generator):
            rng = derive_rng(int(rng), "marginal", self.name)
        return np.asarray(self.quantile(rng.random(int(n))), dtype=float)

    # -- tail exponents -------------------------------------------------
    def psi_plus(self, x) -> np.ndarray:
        """-log P(X > x) on the right tail."""
        return -np.asarray(self.log_sf(np.asarray(x, dtype=float)), dtype=float)

    def psi_minus(self, x) -> np.ndarray:
        """-log P(X < -x) on the left tail."""
        return -np.asarray(self.log_cdf(-np.asarray(x, dtype=float)), dtype=float)

    def tail_applicable(self, side: str) -> bool:
        """Whether the psi_side conditions are non-vacuous.

        The left-tail exponent compares against positions ``-x < 0``; with
        support bounded below by 0 the probability is identically zero and
        every left-tail condition holds trivially.
        """
        return self.support[0] < 0 if side == LEFT else self.support[1] > 0

    # -- tail-depth API ---------------------------------------------------
    def tail_quantile(self, side: str, t) -> np.ndarray:
        """Position at tail depth t: right side solves -log sf(x) = t,
        left side solves -log cdf(x) = t."""
        t = np.asarray(t, dtype=float)
        fn = self.tail_quantile_fn.get(side)
        if fn is not None:
            return np.asarray(fn(t), dtype=float)
        return _invert_log_tail(self, side, t)

    def log_tail_magnitude(self, side: str, t) -> np.ndarray:
        """log of psi_side^{-1}(t) (log |position| along the tail direction)."""
        t = np.asarray(t, dtype=float)
        fn = self.log_tail_magnitude_fn.get(side)
        if fn is not None:
            return np.asarray(fn(t), dtype=float)
        x = self.tail_quantile(side, t)
        mag = x if side == RIGHT else -x
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.maximum(mag, 1e-300))

    def log_density_at_depth(self, side: str, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        fn = self.log_density_at_depth_fn.get(side)
        if fn is not None:
            return np.asarray(fn(t), dtype=float)
        return np.asarray(self.log_density(self.tail_quantile(side, t)), dtype=float)

    def psi_inverse(self, side: str, y) -> np.ndarray:
        """psi_side^{-1}(y) as a magnitude (>= 0 for y large)."""
        x = self.tail_quantile(side, y)
        return x if side == RIGHT else -x

    def psi_of_log_position(self, side: str, xi) -> np.ndarray:
        """psi_side(exp(xi)); +inf where the position exceeds the support."""
        xi = np.asarray(xi, dtype=float)
        with np.errstate(over="ignore"):
            x = np.exp(np.minimum(xi, 709.0))
        x = np.where(xi > 709.0, np.inf, x)
        if side == RIGHT:
            with np.errstate(invalid="ignore"):
                out = -np.asarray(self.log_sf(x), dtype=float)
        else:
            with np.errstate(invalid="ignore"):
                out = -np.asarray(self.log_cdf(-x), dtype=float)
        return np.where(np.isnan(out), np.inf, out)


def _invert_log_tail(dist: DistSpec, side: str, ts: np.ndarray) -> np.ndarray:
    """Positions at tail depths ``ts`` by vectorized bisection on the log
    tail mass (log sf on the right, log cdf on the left).

    Depths unreachable in float saturate at the support edge.
    """
    ts = np.asarray(ts, dtype=float)
    shape = ts.shape
    t = np.atleast_1d(ts).ravel()
    target = -t
    lo_s, hi_s = dist.support
    sign = 1.0 if side == RIGHT else -1.0

    def mass(x):
        raw = dist.log_sf(x) if side == RIGHT else dist.log_cdf(x)
        return np.maximum(np.asarray(raw, dtype=float), -1e18)

    # inner endpoint: walk toward the center until the mass exceeds every target
    inner = np.full_like(t, float(dist.quantile(0.5)))
    step = 1.0
    for _ in range(200):
        bad = mass(inner) < target
        if not bad.any():
            break
        inner = np.where(bad, inner - sign * step, inner)
        step *= 2.0
    # outer endpoint: walk into the tail until the mass drops below the target
    edge = hi_s if side == RIGHT else lo_s
    cap = float(np.nextafter(edge, -sign * np.inf)) if np.isfinite(edge) else sign * np.inf
    outer = inner + sign
    step = 1.0
    saturated = np.zeros(t.shape, dtype=bool)
    for _ in range(400):
        if np.isfinite(cap):
            hit = (outer - cap) * sign >= 0
            outer = np.where(hit, cap, outer)
        done = mass(outer) <= target
        if np.isfinite(cap):
            saturated = (outer == cap) & ~done
            done = done | saturated
        if done.all():
            break
        outer = np.where(done, outer, outer + sign * step)
        step *= 1.7
    else:
        raise DomainError(f"{dist.name}: could not bracket tail depths on side {side}")

    lo = np.minimum(inner, outer)
    hi = np.maximum(inner, outer)
    for _ in range(110):
        mid = 0.5 * (lo + hi)
        high_mass = mass(mid) >= target     # still inside: move toward the tail
        if side == RIGHT:
            lo = np.where(high_mass, mid, lo)
            hi = np.where(high_mass, hi, mid)
        else:
            hi = np.where(high_mass, mid, hi)
            lo = np.where(high_mass, lo, mid)
    out = 0.5 * (lo + hi)
    if np.isfinite(cap):
        out = np.where(saturated, edge, out)
    return out.reshape(shape)


def _roundtrip_guard(frozen, lo, hi):
    # probe parameters early so bad families fail at construction
    us = np.array([1e-6, 0.1, 0.5, 0.9, 1 - 1e-6])
    xs = frozen.ppf(us)
    if not np.all(np.isfinite(xs)):
        raise ValidationError("distribution parameters give non-finite quantiles")


def dist_from_scipy(name: str, frozen, *, density_quantile=None, params=None,
                    tail_quantile_fn=None, log_tail_magnitude_fn=None,
                    log_density_at_depth_fn=None) -> DistSpec:
    lo, hi = frozen.support()
    _roundtrip_guard(frozen, lo, hi)
    if density_quantile is None:
        def density_quantile(u, _f=frozen):
            return _f.pdf(_f.ppf(np.asarray(u, dtype=float)))
    return DistSpec(
        name=name,
        cdf=frozen.cdf,
        quantile=frozen.ppf,
        density=frozen.pdf,
        density_quantile=density_quantile,
        log_density=frozen.logpdf,
        log_cdf=frozen.logcdf,
        log_sf=frozen.logsf,
        support=(float(lo), float(hi)),
        params=params or {},
        tail_quantile_fn=tail_quantile_fn or {},
        log_tail_magnitude_fn=log_tail_magnitude_fn or {},
        log_density_at_depth_fn=log_density_at_depth_fn or {},
    )


def gaussian(loc: float = 0.0, scale: float = 1.0) -> DistSpec:
    if scale <= 0:
        raise ValidationError(f"gaussian requires scale > 0; got {scale}")
    frozen = stats.norm(loc, scale)
    return dist_from_scipy(
        f"gaussian({loc:g},{scale:g})", frozen,
        params={"family": "gaussian", "loc": loc, "scale": scale},
    )


def exponential(scale: float = 1.0) -> DistSpec:
    if scale <= 0:
        raise ValidationError(f"exponential requires scale > 0; got {scale}")
    frozen = stats.expon(scale=scale)
    return dist_from_scipy(
        f"exponential({scale:g})", frozen,
        params={"family": "exponential", "scale": scale},
        tail_quantile_fn={RIGHT: lambda t: scale * np.asarray(t, dtype=float)},
    )


def pareto(index: float, scale: float = 1.0) -> DistSpec:
    """Pareto with survival (x/scale)^(-index) on [scale, inf); psi(x) ~ index*log x."""
    if index <= 0 or scale <= 0:
        raise ValidationError(f"pareto requires index > 0 and scale > 0; got ({index}, {scale})")
    frozen = stats.pareto(b=index, scale=scale)
    log_scale = math.log(scale)

    def tail_q(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return scale * np.exp(t / index)

    def log_mag(t):
        return log_scale + np.asarray(t, dtype=float) / index

    def log_f(t):
        # log f(x(t)) with f(x) = index * scale^index * x^(-index-1)
        t = np.asarray(t, dtype=float)
        return math.log(index / scale) - (index + 1.0) * t / index

    return dist_from_scipy(
        f"pareto({index:g})", frozen,
        params={"family": "pareto", "index": index, "scale": scale},
        tail_quantile_fn={RIGHT: tail_q},
        log_tail_magnitude_fn={RIGHT: log_mag},
        log_density_at_depth_fn={RIGHT: log_f},
    )


def weibull(shape: float, scale: float = 1.0) -> DistSpec:
    """Weibull with psi(x) = (x/scale)^shape; light tails for shape >= 1."""
    if shape <= 0 or scale <= 0:
        raise ValidationError(f"weibull requires shape > 0 and scale > 0; got ({shape}, {scale})")
    frozen = stats.weibull_min(c=shape, scale=scale)
    w = float(shape)

    def density_quantile(u):
        # closed form h(u) = (w/scale) (1-u) log(1/(1-u))^(1-1/w)
        u = np.asarray(u, dtype=float)
        ell = -np.log1p(-u)
        return (w / scale) * (1.0 - u) * ell ** (1.0 - 1.0 / w)

    def tail_q(t):
        return scale * np.asarray(t, dtype=float) ** (1.0 / w)

    def log_f(t):
        # f(x(t)) = (w/scale) t^((w-1)/w) e^{-t}
        t = np.asarray(t, dtype=float)
        return math.log(w / scale) + (1.0 - 1.0 / w) * np.log(t) - t

    return dist_from_scipy(
        f"weibull({shape:g})", frozen,
        density_quantile=density_quantile,
        params={"family": "weibull", "shape": shape, "scale": scale},
        tail_quantile_fn={RIGHT: tail_q},
        log_density_at_depth_fn={RIGHT: log_f},
    )


def beta_dist(a: float, b: float) -> DistSpec:
    if a <= 0 or b <= 0:
        raise ValidationError(f"beta requires a, b > 0; got ({a}, {b})")
    frozen = stats.beta(a, b)
    return dist_from_scipy(
        f"beta({a:g},{b:g})", frozen,
        params={"family": "beta", "a": a, "b": b},
    )


def uniform(lo: float = 0.0, hi: float = 1.0) -> DistSpec:
    if not hi > lo:
        raise ValidationError(f"uniform requires hi > lo; got ({lo}, {hi})")
    frozen = stats.uniform(loc=lo, scale=hi - lo)
    return dist_from_scipy(
        f"uniform({lo:g},{hi:g})", frozen,
        params={"family": "uniform", "lo": lo, "hi": hi},
    )


def log_edge_dist(w: float) -> DistSpec:
    """Compact-support stress family on (0,1): F(x) = exp(-(log(1/x))^w), w > 1.

    Near 0 the density-quantile decays so slowly that edge-integrability of
    bridge functionals holds only up to a finite power; used to exercise the
    compact-support checker.
    """
    if w <= 1.0:
        raise ValidationError(f"log_edge_dist requires w > 1; got {w}")
    w = float(w)

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), 1e-300, 1.0)
        return np.exp(-((-np.log(x)) ** w))

    def log_cdf(x):
        x = np.clip(np.asarray(x, dtype=float), 1e-300, 1.0)
        return -((-np.log(x)) ** w)

    def quantile(u):
        u = np.asarray(u, dtype=float)
        return np.exp(-((-np.log(u)) ** (1.0 / w)))

    def density(x):
        x = np.clip(np.asarray(x, dtype=float), 1e-300, 1.0 - 1e-16)
        s = -np.log(x)
        return np.exp(-(s ** w)) * w * s ** (w - 1.0) / x

    def log_density(x):
        x = np.clip(np.asarray(x, dtype=float), 1e-300, 1.0 - 1e-16)
        s = -np.log(x)
        return -(s ** w) + math.log(w) + (w - 1.0) * np.log(s) - np.log(x)

    def density_quantile(u):
        # h(u) = u w s^{w-1} e^{s}, s = (log(1/u))^{1/w}
        u = np.asarray(u, dtype=float)
        t = -np.log(u)
        s = t ** (1.0 / w)
        return np.exp(np.log(u) + math.log(w) + (1.0 - 1.0 / w) * np.log(t) + s)

    def log_sf(x):
        with np.errstate(divide="ignore"):
            return np.log1p(-cdf(x))

    def left_tail_quantile(t):
        return np.exp(-(np.asarray(t, dtype=float) ** (1.0 / w)))

    def left_log_density_at_depth(t):
        t = np.asarray(t, dtype=float)
        s = t ** (1.0 / w)
        return -t + math.log(w) + (1.0 - 1.0 / w) * np.log(t) + s

    return DistSpec(
        name=f"log_edge({w:g})",
        cdf=cdf,
        quantile=quantile,
        density=density,
        density_quantile=density_quantile,
        log_density=log_density,
        log_cdf=log_cdf,
        log_sf=log_sf,
        support=(0.0, 1.0),
        params={"family": "log_edge", "w": w},
        tail_quantile_fn={LEFT: left_tail_quantile},
        log_density_at_depth_fn={LEFT: left_log_density_at_depth},
    )


def warped_dist(base: DistSpec, warp: Callable, dwarp: Callable,
                region: tuple[float, float], name: Optional[str] = None) -> DistSpec:
    """Distribution whose quantile is ``base.quantile(u) + warp(u)``.

    ``warp`` must vanish (with its derivative) outside ``region`` strictly
    inside (0,1), so all tail behaviour is inherited from ``base``;
    monotonicity requires ``1/h_base(u) + dwarp(u) > 0``.
    """
    lo_r, hi_r = region
    if not 0.0 < lo_r < hi_r < 1.0:
        raise ValidationError("warp region must be strictly inside (0,1)")

    def quantile(u):
        u = np.asarray(u, dtype=float)
        return base.quantile(u) + warp(u)

    def density_quantile(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            slope = 1.0 / base.density_quantile(u) + dwarp(u)
            return 1.0 / slope

    us = np.linspace(lo_r, hi_r, 2049)
    if np.any(1.0 / base.density_quantile(us) + dwarp(us) <= 0):
        raise ValidationError("warp destroys monotonicity of the quantile function")
    x_lo = float(base.quantile(lo_r))
    x_hi = float(base.quantile(hi_r))

    warp_top = x_hi + float(np.max(warp(us)))

    def cdf(x):
        arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(arr).ravel()
        out = np.asarray(base.cdf(flat), dtype=float).copy()
        inside = (flat > x_lo) & (flat < warp_top)
        for i in np.nonzero(inside)[0]:
            xi = float(flat[i])
            out[i] = brentq(lambda v: float(quantile(np.asarray(v))) - xi,
                            1e-15, 1 - 1e-15, xtol=1e-15, rtol=8.9e-16)
        out = out.reshape(np.atleast_1d(arr).shape)
        return float(out[0]) if arr.ndim == 0 else out

    def density(x):
        u = np.asarray(cdf(x), dtype=float)
        return density_quantile(u)

    def log_density(x):
        with np.errstate(divide="ignore"):
            return np.log(density(x))

    def log_cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= x_lo, base.log_cdf(x), np.log(np.maximum(cdf(x), 1e-300)))

    def log_sf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x >= warp_top, base.log_sf(x),
                            np.log1p(-np.minimum(cdf(x), 1.0)))

    return DistSpec(
        name=name or f"warped[{base.name}]",
        cdf=cdf,
        quantile=quantile,
        density=density,
        density_quantile=density_quantile,
        log_density=log_density,
        log_cdf=log_cdf,
        log_sf=log_sf,
        support=base.support,
        params={"family": "warped", "base": base.params, "region": [lo_r, hi_r]},
        tail_quantile_fn=base.tail_quantile_fn,
        log_tail_magnitude_fn=base.log_tail_magnitude_fn,
        log_density_at_depth_fn=base.log_density_at_depth_fn,
    )


_DIST_FAMILIES = {
    "gaussian": lambda p: gaussian(p.get("loc", 0.0), p.get("scale", 1.0)),
    "normal": lambda p: gaussian(p.get("loc", 0.0), p.get("scale", 1.0)),
    "exponential": lambda p: exponential(p.get("scale", 1.0)),
    "pareto": lambda p: pareto(p["index"], p.get("scale", 1.0)),
    "weibull": lambda p: weibull(p["shape"], p.get("scale", 1.0)),
    "beta": lambda p: beta_dist(p["a"], p["b"]),
    "uniform": lambda p: uniform(p.get("lo", 0.0), p.get("hi", 1.0)),
    "log_edge": lambda p: log_edge_dist(p["w"]),
}


def builtin_dist(family: str, **params) -> DistSpec:
    try:
        factory = _DIST_FAMILIES[family]
    except KeyError:
        raise ValidationError(
            f"unknown distribution family {family!r}; available: {sorted(_DIST_FAMILIES)}"
        ) from None
    return factory(params)


# ---------------------------------------------------------------------------
# couplings
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = roots_legendre(64)


def bvn_cdf(a, b, rho: float) -> np.ndarray:
    """Standard bivariate normal c.d.f. P(Z1 <= a, Z2 <= b) with correlation rho.

    One-dimensional quadrature of the correlation-derivative identity;
    accurate to ~1e-12 for |rho| <= 0.95 (couplings restrict |rho| < 1).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    base = stats.norm.cdf(a) * stats.norm.cdf(b)
    if rho == 0.0:
        return base
    r = 0.5 * rho * (_GL_NODES + 1.0)           # nodes on [0, rho]
    w = 0.5 * rho * _GL_WEIGHTS
    aa = a[..., None]
    bb = b[..., None]
    one_m_r2 = 1.0 - r ** 2
    expo = -(aa ** 2 - 2.0 * r * aa * bb + bb ** 2) / (2.0 * one_m_r2)
    integrand = np.exp(expo) / np.sqrt(one_m_r2)
    return base + (integrand * w).sum(axis=-1) / (2.0 * math.pi)


@dataclass(frozen=True)
class CouplingSpec:
    """Joint law of the pair as a copula over the two marginal uniforms."""

    kind: str                       # independent | comonotone | gaussian | custom
    rho: Optional[float] = None
    copula_fn: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in {"independent", "comonotone", "gaussian", "custom"}:
            raise ValidationError(f"unknown coupling kind {self.kind!r}")
        if self.kind == "gaussian":
            if self.rho is None or not -1.0 < self.rho < 1.0:
                raise ValidationError("gaussian coupling requires rho in (-1, 1)")
        if self.kind == "custom":
            if self.copula_fn is None:
                raise ValidationError("custom coupling requires a copula callable")
            _validate_copula(self.copula_fn)

    def copula(self, u, v) -> np.ndarray:
        """C(u, v), broadcasting over array arguments."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind == "independent":
            return u * v
        if self.kind == "comonotone":
            return np.minimum(u, v)
        if self.kind == "gaussian":
            return bvn_cdf(stats.norm.ppf(u), stats.norm.ppf(v), self.rho)
        return np.asarray(self.copula_fn(u, v), dtype=float)

    def sample_uv(self, n: int, rng: np.random.Generator):
        if self.kind == "independent":
            u = rng.random(n)
            v = rng.random(n)
            return u, v
        if self.kind == "comonotone":
            u = rng.random(n)
            return u, u
        if self.kind == "gaussian":
            z1 = rng.standard_normal(n)
            z2 = self.rho * z1 + math.sqrt(1.0 - self.rho ** 2) * rng.standard_normal(n)
            return stats.norm.cdf(z1), stats.norm.cdf(z2)
        return _sample_custom_copula(self.copula_fn, n, rng)


def _validate_copula(copula_fn, grid_n: int = 64) -> None:
    """Margins and the 2-increasing property on a probe grid."""
    g = np.linspace(0.0, 1.0, grid_n + 1)
    C = np.asarray(copula_fn(g[:, None], g[None, :]), dtype=float)
    if np.max(np.abs(C[:, 0])) > 1e-9 or np.max(np.abs(C[0, :])) > 1e-9:
        raise ValidationError("custom copula violates C(u,0) = C(0,v) = 0")
    if np.max(np.abs(C[:, -1] - g)) > 1e-9 or np.max(np.abs(C[-1, :] - g)) > 1e-9:
        raise ValidationError("custom copula violates uniform margins C(u,1) = u")
    rect = C[1:, 1:] - C[:-1, 1:] - C[1:, :-1] + C[:-1, :-1]
    if rect.min() < -1e-12:
        raise ValidationError("custom copula is not 2-increasing on the probe grid")


def _sample_custom_copula(copula_fn, n: int, rng: np.random.Generator):
    """Conditional inversion: V solves dC/du(u, v) = w by vectorized bisection."""
    u = rng.random(n)
    w = rng.random(n)
    h = 1e-6

    def cond(u_, v_):
        return (np.asarray(copula_fn(np.minimum(u_ + h, 1.0), v_))
                - np.asarray(copula_fn(np.maximum(u_ - h, 0.0), v_))) / (2 * h)

    lo = np.zeros(n)
    hi = np.ones(n)
    for _ in range(52):
        mid = 0.5 * (lo + hi)
        below = cond(u, mid) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return u, 0.5 * (lo + hi)


def independent() -> CouplingSpec:
    return CouplingSpec("independent")


def comonotone() -> CouplingSpec:
    return CouplingSpec("comonotone")


def gaussian_coupling(rho: float) -> CouplingSpec:
    return CouplingSpec("gaussian", rho=float(rho))


def custom_coupling(copula_fn: Callable) -> CouplingSpec:
    return CouplingSpec("custom", copula_fn=copula_fn)


# ---------------------------------------------------------------------------
# partition and pair
# ---------------------------------------------------------------------------

E_LABEL = "E"
D_LABEL = "D"


@dataclass(frozen=True)
class Partition:
    """Breakpoints 0 = u_0 < ... < u_k = 1 with interval labels E or D."""

    breaks: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        b = self.breaks
        if len(b) < 2 or b[0] != 0.0 or b[-1] != 1.0 or np.any(np.diff(b) <= 0):
            raise ValidationError("partition breakpoints must satisfy 0 = u_0 < ... < u_k = 1")
        if len(self.labels) != len(b) - 1:
            raise ValidationError("partition needs one label per interval")
        if any(lab not in (E_LABEL, D_LABEL) for lab in self.labels):
            raise ValidationError("partition labels must be 'E' or 'D'")

    @staticmethod
    def all_E() -> "Partition":
        return Partition((0.0, 1.0), (E_LABEL,))

    @staticmethod
    def all_D() -> "Partition":
        return Partition((0.0, 1.0), (D_LABEL,))

    @property
    def is_all_E(self) -> bool:
        return all(lab == E_LABEL for lab in self.labels)

    @property
    def is_all_D(self) -> bool:
        return all(lab == D_LABEL for lab in self.labels)

    @property
    def has_D(self) -> bool:
        return D_LABEL in self.labels

    @property
    def has_E(self) -> bool:
        return E_LABEL in self.labels

    @property
    def left_label(self) -> str:
        return self.labels[0]

    @property
    def right_label(self) -> str:
        return self.labels[-1]

    def intervals(self, label: Optional[str] = None):
        out = []
        for k, lab in enumerate(self.labels):
            if label is None or lab == label:
                out.append((self.breaks[k], self.breaks[k + 1], lab))
        return out

    def mask(self, grid: np.ndarray, label: str) -> np.ndarray:
        """Membership of grid points, classified strictly by declared intervals."""
        grid = np.asarray(grid, dtype=float)
        out = np.zeros(grid.shape, dtype=bool)
        for lo, hi, _ in self.intervals(label):
            out |= (grid >= lo) & (grid < hi)
        if label == self.labels[-1]:
            out |= grid == 1.0
        return out


_E_ABS_TOL = 1e-10
_BREAK_ABS_TOL = 1e-8
_EDGE_INSET = 1e-9


@dataclass(frozen=True)
class PairSpec:
    """Two marginals, a coupling, and the declared agree/differ partition."""

    dist_x: DistSpec
    dist_y: DistSpec
    coupling: CouplingSpec
    partition: Partition

    def __post_init__(self):
        _validate_partition(self)

    def tau(self, u) -> np.ndarray:
        """Quantile difference F^{-1}(u) - G^{-1}(u)."""
        u = np.asarray(u, dtype=float)
        return np.asarray(self.dist_x.quantile(u), dtype=float) - np.asarray(
            self.dist_y.quantile(u), dtype=float)

    @property
    def same_marginals(self) -> bool:
        return self.dist_x is self.dist_y

    def fingerprint(self) -> str:
        cop = self.coupling.kind + (f"[{self.coupling.rho}]" if self.coupling.rho else "")
        part = ",".join(f"{b:.6g}" for b in self.partition.breaks) + "/" + "".join(self.partition.labels)
        return f"{self.dist_x.name}|{self.dist_y.name}|{cop}|{part}"


def _validate_partition(pair: PairSpec) -> None:
    part = pair.partition
    # interior breakpoints: quantiles must agree
    for u in part.breaks[1:-1]:
        gap = abs(float(pair.tau(u)))
        if gap > _BREAK_ABS_TOL:
            raise ValidationError(
                f"partition breakpoint u = {u}: |F^-1 - G^-1| = {gap:.3g} "
                f"exceeds {_BREAK_ABS_TOL:g} ((FG0))"
            )
    for lo, hi, lab in part.intervals():
        a = max(lo, _EDGE_INSET)
        b = min(hi, 1.0 - _EDGE_INSET)
        if lab == E_LABEL:
            us = np.linspace(a, b, 1000)
            worst = float(np.max(np.abs(pair.tau(us))))
            if worst > _E_ABS_TOL:
                raise ValidationError(
                    f"interval ({lo:g},{hi:g}) labeled E but |F^-1 - G^-1| reaches "
                    f"{worst:.3g} ((FG0))"
                )
        else:
            width = hi - lo
            us = np.linspace(lo + 1e-3 * width, hi - 1e-3 * width, 512)
            us = us[(us > _EDGE_INSET) & (us < 1 - _EDGE_INSET)]
            vals = np.abs(pair.tau(us))
            if np.any(vals == 0.0):
                at = us[np.argmin(vals)]
                raise ValidationError(
                    f"interval ({lo:g},{hi:g}) labeled D but the quantile difference "
                    f"vanishes at u = {at:.6g} ((FG0))"
                )


def equal_pair(dist: DistSpec, coupling: Optional[CouplingSpec] = None) -> PairSpec:
    """F = G pair (the whole of (0,1) is labeled E)."""
    return PairSpec(dist, dist, coupling or independent(), Partition.all_E())


def make_pair(dist_x: DistSpec, dist_y: DistSpec,
              coupling: Optional[CouplingSpec] = None,
              partition: Optional[Partition] = None) -> PairSpec:
    return PairSpec(dist_x, dist_y, coupling or independent(),
                    partition or Partition.all_D())


def bump_warp(amplitude: float, lo: float, hi: float):
    """Smooth bump sin^2(pi s) rescaled to (lo, hi); returns (warp, dwarp)."""
    width = hi - lo

    def warp(u):
        u = np.asarray(u, dtype=float)
        s = (u - lo) / width
        inside = (s > 0) & (s < 1)
        out = np.zeros_like(u)
        out[inside] = amplitude * np.sin(math.pi * s[inside]) ** 2
        return out

    def dwarp(u):
        u = np.asarray(u, dtype=float)
        s = (u - lo) / width
        inside = (s > 0) & (s < 1)
        out = np.zeros_like(u)
        out[inside] = (amplitude * math.pi / width) * np.sin(2 * math.pi * s[inside])
        return out

    return warp, dwarp


# ---------------------------------------------------------------------------
# sampling and quantile differences
# ---------------------------------------------------------------------------

def sample_pairs(pair: PairSpec, n: int, seed: int):
    """n aligned pairs: (U,V) from the copula, then marginal quantiles.

    Deterministic given (pair, n, seed); byte-identical across runs and
    worker counts.
    """
    from .estimator import PairedSample

    if n < 1:
        raise ValidationError("sample_pairs requires n >= 1")
    rng = derive_rng(int(seed), "pairs", pair.fingerprint(), int(n))
    u, v = pair.coupling.sample_uv(int(n), rng)
    xs = np.asarray(pair.dist_x.quantile(u), dtype=float)
    ys = np.asarray(pair.dist_y.quantile(v), dtype=float)
    return PairedSample(xs=xs, ys=ys, provenance="simulated")


def quantile_difference(pair: PairSpec, u) -> np.ndarray | float:
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("quantile difference requires u in (0,1)")
    out = pair.tau(arr)
    return float(out) if np.isscalar(u) or arr.ndim == 0 else out
