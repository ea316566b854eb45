"""Experiment configuration, Monte Carlo study runner, ingestion, emission.

A study draws R paired samples, computes the scaled contrast statistic per
replication, simulates the corresponding limit law once, and reports the
two-sample Kolmogorov-Smirnov distance between the R statistics and the
simulated draws. Everything is deterministic given the master seed:
replication i uses a generator derived from (seed, "rep", i) and draw j
from (seed, "draw", j), so results are identical for any worker count.
"""

from __future__ import annotations

import csv
import json
import math
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import scipy
import yaml
from scipy.stats import ks_2samp

from . import costs as costs_mod
from . import distributions as dist_mod
from .costs import CostSpec, rate_vn
from .distributions import (CouplingSpec, Partition, PairSpec, bump_warp,
                            sample_pairs, warped_dist)
from .errors import ValidationError
from .estimator import PairedSample, QuadratureSpec, w_cost_empirical, \
    w_cost_population
from .limitlaw import (THEOREM_EQUAL, THEOREM_GAUSSIAN, THEOREM_MIXED,
                       THEOREM_ONE_SAMPLE, THEOREM_QUADRATIC, LimitDraws,
                       build_bridge_grid, draw_limit_E, draw_limit_ED,
                       draw_limit_one_sample, draw_limit_W2)
from .seeding import derive_rng

__all__ = [
    "ExperimentConfig",
    "StudyResult",
    "run_clt_study",
    "ingest_csv",
    "emit_study",
    "emit_limit_draws",
    "load_config",
    "resolve_cost",
    "resolve_pair",
]

_THEOREMS = (THEOREM_EQUAL, THEOREM_QUADRATIC, THEOREM_GAUSSIAN,
             THEOREM_MIXED, THEOREM_ONE_SAMPLE)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved study description; the seed is mandatory."""

    pair: PairSpec
    cost: CostSpec
    theorem: str
    n: int
    replications: int
    seed: int
    grid_m: int = 2047
    grid_delta: float = 1e-4
    n_sim: int = 5000
    p: float = 1.5                      # one-sample exponent
    tail_policy: str = "record"         # "record" | "raise"
    check_policy: str = "require"       # "require" | "override"
    out: Optional[str] = None
    raw: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.theorem not in _THEOREMS:
            raise ValidationError(f"unknown theorem label {self.theorem!r}; "
                                  f"expected one of {_THEOREMS}")
        if self.n < 1 or self.replications < 1 or self.n_sim < 1:
            raise ValidationError("n, replications and n_sim must be >= 1")
        if self.seed is None:
            raise ValidationError("a master seed is required (no wall-clock default)")
        if self.tail_policy not in ("record", "raise"):
            raise ValidationError("tail_policy must be 'record' or 'raise'")
        if self.check_policy not in ("require", "override"):
            raise ValidationError("check_policy must be 'require' or 'override'")

    def describe(self) -> dict:
        return {
            "pair": self.pair.fingerprint(),
            "cost": self.cost.name,
            "cost_params": self.cost.params,
            "theorem": self.theorem,
            "n": self.n,
            "replications": self.replications,
            "seed": self.seed,
            "grid": {"m": self.grid_m, "delta": self.grid_delta},
            "n_sim": self.n_sim,
            "p": self.p,
            "tail_policy": self.tail_policy,
            "check_policy": self.check_policy,
        }


@dataclass(frozen=True)
class StudyResult:
    statistics: np.ndarray
    draws: LimitDraws
    ks_distance: float
    runtime_seconds: float
    config: ExperimentConfig
    centering: float
    environment: dict

    def summary(self) -> dict:
        stats = self.statistics
        return {
            "config": self.config.describe(),
            "ks_distance": self.ks_distance,
            "runtime_seconds": self.runtime_seconds,
            "centering": self.centering,
            "statistics": {
                "count": int(len(stats)),
                "mean": float(np.mean(stats)),
                "std": float(np.std(stats, ddof=1)) if len(stats) > 1 else 0.0,
                "quantiles": {q: float(np.quantile(stats, q))
                              for q in (0.05, 0.25, 0.5, 0.75, 0.95)},
            },
            "limit_draws": {
                "count": int(self.draws.n_sim),
                "mean": float(np.mean(self.draws.values)),
                "std": float(np.std(self.draws.values, ddof=1)),
                "tail_bound": self.draws.tail_bound,
                "theorem": self.draws.theorem,
                "grid": self.draws.grid_meta,
            },
            "environment": self.environment,
        }


def _environment_fingerprint() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def _one_sample_statistic(config: ExperimentConfig, index: int) -> float:
    from .inference import wp_distance_to_dist

    rng = derive_rng(config.seed, "rep", index)
    xs = config.pair.dist_x.quantile(rng.random(config.n))
    w = wp_distance_to_dist(np.asarray(xs, dtype=float), config.pair.dist_x, config.p)
    return config.n ** (config.p / 2.0) * w


def _paired_statistic(config: ExperimentConfig, index: int, scale: float,
                      centering: float) -> float:
    sample = sample_pairs(config.pair, config.n, derive_seed_int(config.seed, index))
    w = w_cost_empirical(sample, config.cost)
    return scale * (w - centering)


def derive_seed_int(seed: int, index: int) -> int:
    # per-replication sampling seed; sample_pairs derives its own stream from it
    return int(derive_rng(seed, "rep", index).integers(0, 2 ** 62))


def _replication_block(args):
    config, indices, scale, centering = args
    if config.theorem == THEOREM_ONE_SAMPLE:
        return [_one_sample_statistic(config, i) for i in indices]
    return [_paired_statistic(config, i, scale, centering) for i in indices]


def _scale_and_centering(config: ExperimentConfig):
    n = config.n
    if config.theorem == THEOREM_EQUAL:
        return rate_vn(config.cost, n), 0.0
    if config.theorem == THEOREM_QUADRATIC:
        return float(n), 0.0
    if config.theorem in (THEOREM_GAUSSIAN, THEOREM_MIXED):
        pop = w_cost_population(config.pair, config.cost, QuadratureSpec())
        return math.sqrt(n), pop.value + pop.tail_bound
    return 1.0, 0.0   # one-sample handles its own scaling


def _simulate_limit(config: ExperimentConfig) -> LimitDraws:
    grid = build_bridge_grid(config.pair, m=config.grid_m, delta=config.grid_delta)
    tail_frac = 0.05 if config.tail_policy == "raise" else None
    require = config.check_policy == "require"
    if config.theorem == THEOREM_EQUAL:
        return draw_limit_E(config.pair, config.cost, grid, config.n_sim,
                            config.seed, tail_frac, require)
    if config.theorem == THEOREM_QUADRATIC:
        return draw_limit_W2(config.pair, grid, config.n_sim, config.seed,
                             tail_frac, require)
    if config.theorem in (THEOREM_MIXED, THEOREM_GAUSSIAN):
        return draw_limit_ED(config.pair, config.cost, grid, config.n_sim,
                             config.seed, tail_frac, require)
    return draw_limit_one_sample(config.pair.dist_x, config.p, grid,
                                 config.n_sim, config.seed, tail_frac, require)


def run_clt_study(config: ExperimentConfig, threads: int = 1) -> StudyResult:
    """R scaled replications vs one simulated limit; deterministic given the
    master seed, for any ``threads``. Assumption checkers run inside the
    limit simulation per ``check_policy``; truncation bounds are recorded
    (or enforced) per ``tail_policy``.
    """
    t_start = time.perf_counter()
    draws = _simulate_limit(config)

    scale, centering = _scale_and_centering(config)
    indices = list(range(config.replications))
    if threads <= 1:
        stats_list = _replication_block((config, indices, scale, centering))
    else:
        # replications are pure functions of (config, index): any worker
        # layout reassembles to the same ordered array
        blocks = [(config, indices[k::threads], scale, centering)
                  for k in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_replication_block, blocks))
        stats_arr = np.empty(config.replications)
        for k, block in enumerate(results):
            stats_arr[k::threads] = block
        stats_list = stats_arr.tolist()
    statistics = np.asarray(stats_list, dtype=float)

    if np.all(statistics == statistics[0]) and np.all(draws.values == draws.values[0]) \
            and statistics[0] == draws.values[0]:
        ks = 0.0   # both collections degenerate at the same atom
    else:
        ks = float(ks_2samp(statistics, draws.values).statistic)
    runtime = time.perf_counter() - t_start
    return StudyResult(
        statistics=statistics,
        draws=draws,
        ks_distance=ks,
        runtime_seconds=runtime,
        config=config,
        centering=centering,
        environment=_environment_fingerprint(),
    )


# ---------------------------------------------------------------------------
# ingestion and emission
# ---------------------------------------------------------------------------

def ingest_csv(path) -> PairedSample:
    """Two-column CSV (x,y per row, '.' decimal separator); a header row is
    auto-detected when its first row is non-numeric. Malformed rows fail
    with their line number.
    """
    xs, ys = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ValidationError(
                    f"{path}: line {lineno}: expected 2 fields, got {len(row)}"
                )
            try:
                x = float(row[0])
                y = float(row[1])
            except ValueError:
                if lineno == 1 and not xs:
                    continue    # header
                raise ValidationError(
                    f"{path}: line {lineno}: could not parse {row!r} as two numbers"
                ) from None
            xs.append(x)
            ys.append(y)
    if not xs:
        raise ValidationError(f"{path}: no data rows")
    return PairedSample(np.asarray(xs), np.asarray(ys), provenance="ingested")


def emit_limit_draws(draws: LimitDraws, out_dir, stem: str = "limit_draws") -> dict:
    """One-column CSV of draw values plus a JSON metadata sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value"])
        for v in draws.values:
            writer.writerow([f"{v:.17g}"])
    meta = {
        "theorem": draws.theorem,
        "grid": draws.grid_meta,
        "seed": draws.seed,
        "tail_bound": draws.tail_bound,
        "n_sim": draws.n_sim,
    }
    meta_path = out / f"{stem}.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")
    return {"csv": str(csv_path), "meta": str(meta_path)}


def emit_study(result: StudyResult, out_dir) -> dict:
    """Statistics CSV, limit-draw CSV, and a JSON summary embedding the
    resolved configuration."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stats_path = out / "statistics.csv"
    with open(stats_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replication", "scaled_statistic"])
        for i, v in enumerate(result.statistics):
            writer.writerow([i, f"{v:.17g}"])
    paths = emit_limit_draws(result.draws, out)
    summary_path = out / "study.json"
    summary_path.write_text(json.dumps(result.summary(), indent=2, sort_keys=True),
                            encoding="utf-8")
    return {"statistics": str(stats_path), "summary": str(summary_path), **paths}


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------

def resolve_cost(spec: dict) -> CostSpec:
    if "family" not in spec:
        raise ValidationError("cost config requires a 'family' key")
    params = {k: v for k, v in spec.items() if k != "family"}
    return costs_mod.builtin_cost(spec["family"], **params)


def _resolve_dist(spec: dict) -> dist_mod.DistSpec:
    if "family" not in spec:
        raise ValidationError("distribution config requires a 'family' key")
    params = {k: v for k, v in spec.items() if k != "family"}
    return dist_mod.builtin_dist(spec["family"], **params)


def _resolve_coupling(spec: Optional[dict]) -> CouplingSpec:
    if spec is None:
        return dist_mod.independent()
    kind = spec.get("kind", "independent")
    if kind == "gaussian":
        return dist_mod.gaussian_coupling(spec["rho"])
    if kind in ("independent", "comonotone"):
        return CouplingSpec(kind)
    raise ValidationError(f"config coupling kind {kind!r} not supported "
                          "(custom copulas are library-API only)")


def _resolve_partition(spec) -> Optional[Partition]:
    if spec is None:
        return None
    breaks = tuple(float(b) for b in spec["breaks"])
    labels = tuple(str(lab) for lab in spec["labels"])
    return Partition(breaks, labels)


def resolve_pair(spec: dict) -> PairSpec:
    dist_x = _resolve_dist(spec["x"])
    warp_spec = spec.get("warp")
    if warp_spec is not None:
        lo, hi = float(warp_spec["lo"]), float(warp_spec["hi"])
        warp, dwarp = bump_warp(float(warp_spec["amplitude"]), lo, hi)
        dist_y = warped_dist(dist_x, warp, dwarp, (lo, hi))
        partition = _resolve_partition(spec.get("partition")) or Partition(
            (0.0, lo, hi, 1.0), ("E", "D", "E"))
    elif "y" in spec:
        dist_y = _resolve_dist(spec["y"])
        partition = _resolve_partition(spec.get("partition"))
        if partition is None:
            same = spec["y"] == spec["x"]
            partition = Partition.all_E() if same else Partition.all_D()
    else:
        dist_y = dist_x
        partition = _resolve_partition(spec.get("partition")) or Partition.all_E()
    coupling = _resolve_coupling(spec.get("coupling"))
    return PairSpec(dist_x, dist_y, coupling, partition)


def load_config(path, seed_override: Optional[int] = None,
                out_override: Optional[str] = None) -> ExperimentConfig:
    """Read a YAML experiment file into a fully resolved configuration."""
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: config must be a mapping")
    seed = seed_override if seed_override is not None else raw.get("seed")
    if seed is None:
        raise ValidationError("config requires an explicit seed")
    try:
        pair = resolve_pair(raw["pair"])
        cost = resolve_cost(raw["cost"])
        grid = raw.get("grid", {})
        config = ExperimentConfig(
            pair=pair,
            cost=cost,
            theorem=raw.get("theorem", THEOREM_EQUAL),
            n=int(raw["n"]),
            replications=int(raw.get("replications", 1)),
            seed=int(seed),
            grid_m=int(grid.get("m", 2047)),
            grid_delta=float(grid.get("delta", 1e-4)),
            n_sim=int(raw.get("n_sim", 5000)),
            p=float(raw.get("p", 1.5)),
            tail_policy=raw.get("tail_policy", "record"),
            check_policy=raw.get("check_policy", "require"),
            out=out_override or raw.get("out"),
            raw=raw,
        )
    except KeyError as exc:
        raise ValidationError(f"{path}: missing config key {exc}") from None
    return config
