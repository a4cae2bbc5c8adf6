"""Pool-based batch samplers and pool-coverage analysis.

A pool is an oversampled point set from which training batches are drawn
without replacement, either uniformly or weighted by residual magnitude.
The coverage functions quantify how likely repeated batches are to touch
every pool point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .lowdisc import GeneratorSpec

CLOSED_FORM = "closed_form"
SIMULATED = "simulated"

# beyond this pool size the alternating closed form is abandoned for simulation
CLOSED_FORM_MAX_POOL = 2000

_SIM_CHUNK = 4096


@dataclass
class Pool:
    """Oversampled candidate points plus optional per-point residuals."""

    points: np.ndarray
    spec: GeneratorSpec | None = None
    residuals: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[0] < 1:
            raise ValueError("pool points must be a nonempty (n, d) array")
        if self.residuals is not None:
            self.residuals = np.asarray(self.residuals, dtype=np.float64)
            if self.residuals.shape != (self.points.shape[0],):
                raise ValueError("residuals must have one entry per pool point")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class RadConfig:
    """Residual-adaptive weighting: w_i proportional to r_i^k / mean(r^k) + c."""

    k_exp: float = 1.0
    c_add: float = 1.0
    pool_factor: float = 50.0

    def __post_init__(self):
        if self.k_exp < 0.0:
            raise ValueError("k_exp must be >= 0")
        if self.c_add < 0.0:
            raise ValueError("c_add must be >= 0")
        if self.pool_factor < 1.0:
            raise ValueError("pool_factor must be >= 1")


def draw_uniform_batch(n_pool: int, n_b: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform without-replacement batch of pool indices.

    Drawing the whole pool returns it order-normalized (0..n-1), so a
    full-size batch reproduces pool-order statistics bit for bit.
    """
    if not 1 <= n_b <= n_pool:
        raise ValueError(f"n_b must be in [1, {n_pool}], got {n_b}")
    if n_b == n_pool:
        return np.arange(n_pool, dtype=np.int64)
    return _kernels.fisher_yates_head(n_pool, rng.random(n_b))


def rad_weights(residuals, cfg: RadConfig = RadConfig()) -> np.ndarray:
    """Normalized residual-adaptive weights over a pool.

    All-zero residuals degrade to uniform weights so a fresh network still
    trains. Residuals must be nonnegative and finite (they are squared
    residual magnitudes).
    """
    r = np.asarray(residuals, dtype=np.float64)
    if r.ndim != 1 or r.shape[0] < 1:
        raise ValueError("residuals must be a nonempty vector")
    if not np.isfinite(r).all() or (r < 0.0).any():
        raise ValueError("residuals must be finite and nonnegative")
    n = r.shape[0]
    if (r == 0.0).all():
        return np.full(n, 1.0 / n)
    # The weights depend on r only through r^k / mean(r^k), so dividing by
    # max(r) first changes nothing mathematically but keeps r^k inside the
    # float range: the largest ratio is exactly 1, so the mean is >= 1/n.
    rk = (r / r.max()) ** cfg.k_exp
    w = rk / rk.mean() + cfg.c_add
    return w / w.sum()


def draw_rad_batch(
    pool: Pool,
    n_b: int,
    cfg: RadConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Weighted without-replacement batch using the pool's residuals.

    Sequential draws: each uniform is inverted through the cumulative sum of
    the remaining weights, and the chosen weight is removed. Drawing the full
    pool is exhaustive regardless of weights.
    """
    if pool.residuals is None:
        raise ValueError("pool has no residuals; draw a uniform batch instead")
    if not 1 <= n_b <= pool.n:
        raise ValueError(f"n_b must be in [1, {pool.n}], got {n_b}")
    if n_b == pool.n:
        return np.arange(pool.n, dtype=np.int64)
    w = rad_weights(pool.residuals, cfg)
    return _kernels.weighted_draw(w, rng.random(n_b))


@dataclass(frozen=True)
class CoverageResult:
    value: float
    method: str
    n_trials: int = 0


def _validate_coverage_args(n_pool: int, n_b: int, s: int):
    if n_pool < 1:
        raise ValueError("n_pool must be >= 1")
    if not 1 <= n_b <= n_pool:
        raise ValueError(f"n_b must be in [1, {n_pool}]")
    if s < 1:
        raise ValueError("s must be >= 1")


def coverage_probability(
    n_pool: int, n_b: int, s: int, seed: int = 0, n_trials: int = 100_000
) -> CoverageResult:
    """Probability that s batches of n_b draws cover the whole pool.

    Inclusion-exclusion over the points left untouched:
    P = sum_i (-1)^i C(n, i) C(n-i, n_b)^s / C(n, n_b)^s, evaluated in exact
    integer arithmetic so small cases (the only ones where the alternating
    sum is affordable) are exact to the last bit. Pools larger than
    CLOSED_FORM_MAX_POOL fall back to simulation and are flagged as such.
    """
    _validate_coverage_args(n_pool, n_b, s)
    if n_pool > CLOSED_FORM_MAX_POOL:
        value = simulate_coverage(n_pool, n_b, s, n_trials=n_trials, seed=seed)
        return CoverageResult(value, SIMULATED, n_trials)
    num = 0
    for i in range(0, n_pool - n_b + 1):
        term = math.comb(n_pool, i) * math.comb(n_pool - i, n_b) ** s
        num += -term if i % 2 else term
    den = math.comb(n_pool, n_b) ** s
    value = float(Fraction(num, den))
    value = min(max(value, 0.0), 1.0)
    return CoverageResult(value, CLOSED_FORM)


def simulate_coverage(
    n_pool: int, n_b: int, s: int, n_trials: int = 100_000, seed: int = 0
) -> float:
    """Fraction of trials in which every pool index was drawn at least once."""
    _validate_coverage_args(n_pool, n_b, s)
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    covered = 0
    done = 0
    while done < n_trials:
        chunk = min(_SIM_CHUNK, n_trials - done)
        u = rng.random((chunk, s, n_b))
        covered += _kernels.coverage_trials(u, n_pool)
        done += chunk
    return covered / n_trials


def expected_missed_fraction(n_pool: int, n_b: int, s: int) -> float:
    """Expected fraction of pool points never drawn across s batches."""
    _validate_coverage_args(n_pool, n_b, s)
    return (1.0 - n_b / n_pool) ** s
