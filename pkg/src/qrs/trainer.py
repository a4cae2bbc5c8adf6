"""Epoch-resampled PINN training with pluggable collocation samplers.

Every epoch redraws the interior batch: vanilla draws fresh uniform points,
halton and sobol draw a uniform without-replacement subset of a fixed
low-discrepancy pool, and the residual-adaptive mode reweights the pool by
its current squared residuals before drawing. Adam then runs a fixed number
of steps on that batch. Everything is deterministic given the seeds in the
config.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import autodiff_net as net
from .lowdisc import GeneratorSpec, PointSet, generate, scale_to_box
from .pde_problems import (
    PdeProblem,
    allen_cahn_problem,
    poisson_problem,
    residual,
    sample_boundary,
    sine_gordon_problem,
)
from .pool_sampler import Pool, RadConfig, draw_rad_batch, draw_uniform_batch

SAMPLERS = ("vanilla", "halton", "sobol")


@dataclass(frozen=True)
class TrainConfig:
    """Full description of one training run; two equal configs train identically."""

    problem: str = "poisson"
    dim: int = 2
    alpha: float = 1.0
    coeff_seed: int = 0
    sampler: str = "sobol"
    use_rad: bool = False
    rad: RadConfig = field(default_factory=RadConfig)
    n_r: int = 1000
    n_bc: int = 400
    n_scale: int = 10
    epochs: int = 20
    iters_per_epoch: int = 500
    widths: tuple = (2, 50, 50, 50, 1)
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    weight_bc: float = 1.0
    seed_params: int = 0
    seed_sampler: int = 0
    n_test: int = 10_000
    seed_test: int = 0

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ValueError(f"sampler must be one of {SAMPLERS}")
        for name in ("n_r", "n_bc", "n_scale", "iters_per_epoch", "n_test"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if tuple(self.widths)[0] != self.dim:
            raise ValueError("widths[0] must equal the problem dimension")


def make_problem(cfg: TrainConfig) -> PdeProblem:
    if cfg.problem == "poisson":
        return poisson_problem(cfg.dim, alpha=cfg.alpha)
    if cfg.problem == "allen_cahn":
        return allen_cahn_problem(cfg.dim, coeff_seed=cfg.coeff_seed)
    if cfg.problem == "sine_gordon":
        return sine_gordon_problem(cfg.dim, coeff_seed=cfg.coeff_seed)
    raise ValueError(f"unknown problem {cfg.problem!r}")


class Adam:
    """Flat-vector Adam with bias correction; step mutates theta in place."""

    def __init__(self, n: int, lr: float, beta1: float, beta2: float, eps: float):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = np.zeros(n)
        self.v = np.zeros(n)

    def step(self, theta: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * grad
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        theta -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class TrainReport:
    """Per-epoch history plus everything needed to audit the final model."""

    config: TrainConfig
    epoch_losses: list
    epoch_rel_l2: list
    rel_l2: float
    wall_time_s: float
    params: net.MlpParams
    final_batch: np.ndarray | None = None
    pool_points: np.ndarray | None = None
    pool_hits: np.ndarray | None = None

    @property
    def never_sampled_fraction(self) -> float | None:
        if self.pool_hits is None:
            return None
        return float(np.mean(self.pool_hits == 0))


class TrainDiverged(RuntimeError):
    """Loss went non-finite; .report carries the history up to the failure."""

    def __init__(self, message: str, report: TrainReport):
        super().__init__(message)
        self.report = report


def evaluate_rel_l2(params: net.MlpParams, problem: PdeProblem, test_set: PointSet) -> float:
    """Relative L2 error ||u - u*|| / ||u*|| over a fixed test set."""
    X = test_set.points
    if test_set.n < 1:
        raise ValueError("test set must be nonempty")
    u_star = problem.exact_u(X)
    denom = math.sqrt(float(np.sum(u_star * u_star)))
    if denom == 0.0:
        raise ValueError("exact solution vanishes on the test set")
    diff = net.forward(params, X) - u_star
    return math.sqrt(float(np.sum(diff * diff))) / denom


def make_test_set(cfg: TrainConfig, problem: PdeProblem) -> PointSet:
    spec = GeneratorSpec("uniform", cfg.dim, seed=cfg.seed_test)
    ps = generate(spec, cfg.n_test)
    return scale_to_box(ps, np.full(cfg.dim, problem.lower), np.full(cfg.dim, problem.upper))


def _pool_residuals(params, problem, pool_pts, forcing):
    u, lap = net.value_and_laplacian(params, pool_pts)
    r = lap + problem.g(u) - forcing
    return r * r


def train(cfg: TrainConfig) -> TrainReport:
    """Run the epoch loop and return the full report.

    Interior sampling per epoch: vanilla redraws uniform points from an
    advancing stream; halton/sobol subsample a fixed pool of n_scale * n_r
    low-discrepancy points; with use_rad the pool grows to
    rad.pool_factor * n_r and epochs after the first draw it weighted by
    squared residuals refreshed on the whole pool. Boundary batches come
    from the same sampler family on a separate stream.
    """
    t0 = time.perf_counter()
    problem = make_problem(cfg)
    lower = np.full(cfg.dim, problem.lower)
    upper = np.full(cfg.dim, problem.upper)
    kind = "uniform" if cfg.sampler == "vanilla" else cfg.sampler

    pool_pts = None
    pool_forcing = None
    pool_hits = None
    if cfg.use_rad:
        pool_n = max(cfg.n_r, int(round(cfg.rad.pool_factor * cfg.n_r)))
    else:
        pool_n = cfg.n_scale * cfg.n_r
    if cfg.use_rad or cfg.sampler != "vanilla":
        pool_spec = GeneratorSpec(kind, cfg.dim, seed=cfg.seed_sampler)
        pool_pts = scale_to_box(generate(pool_spec, pool_n), lower, upper).points
        pool_forcing = problem.forcing(pool_pts)
        pool_hits = np.zeros(pool_n, dtype=np.int64)

    boundary_spec = GeneratorSpec(kind, cfg.dim, seed=cfg.seed_sampler + 1)
    draw_rng = np.random.Generator(np.random.Philox(key=cfg.seed_sampler))

    params = net.init_params(cfg.widths, seed=cfg.seed_params)
    theta = net.flatten_params(params)
    params = net.unflatten_params(cfg.widths, theta, copy=False)
    adam = Adam(theta.shape[0], cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps)

    test_set = make_test_set(cfg, problem)
    epoch_losses: list[float] = []
    epoch_rel_l2: list[float] = []
    batch = None

    def report(rel_l2: float) -> TrainReport:
        return TrainReport(
            config=cfg,
            epoch_losses=epoch_losses,
            epoch_rel_l2=epoch_rel_l2,
            rel_l2=rel_l2,
            wall_time_s=time.perf_counter() - t0,
            params=net.unflatten_params(cfg.widths, theta),
            final_batch=batch,
            pool_points=pool_pts,
            pool_hits=pool_hits,
        )

    for epoch in range(cfg.epochs):
        if pool_pts is None:
            spec = GeneratorSpec(kind, cfg.dim, seed=cfg.seed_sampler, offset=epoch * cfg.n_r)
            batch = scale_to_box(generate(spec, cfg.n_r), lower, upper).points
            forcing = problem.forcing(batch)
        else:
            if cfg.use_rad and epoch > 0:
                res = _pool_residuals(params, problem, pool_pts, pool_forcing)
                idx = draw_rad_batch(Pool(pool_pts, residuals=res), cfg.n_r, cfg.rad, draw_rng)
            else:
                idx = draw_uniform_batch(pool_n, cfg.n_r, draw_rng)
            pool_hits[idx] += 1
            batch = pool_pts[idx]
            forcing = pool_forcing[idx]
        bnd = sample_boundary(problem, cfg.n_bc, boundary_spec.advanced(epoch * cfg.n_bc))

        loss_sum = 0.0
        for _ in range(cfg.iters_per_epoch):
            loss, grad, _ = net.loss_and_grad(
                params, problem, batch, bnd, cfg.weight_bc, forcing=forcing
            )
            if not np.isfinite(loss):
                raise TrainDiverged(
                    f"loss became non-finite in epoch {epoch + 1}", report(float("nan"))
                )
            adam.step(theta, grad)
            loss_sum += loss
        epoch_losses.append(loss_sum / cfg.iters_per_epoch)
        epoch_rel_l2.append(evaluate_rel_l2(params, problem, test_set))

    final = epoch_rel_l2[-1] if epoch_rel_l2 else evaluate_rel_l2(params, problem, test_set)
    return report(final)


FAIL_THRESHOLD = 1e-1


@dataclass(frozen=True)
class CompareCell:
    sampler: str
    use_rad: bool
    seed: int
    rel_l2: float
    failed: bool
    diverged: bool
    wall_time_s: float


@dataclass(frozen=True)
class SamplerSummary:
    sampler: str
    use_rad: bool
    mean_rel_l2: float
    std_rel_l2: float
    n_failed: int
    n_seeds: int


@dataclass(frozen=True)
class ComparisonTable:
    cells: tuple
    rows: tuple

    def format(self) -> str:
        lines = [f"{'sampler':<14} {'rel L2 mean':>12} {'std':>10} {'failed':>7}"]
        for row in self.rows:
            name = row.sampler + ("+rad" if row.use_rad else "")
            mean = "n/a" if math.isnan(row.mean_rel_l2) else f"{row.mean_rel_l2:.3e}"
            std = "n/a" if math.isnan(row.std_rel_l2) else f"{row.std_rel_l2:.1e}"
            lines.append(f"{name:<14} {mean:>12} {std:>10} {row.n_failed:>4}/{row.n_seeds}")
        return "\n".join(lines)


def parse_sampler(label: str) -> tuple[str, bool]:
    """'sobol' -> ('sobol', False); 'halton+rad' -> ('halton', True)."""
    base, _, tag = label.partition("+")
    if base not in SAMPLERS or (tag and tag != "rad"):
        raise ValueError(f"bad sampler label {label!r}")
    return base, tag == "rad"


def _worker_count(n_jobs: int) -> int:
    env = os.environ.get("QRS_THREADS", "").strip()
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_jobs))


def _run_cell(base_cfg: TrainConfig, label: str, seed: int) -> CompareCell:
    sampler, use_rad = parse_sampler(label)
    cfg = replace(base_cfg, sampler=sampler, use_rad=use_rad, seed_params=seed, seed_sampler=seed)
    try:
        rep = train(cfg)
        rel, diverged = rep.rel_l2, False
        wall = rep.wall_time_s
    except TrainDiverged as exc:
        rel, diverged = float("nan"), True
        wall = exc.report.wall_time_s
    failed = diverged or not (rel < FAIL_THRESHOLD)
    return CompareCell(sampler, use_rad, seed, rel, failed, diverged, wall)


def compare_samplers(base_cfg: TrainConfig, samplers, seeds) -> ComparisonTable:
    """Train every (sampler, seed) cell and aggregate mean/std per sampler.

    A cell fails if it diverges or lands above the 1e-1 threshold; failed
    cells are excluded from the mean but reported. Cells run concurrently up
    to QRS_THREADS workers (they share no state).
    """
    samplers = list(samplers)
    seeds = list(seeds)
    if not samplers or not seeds:
        raise ValueError("need at least one sampler and one seed")
    for label in samplers:
        parse_sampler(label)
    jobs = [(label, seed) for label in samplers for seed in seeds]
    workers = _worker_count(len(jobs))
    if workers == 1:
        cells = [_run_cell(base_cfg, label, seed) for label, seed in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_cell, base_cfg, label, seed) for label, seed in jobs]
            cells = [f.result() for f in futures]

    rows = []
    for label in samplers:
        sampler, use_rad = parse_sampler(label)
        group = [c for c in cells if (c.sampler, c.use_rad) == (sampler, use_rad)]
        ok = [c.rel_l2 for c in group if not c.failed]
        mean = float(np.mean(ok)) if ok else float("nan")
        std = float(np.std(ok, ddof=1)) if len(ok) > 1 else (0.0 if ok else float("nan"))
        rows.append(
            SamplerSummary(sampler, use_rad, mean, std, sum(c.failed for c in group), len(group))
        )
    return ComparisonTable(tuple(cells), tuple(rows))
