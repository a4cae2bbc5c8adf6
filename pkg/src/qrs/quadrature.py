"""Equal-weight cubature on the unit cube and convergence-rate studies.

Two closed-form integrands with known integrals drive the studies: a
zero-mean separable sine sum and a product of axis exponentials. Methods
cover plain Monte Carlo, deterministic Halton/Sobol rules, and their
pool-resampled randomizations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .lowdisc import halton, sobol, uniform_random

MC = "mc"
QMC_HALTON = "qmc_halton"
QMC_SOBOL = "qmc_sobol"
RQMC_HALTON = "rqmc_halton"
RQMC_SOBOL = "rqmc_sobol"
METHODS = (MC, QMC_HALTON, QMC_SOBOL, RQMC_HALTON, RQMC_SOBOL)

# rows with error below this are treated as exact hits and excluded from fits
FIT_FLOOR = 1e-14


@dataclass(frozen=True)
class Integrand:
    """A named integrand over [0,1)^dim with its exact integral."""

    name: str
    dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    exact: float


def f_sin(dim: int) -> Integrand:
    """Sum of sin(2 pi x_j); integrates to exactly 0 on the unit cube."""
    if dim < 1:
        raise ValueError("dim must be >= 1")

    def fn(x: np.ndarray) -> np.ndarray:
        return np.sin(2.0 * np.pi * x).sum(axis=1)

    return Integrand("f_sin", dim, fn, 0.0)


def f_exp(dim: int) -> Integrand:
    """Product of exp(-x_j); exact integral (1 - e^-1)^dim."""
    if dim < 1:
        raise ValueError("dim must be >= 1")

    def fn(x: np.ndarray) -> np.ndarray:
        return np.exp(-x.sum(axis=1))

    return Integrand("f_exp", dim, fn, (1.0 - np.exp(-1.0)) ** dim)


def estimate(integrand: Integrand, points: np.ndarray) -> float:
    """Equal-weight estimate: mean of the integrand over the rows."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != integrand.dim:
        raise ValueError("points shape does not match integrand dimension")
    if pts.shape[0] < 1:
        raise ValueError("need at least one point")
    return float(np.mean(integrand.fn(pts)))


def fit_loglog_slope(ns, errs) -> tuple[float, float]:
    """OLS slope/intercept of log(err) vs log(n), skipping near-zero errors.

    Returns (nan, nan) when fewer than two usable rows remain.
    """
    ns = np.asarray(ns, dtype=np.float64)
    errs = np.asarray(errs, dtype=np.float64)
    keep = errs >= FIT_FLOOR
    if keep.sum() < 2:
        return float("nan"), float("nan")
    slope, intercept = np.polyfit(np.log(ns[keep]), np.log(errs[keep]), 1)
    return float(slope), float(intercept)


@dataclass
class ConvergenceCurve:
    """Mean absolute error of one method across a grid of point counts."""

    method: str
    integrand: str
    dim: int
    ns: list[int]
    mean_abs_err: list[float]
    std_err: list[float]
    slope: float = field(default=float("nan"))
    intercept: float = field(default=float("nan"))

    def rel_err(self, exact: float) -> list[float]:
        if exact == 0.0:
            raise ValueError("relative error undefined for a zero integral")
        return [e / abs(exact) for e in self.mean_abs_err]


def _method_estimates(
    integrand: Integrand, method: str, n: int, n_seeds: int, seed0: int, n_scale: int
) -> np.ndarray:
    d = integrand.dim
    if method == MC:
        return np.array(
            [
                estimate(integrand, uniform_random(n, d, seed=seed0 + s))
                for s in range(n_seeds)
            ]
        )
    if method == QMC_HALTON:
        return np.array([estimate(integrand, halton(n, d))])
    if method == QMC_SOBOL:
        return np.array([estimate(integrand, sobol(n, d))])
    # pool-resampled variants: pool of n_scale*n sequence points, one uniform
    # without-replacement batch of n per seed
    pool = halton(n_scale * n, d) if method == RQMC_HALTON else sobol(n_scale * n, d)
    n_pool = pool.shape[0]
    ests = np.empty(n_seeds)
    for s in range(n_seeds):
        if n == n_pool:
            idx = np.arange(n, dtype=np.int64)
        else:
            u = np.random.Generator(np.random.Philox(key=seed0 + s)).random(n)
            idx = _kernels.fisher_yates_head(n_pool, u)
        ests[s] = estimate(integrand, pool[idx])
    return ests


def convergence_study(
    integrand: Integrand,
    ns,
    methods=METHODS,
    n_seeds: int = 10,
    seed0: int = 0,
    n_scale: int = 10,
) -> list[ConvergenceCurve]:
    """Mean |estimate - exact| per method per n, with fitted log-log slopes.

    Deterministic methods get a single evaluation and zero spread; random
    methods average over ``n_seeds`` independent streams.
    """
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns) or not ns:
        raise ValueError("ns must be positive")
    if n_scale < 1:
        raise ValueError("n_scale must be >= 1")
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")
    curves = []
    for method in methods:
        means, spreads = [], []
        for n in ns:
            ests = _method_estimates(integrand, method, n, n_seeds, seed0, n_scale)
            errs = np.abs(ests - integrand.exact)
            means.append(float(errs.mean()))
            if errs.shape[0] > 1:
                spreads.append(float(errs.std(ddof=1) / np.sqrt(errs.shape[0])))
            else:
                spreads.append(0.0)
        slope, intercept = fit_loglog_slope(ns, means)
        curves.append(
            ConvergenceCurve(
                method, integrand.name, integrand.dim, ns, means, spreads, slope, intercept
            )
        )
    return curves
