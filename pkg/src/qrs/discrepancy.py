"""Star discrepancy, local discrepancy, and worst-case error bounds.

The 1-d value is exact via the closed form on sorted points. The n-d value
is exact by corner enumeration for small sets and degrades to a certified
Monte Carlo lower bound beyond the enumeration capacity. On top of these
sit the Koksma worst-case quadrature bound and the subsample bound for
uniformly-thinned low-discrepancy sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

EXACT_1D = "exact1d"
EXACT_ENUM_ND = "exact_enum_nd"
LOWER_BOUND_MC = "lower_bound_mc"
METHODS = (EXACT_1D, EXACT_ENUM_ND, LOWER_BOUND_MC)

ENUM_MAX_N = 512
ENUM_MAX_DIM = 4


@dataclass(frozen=True)
class DiscrepancyReport:
    """Star-discrepancy value plus how it was obtained.

    ``lower_bound_mc`` values are certified lower bounds; the exact methods
    return the supremum itself.
    """

    value: float
    n: int
    dim: int
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"discrepancy outside [0, 1]: {self.value}")


def _as_unit_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("points must be a nonempty (n, d) array")
    if not np.isfinite(pts).all() or (pts < 0.0).any() or (pts > 1.0).any():
        raise ValueError("points must lie in the unit cube")
    return pts


def star_discrepancy_1d(points) -> DiscrepancyReport:
    """Exact 1-d star discrepancy: 1/(2n) + max_i |x_(i) - (2i-1)/(2n)|."""
    pts = _as_unit_points(points)
    if pts.shape[1] != 1:
        raise ValueError("star_discrepancy_1d expects 1-d points")
    x = np.sort(pts[:, 0])
    n = x.shape[0]
    grid = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    value = 1.0 / (2.0 * n) + float(np.max(np.abs(x - grid)))
    return DiscrepancyReport(value, n, 1, EXACT_1D)


def _candidate_grid(pts: np.ndarray):
    n, d = pts.shape
    n_cand = np.empty(d, dtype=np.int64)
    width = n + 1
    cands = np.zeros((d, width), dtype=np.float64)
    for j in range(d):
        vals = np.unique(pts[:, j])
        if vals[-1] != 1.0:
            vals = np.append(vals, 1.0)
        cands[j, : vals.shape[0]] = vals
        n_cand[j] = vals.shape[0]
    return cands, n_cand


def star_discrepancy_nd(
    points,
    method: str = "auto",
    n_corners: int = 4096,
    seed: int = 0,
) -> DiscrepancyReport:
    """Star discrepancy of an (n, d) point set.

    ``exact_enum_nd`` enumerates every corner on the grid of per-axis point
    values plus 1.0 and evaluates both the closed and the open count there,
    which attains the supremum. Cost O(prod_j(n_j + 1) * n * d): only allowed
    for n <= 512, d <= 4. ``lower_bound_mc`` samples ``n_corners`` grid
    corners instead and certifies a lower bound. ``auto`` picks enumeration
    whenever it is allowed.
    """
    pts = _as_unit_points(points)
    n, d = pts.shape
    if method == "auto":
        method = EXACT_ENUM_ND if (n <= ENUM_MAX_N and d <= ENUM_MAX_DIM) else LOWER_BOUND_MC
    if method == EXACT_ENUM_ND:
        if n > ENUM_MAX_N or d > ENUM_MAX_DIM:
            raise ValueError(
                f"exact enumeration capacity exceeded (n <= {ENUM_MAX_N}, "
                f"d <= {ENUM_MAX_DIM}); request {LOWER_BOUND_MC} instead"
            )
        cands, n_cand = _candidate_grid(pts)
        value = float(_kernels.star_disc_exact_nd(pts, cands, n_cand))
        return DiscrepancyReport(value, n, d, EXACT_ENUM_ND)
    if method == LOWER_BOUND_MC:
        if n_corners < 1:
            raise ValueError("n_corners must be >= 1")
        cands, n_cand = _candidate_grid(pts)
        rng = np.random.Generator(np.random.Philox(key=seed))
        best = 0.0
        remaining = n_corners
        # chunked so corner storage stays small
        while remaining > 0:
            m = min(remaining, 8192)
            corners = np.empty((m, d), dtype=np.float64)
            for j in range(d):
                corners[:, j] = cands[j, rng.integers(0, n_cand[j], size=m)]
            devs = _kernels.corner_deviations(pts, corners)
            best = max(best, float(devs.max()))
            remaining -= m
        return DiscrepancyReport(best, n, d, LOWER_BOUND_MC)
    raise ValueError(f"unknown method {method!r}")


def local_discrepancy(points, y) -> float:
    """Signed deviation count/n - vol for the anchored half-open box [0, y)."""
    pts = _as_unit_points(points)
    n, d = pts.shape
    corner = np.broadcast_to(np.asarray(y, dtype=np.float64), (d,))
    if (corner < 0.0).any() or (corner > 1.0).any():
        raise ValueError("y must lie in the unit cube")
    count = int(np.sum((pts < corner).all(axis=1)))
    vol = 1.0
    for j in range(d):
        vol *= corner[j]
    return count / n - vol


def koksma_bound(variation: float, dstar: float) -> float:
    """Worst-case quadrature error bound V(f) * D*(P)."""
    if variation < 0.0 or dstar < 0.0:
        raise ValueError("variation and dstar must be nonnegative")
    return variation * dstar


@dataclass(frozen=True)
class SubsampleBoundParams:
    """Inputs for the uniform-subsample discrepancy bound.

    ``k`` is the kept fraction n_b / n_total; ``big_c`` and ``eps`` describe
    the fitted discrepancy decay C * n^-(1-eps) of the full sequence.
    """

    dim: int
    k: float
    n_total: int
    big_c: float
    eps: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not 0.0 < self.k <= 1.0:
            raise ValueError("k must be in (0, 1]")
        if self.n_total < 1:
            raise ValueError("n_total must be >= 1")
        if self.big_c < 0.0:
            raise ValueError("big_c must be >= 0")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must be in (0, 1)")


def subsample_discrepancy_bound(params: SubsampleBoundParams) -> float:
    """Expected star-discrepancy bound for a uniform without-replacement subsample.

    d / (2 k n_total) + d (1 - k) + C n_total^-(1-eps). The middle term uses
    the statement form (no D*/2 factor), which is the larger, safe variant.
    """
    p = params
    return (
        p.dim / (2.0 * p.k * p.n_total)
        + p.dim * (1.0 - p.k)
        + p.big_c * p.n_total ** -(1.0 - p.eps)
    )


_EPS_FLOOR = 1e-9


def fit_qmc_rate(ns, dstars) -> tuple[float, float]:
    """Least-squares fit of D*(n) = C n^-(1-eps) in log-log space.

    Returns (C, eps) with eps clamped into the open interval (0, 1) so the
    result is always usable as SubsampleBoundParams.
    """
    ns = np.asarray(ns, dtype=np.float64)
    ds = np.asarray(dstars, dtype=np.float64)
    if ns.shape != ds.shape or ns.ndim != 1 or ns.shape[0] < 2:
        raise ValueError("need at least two (n, dstar) pairs")
    if (ns <= 0).any() or (ds <= 0).any():
        raise ValueError("ns and dstars must be positive")
    slope, intercept = np.polyfit(np.log(ns), np.log(ds), 1)
    eps = min(max(1.0 + float(slope), _EPS_FLOOR), 1.0 - _EPS_FLOOR)
    return float(math.exp(intercept)), eps
