"""Steady benchmark PDEs on [-1, 1]^d with manufactured exact solutions.

Each problem is Delta u + g(u) = f with Dirichlet data taken from the exact
solution. Poisson uses a Gaussian bump. Allen-Cahn and Sine-Gordon build
u* = A(x) B(x) from a random-coefficient feature sum A and the bump
B = 1 - |x|^2/d that vanishes-ish toward the boundary; their forcings are
assembled from analytic derivatives via

    Delta(AB) = B Delta A + 2 grad A . grad B + A Delta B,

including the factor 2 on the cross term that the product rule requires.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lowdisc import GeneratorSpec, PointSet, generate

POISSON = "poisson"
ALLEN_CAHN = "allen_cahn"
SINE_GORDON = "sine_gordon"
PROBLEMS = (POISSON, ALLEN_CAHN, SINE_GORDON)


def standard_normals(seed: int, count: int) -> np.ndarray:
    """Box-Muller normals over a Philox uniform stream.

    Draw order is fixed: uniforms come in (u1, u2) pairs, each pair yields
    (sqrt(-2 ln(1-u1)) cos(2 pi u2), ... sin(2 pi u2)) in that order, and the
    result is truncated to ``count``.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    pairs = (count + 1) // 2
    u = np.random.Generator(np.random.Philox(key=seed)).random((pairs, 2))
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    theta = 2.0 * np.pi * u[:, 1]
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


@dataclass(frozen=True)
class PdeProblem:
    """One benchmark instance: name, dimension, and its fixed coefficients."""

    name: str
    dim: int
    alpha: float = 1.0
    coeffs: tuple = ()
    coeff_seed: int = 0
    lower: float = -1.0
    upper: float = 1.0

    def _c(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.float64)

    def _check_points(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValueError(f"points must have shape (n, {self.dim})")
        return X

    # ----------------------------------------------------------- solution

    def exact_u(self, X) -> np.ndarray:
        X = self._check_points(X)
        if self.name == POISSON:
            return np.exp(-self.alpha * (X**2).sum(axis=1))
        A, _, _ = self._parts(X)
        return A * _bump(X)

    def forcing(self, X) -> np.ndarray:
        """f = Delta u* + g(u*), assembled from analytic derivatives."""
        X = self._check_points(X)
        if self.name == POISSON:
            r2 = (X**2).sum(axis=1)
            a = self.alpha
            return 2.0 * a * (2.0 * a * r2 - self.dim) * np.exp(-a * r2)
        A, gA, lA = self._parts(X)
        B = _bump(X)
        gB = -2.0 * X / self.dim
        lB = -2.0
        u = A * B
        lap_u = B * lA + 2.0 * (gA * gB).sum(axis=1) + A * lB
        return lap_u + self.g(u)

    # ---------------------------------------------------------- nonlinearity

    def g(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if self.name == POISSON:
            return np.zeros_like(u)
        if self.name == ALLEN_CAHN:
            return u - u**3
        return np.sin(u)

    def g_prime(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if self.name == POISSON:
            return np.zeros_like(u)
        if self.name == ALLEN_CAHN:
            return 1.0 - 3.0 * u**2
        return np.cos(u)

    # ------------------------------------------------------------- internals

    def _parts(self, X):
        """A, grad A, Delta A for the feature-sum factor of u*."""
        c = self._c()
        n, d = X.shape
        A = np.zeros(n)
        gA = np.zeros((n, d))
        lA = np.zeros(n)
        if self.name == ALLEN_CAHN:
            for k in range(d - 1):
                xk = X[:, k]
                xk1 = X[:, k + 1]
                phi = xk + np.cos(xk1) + xk1 * np.sin(xk)
                sin_phi = np.sin(phi)
                cos_phi = np.cos(phi)
                dk = 1.0 + xk1 * np.cos(xk)
                dk1 = np.sin(xk) - np.sin(xk1)
                d2k = -xk1 * np.sin(xk)
                d2k1 = -np.cos(xk1)
                ck = c[k]
                A += ck * sin_phi
                gA[:, k] += ck * cos_phi * dk
                gA[:, k + 1] += ck * cos_phi * dk1
                lA += ck * (cos_phi * d2k - sin_phi * dk**2)
                lA += ck * (cos_phi * d2k1 - sin_phi * dk1**2)
        elif self.name == SINE_GORDON:
            scale = 1.0 / (d - 2)
            for i in range(d - 2):
                xi = X[:, i]
                xj = X[:, i + 1]
                xk = X[:, i + 2]
                E = scale * c[i] * np.exp(xi * xj * xk)
                di = xj * xk
                dj = xi * xk
                dk = xi * xj
                A += E
                gA[:, i] += E * di
                gA[:, i + 1] += E * dj
                gA[:, i + 2] += E * dk
                # the product x_i x_j x_k is multilinear: pure second
                # derivatives of the exponent vanish
                lA += E * (di**2 + dj**2 + dk**2)
        else:
            raise ValueError(f"{self.name} has no feature-sum factor")
        return A, gA, lA


def _bump(X: np.ndarray) -> np.ndarray:
    return 1.0 - (X**2).sum(axis=1) / X.shape[1]


def poisson_problem(dim: int, alpha: float = 1.0) -> PdeProblem:
    """Gaussian-bump Poisson problem: Delta u = f, u* = exp(-alpha |x|^2)."""
    if dim < 1:
        raise ValueError("poisson needs dim >= 1")
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    return PdeProblem(POISSON, dim, alpha=alpha)


def allen_cahn_problem(dim: int, coeff_seed: int = 0) -> PdeProblem:
    """Allen-Cahn g(u) = u - u^3 with a (d-1)-term random feature factor."""
    if dim < 2:
        raise ValueError("allen_cahn needs dim >= 2")
    c = standard_normals(coeff_seed, dim - 1)
    return PdeProblem(ALLEN_CAHN, dim, coeffs=tuple(c), coeff_seed=coeff_seed)


def sine_gordon_problem(dim: int, coeff_seed: int = 0) -> PdeProblem:
    """Sine-Gordon g(u) = sin u with a (d-2)-term random feature factor."""
    if dim < 3:
        raise ValueError("sine_gordon needs dim >= 3")
    c = standard_normals(coeff_seed, dim - 2)
    return PdeProblem(SINE_GORDON, dim, coeffs=tuple(c), coeff_seed=coeff_seed)


def residual(problem: PdeProblem, u_values, laplacians, points) -> np.ndarray:
    """Per-point squared PDE residual |Delta u + g(u) - f|^2."""
    u = np.asarray(u_values, dtype=np.float64)
    lap = np.asarray(laplacians, dtype=np.float64)
    X = problem._check_points(points)
    if u.shape != (X.shape[0],) or lap.shape != u.shape:
        raise ValueError("u_values and laplacians must be (n,) matching points")
    r = lap + problem.g(u) - problem.forcing(X)
    return r**2


@dataclass(frozen=True)
class BoundaryBatch:
    """Dirichlet batch: points on the box boundary with exact values."""

    points: PointSet
    values: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        n = self.points.n
        if self.values.shape != (n,) or self.faces.shape != (n,):
            raise ValueError("values and faces must be (n,) matching points")


def sample_boundary(problem: PdeProblem, n: int, source: GeneratorSpec) -> BoundaryBatch:
    """Draw ``n`` boundary points from a d-dimensional source stream.

    Column 0 of the stream picks one of the 2d faces uniformly; the other
    d-1 columns fill the free coordinates, scaled to the domain. Values are
    the exact solution on those points.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if source.dim != problem.dim:
        raise ValueError("source dimension must match the problem dimension")
    d = problem.dim
    lo, hi = problem.lower, problem.upper
    raw = generate(source, n).points
    face = np.minimum((raw[:, 0] * 2 * d).astype(np.int64), 2 * d - 1)
    axis = face // 2
    side = face % 2
    pts = np.empty((n, d))
    fill = lo + raw[:, 1:] * (hi - lo)
    for i in range(n):
        a = axis[i]
        free = [j for j in range(d) if j != a]
        pts[i, free] = fill[i]
        pts[i, a] = hi if side[i] else lo
    values = problem.exact_u(pts)
    ps = PointSet(
        pts, source, lower=np.full(d, float(lo)), upper=np.full(d, float(hi))
    )
    return BoundaryBatch(ps, values, face)
