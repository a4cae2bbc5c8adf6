"""Manufactured solutions, forcings, and boundary sampling."""
import numpy as np
import pytest

from qrs.lowdisc import GeneratorSpec
from qrs.pde_problems import (
    BoundaryBatch,
    allen_cahn_problem,
    poisson_problem,
    residual,
    sample_boundary,
    sine_gordon_problem,
    standard_normals,
)

from oracles import fd_laplacian


def interior_points(n, dim, seed=17):
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.uniform(-0.9, 0.9, size=(n, dim))


class TestStandardNormals:
    def test_deterministic(self):
        np.testing.assert_array_equal(standard_normals(3, 8), standard_normals(3, 8))

    def test_seed_changes_values(self):
        assert not np.array_equal(standard_normals(3, 8), standard_normals(4, 8))

    def test_moments(self):
        x = standard_normals(0, 200_000)
        assert abs(x.mean()) < 0.01
        assert abs(x.std() - 1.0) < 0.01

    def test_odd_count(self):
        assert standard_normals(1, 5).shape == (5,)
        np.testing.assert_array_equal(standard_normals(1, 5), standard_normals(1, 6)[:5])


class TestPoisson:
    def test_exact_value_at_origin(self):
        prob = poisson_problem(3, alpha=1.0)
        assert prob.exact_u(np.zeros((1, 3)))[0] == pytest.approx(1.0)

    def test_forcing_at_origin(self):
        # f(0) = 2a(2a*0 - d) = -2ad
        for dim, alpha in [(1, 1.0), (3, 2.0), (5, 10.0)]:
            prob = poisson_problem(dim, alpha=alpha)
            assert prob.forcing(np.zeros((1, dim)))[0] == pytest.approx(-2.0 * alpha * dim)

    def test_g_is_zero(self):
        prob = poisson_problem(2, alpha=1.0)
        u = np.linspace(-2, 2, 7)
        np.testing.assert_array_equal(prob.g(u), np.zeros(7))
        np.testing.assert_array_equal(prob.g_prime(u), np.zeros(7))

    def test_boundary_value_nonzero(self):
        prob = poisson_problem(2, alpha=1.0)
        assert prob.exact_u(np.array([[1.0, 0.0]]))[0] == pytest.approx(np.exp(-1.0))

    def test_validation(self):
        with pytest.raises(ValueError):
            poisson_problem(2, alpha=0.0)
        with pytest.raises(ValueError):
            poisson_problem(0, alpha=1.0)


class TestAllenCahn:
    def test_g(self):
        prob = allen_cahn_problem(2)
        u = np.array([0.0, 1.0, -2.0])
        np.testing.assert_allclose(prob.g(u), [0.0, 0.0, -2.0 + 8.0])
        np.testing.assert_allclose(prob.g_prime(u), 1.0 - 3.0 * u * u)

    def test_coefficients_deterministic(self):
        a = allen_cahn_problem(4, coeff_seed=7)
        b = allen_cahn_problem(4, coeff_seed=7)
        assert a.coeffs == b.coeffs
        assert len(a.coeffs) == 3
        np.testing.assert_array_equal(np.asarray(a.coeffs), standard_normals(7, 3))

    def test_dim_validation(self):
        with pytest.raises(ValueError):
            allen_cahn_problem(1)


class TestSineGordon:
    def test_g(self):
        prob = sine_gordon_problem(3)
        u = np.array([0.0, np.pi / 2.0])
        np.testing.assert_allclose(prob.g(u), [0.0, 1.0])
        np.testing.assert_allclose(prob.g_prime(u), [1.0, 0.0], atol=1e-15)

    def test_dim_validation(self):
        with pytest.raises(ValueError):
            sine_gordon_problem(2)


ALL_PROBLEMS = [
    poisson_problem(1, alpha=1.0),
    poisson_problem(3, alpha=1.0),
    poisson_problem(3, alpha=10.0),
    allen_cahn_problem(2, coeff_seed=0),
    allen_cahn_problem(3, coeff_seed=0),
    allen_cahn_problem(5, coeff_seed=3),
    sine_gordon_problem(3, coeff_seed=0),
    sine_gordon_problem(4, coeff_seed=1),
]


@pytest.mark.parametrize("prob", ALL_PROBLEMS, ids=lambda p: f"{p.name}-d{p.dim}")
def test_forcing_matches_fd_laplacian(prob):
    # master consistency check: Delta u* + g(u*) == f to FD accuracy
    X = interior_points(60, prob.dim)
    lap = fd_laplacian(prob.exact_u, X, h=1e-4)
    lhs = lap + prob.g(prob.exact_u(X))
    f = prob.forcing(X)
    scale = np.maximum(np.abs(f), 1.0)
    assert np.max(np.abs(lhs - f) / scale) < 1e-5


class TestResidual:
    def test_exact_solution_zero_residual(self):
        prob = poisson_problem(2, alpha=1.0)
        X = interior_points(40, 2)
        u = prob.exact_u(X)
        r2 = np.sum(X * X, axis=1)
        lap = 2.0 * prob.alpha * (2.0 * prob.alpha * r2 - 2.0) * np.exp(-prob.alpha * r2)
        assert np.max(residual(prob, u, lap, X)) < 1e-24

    def test_is_squared_mismatch(self):
        prob = poisson_problem(1, alpha=1.0)
        X = np.zeros((1, 1))
        res = residual(prob, np.array([1.0]), np.array([0.0]), X)
        assert res[0] == pytest.approx(prob.forcing(X)[0] ** 2)

    def test_shape_validation(self):
        prob = poisson_problem(2, alpha=1.0)
        X = interior_points(4, 2)
        with pytest.raises(ValueError):
            residual(prob, np.zeros(3), np.zeros(4), X)


class TestSampleBoundary:
    def test_face_coordinate_pinned(self):
        prob = allen_cahn_problem(3)
        spec = GeneratorSpec("sobol", dim=3, seed=0)
        batch = sample_boundary(prob, 128, spec)
        pts = batch.points.points
        assert pts.shape == (128, 3)
        axis = batch.faces // 2
        side = batch.faces % 2
        picked = pts[np.arange(128), axis]
        np.testing.assert_array_equal(picked, np.where(side == 1, 1.0, -1.0))
        assert np.abs(pts).max() <= 1.0

    def test_free_coords_interior(self):
        # index 0 of the stream is all zeros and lands on a corner; every
        # other point keeps its free coordinates strictly inside
        prob = poisson_problem(4, alpha=1.0)
        spec = GeneratorSpec("halton", dim=4, seed=0)
        pts = sample_boundary(prob, 256, spec).points.points
        assert ((np.abs(pts[1:]) < 1.0).sum(axis=1) == 3).all()

    def test_dim1_gives_endpoints(self):
        prob = poisson_problem(1, alpha=1.0)
        spec = GeneratorSpec("uniform", dim=1, seed=5)
        pts = sample_boundary(prob, 50, spec).points.points
        assert set(np.unique(pts)) <= {-1.0, 1.0}

    def test_values_are_exact_solution(self):
        prob = poisson_problem(3, alpha=2.0)
        spec = GeneratorSpec("uniform", dim=3, seed=1)
        batch = sample_boundary(prob, 64, spec)
        np.testing.assert_allclose(batch.values, prob.exact_u(batch.points.points))

    def test_product_solutions_vanish_on_faces_only_at_corners(self):
        # B = 1 - |x|^2/d is zero only when every |x_k| = 1, so generic
        # boundary values are nonzero for Allen-Cahn
        prob = allen_cahn_problem(3, coeff_seed=0)
        spec = GeneratorSpec("halton", dim=3, seed=0)
        batch = sample_boundary(prob, 64, spec)
        assert np.count_nonzero(batch.values) > 50

    def test_faces_roughly_balanced(self):
        prob = poisson_problem(2, alpha=1.0)
        spec = GeneratorSpec("uniform", dim=2, seed=9)
        counts = np.bincount(sample_boundary(prob, 4000, spec).faces, minlength=4)
        assert counts.min() > 800

    def test_deterministic_and_offset_advances(self):
        prob = poisson_problem(2, alpha=1.0)
        spec = GeneratorSpec("halton", dim=2, seed=0)
        a = sample_boundary(prob, 32, spec).points.points
        b = sample_boundary(prob, 32, spec).points.points
        np.testing.assert_array_equal(a, b)
        c = sample_boundary(prob, 32, spec.advanced(32)).points.points
        assert not np.array_equal(a, c)

    def test_dim_mismatch(self):
        prob = poisson_problem(3, alpha=1.0)
        with pytest.raises(ValueError):
            sample_boundary(prob, 8, GeneratorSpec("halton", dim=2, seed=0))

    def test_batch_validation(self):
        prob = poisson_problem(2, alpha=1.0)
        batch = sample_boundary(prob, 16, GeneratorSpec("uniform", dim=2, seed=0))
        assert isinstance(batch, BoundaryBatch)
        with pytest.raises(ValueError):
            BoundaryBatch(batch.points, batch.values[:-1], batch.faces)
