import numpy as np
import pytest

from qrs.lowdisc import halton, sobol, uniform_random
from qrs.quadrature import (
    METHODS,
    MC,
    QMC_HALTON,
    QMC_SOBOL,
    RQMC_HALTON,
    RQMC_SOBOL,
    ConvergenceCurve,
    Integrand,
    convergence_study,
    estimate,
    f_exp,
    f_sin,
    fit_loglog_slope,
)


def test_f_sin_pointwise_and_exact():
    g = f_sin(2)
    x = np.array([[0.25, 0.5]])
    assert g.fn(x)[0] == pytest.approx(np.sin(np.pi / 2) + np.sin(np.pi), abs=1e-15)
    assert g.exact == 0.0


def test_f_exp_pointwise_and_exact():
    g = f_exp(3)
    x = np.array([[0.1, 0.2, 0.3]])
    assert g.fn(x)[0] == pytest.approx(np.exp(-0.6), rel=1e-15)
    assert g.exact == pytest.approx((1 - np.exp(-1)) ** 3, rel=1e-15)


def test_estimate_of_constant_is_exact():
    g = Integrand("one", 2, lambda x: np.ones(x.shape[0]), 1.0)
    assert estimate(g, uniform_random(100, 2, seed=0)) == 1.0


def test_estimate_permutation_invariant_up_to_roundoff():
    g = f_exp(2)
    pts = uniform_random(512, 2, seed=3)
    rng = np.random.Generator(np.random.Philox(key=4))
    a = estimate(g, pts)
    b = estimate(g, pts[rng.permutation(512)])
    assert a == pytest.approx(b, rel=1e-12)


def test_estimate_validation():
    g = f_sin(2)
    with pytest.raises(ValueError):
        estimate(g, np.empty((0, 2)))
    with pytest.raises(ValueError):
        estimate(g, np.zeros((4, 3)))


def test_mc_estimate_is_unbiased_within_3_sigma():
    g = f_exp(2)
    n, n_seeds = 256, 200
    ests = np.array(
        [estimate(g, uniform_random(n, 2, seed=s)) for s in range(n_seeds)]
    )
    se = ests.std(ddof=1) / np.sqrt(n_seeds)
    assert abs(ests.mean() - g.exact) < 3.0 * se


def test_fit_loglog_slope_recovers_power_law():
    ns = [16, 32, 64, 128]
    errs = [0.5 * n**-0.5 for n in ns]
    slope, intercept = fit_loglog_slope(ns, errs)
    assert slope == pytest.approx(-0.5, abs=1e-12)
    assert np.exp(intercept) == pytest.approx(0.5, rel=1e-12)


def test_fit_loglog_slope_skips_exact_hits():
    slope, _ = fit_loglog_slope([16, 32, 64], [0.0, 1e-16, 0.1])
    assert np.isnan(slope)


def test_convergence_study_shapes_and_determinism():
    g = f_exp(2)
    ns = [16, 64, 256]
    curves = convergence_study(g, ns, methods=METHODS, n_seeds=4, seed0=0)
    assert [c.method for c in curves] == list(METHODS)
    for c in curves:
        assert isinstance(c, ConvergenceCurve)
        assert c.ns == ns
        assert len(c.mean_abs_err) == 3
        assert all(e >= 0 for e in c.mean_abs_err)
    again = convergence_study(g, ns, methods=METHODS, n_seeds=4, seed0=0)
    for c, c2 in zip(curves, again):
        assert c.mean_abs_err == c2.mean_abs_err


def test_deterministic_methods_have_zero_spread():
    g = f_sin(2)
    curves = convergence_study(g, [32, 128], methods=(QMC_HALTON, QMC_SOBOL), n_seeds=7)
    for c in curves:
        assert c.std_err == [0.0, 0.0]


def test_qmc_beats_mc_on_smooth_integrand():
    g = f_exp(2)
    n = 4096
    mc_errs = [
        abs(estimate(g, uniform_random(n, 2, seed=s)) - g.exact) for s in range(10)
    ]
    qmc_err = abs(estimate(g, sobol(n, 2)) - g.exact)
    assert qmc_err < np.mean(mc_errs)


def test_rqmc_with_full_pool_draw_equals_qmc_bitwise():
    # n_scale = 1 makes the batch the whole pool, order-normalized
    g = f_exp(2)
    ns = [32, 256]
    rq = convergence_study(g, ns, methods=(RQMC_HALTON, RQMC_SOBOL), n_seeds=5, n_scale=1)
    q = convergence_study(g, ns, methods=(QMC_HALTON, QMC_SOBOL), n_seeds=5)
    for c_r, c_q in zip(rq, q):
        assert c_r.mean_abs_err == c_q.mean_abs_err
        assert c_r.std_err == [0.0, 0.0]


def test_rqmc_estimates_vary_with_seed_when_subsampled():
    g = f_exp(2)
    (c,) = convergence_study(g, [64], methods=(RQMC_SOBOL,), n_seeds=6, n_scale=10)
    assert c.std_err[0] > 0.0


def test_rel_err_accessor():
    g = f_exp(2)
    (c,) = convergence_study(g, [64], methods=(QMC_SOBOL,))
    assert c.rel_err(g.exact)[0] == pytest.approx(c.mean_abs_err[0] / g.exact)
    (cs,) = convergence_study(f_sin(2), [64], methods=(QMC_SOBOL,))
    with pytest.raises(ValueError):
        cs.rel_err(0.0)


def test_convergence_study_validation():
    with pytest.raises(ValueError):
        convergence_study(f_sin(2), [])
    with pytest.raises(ValueError):
        convergence_study(f_sin(2), [16], methods=("trapezoid",))
    with pytest.raises(ValueError):
        convergence_study(f_sin(2), [16], n_scale=0)
