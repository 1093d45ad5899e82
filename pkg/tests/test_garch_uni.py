import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.tools.numdiff import approx_fprime

from netlogarch.garch_uni import (
    GarchError,
    GarchParams,
    GarchSpec,
    fit_garch,
    fit_log_arch,
    garch_filter,
    garch_loglik,
    simulate_garch,
)
from netlogarch.netarch import ZeroAdjust

TRUE_T = GarchParams(0.05, 0.1, (0.10,), (0.80,), 7.0)


@pytest.fixture(scope="module")
def t_fit():
    y = simulate_garch(TRUE_T, 1500, seed=11)
    return y, fit_garch(y, seed=11)


def test_fit_satisfies_constraints(t_fit):
    y, fit = t_fit
    p = fit.params
    assert p.omega > 0 and min(p.alpha) >= 0 and min(p.beta) >= 0 and p.persistence < 1
    assert p.nu > 2
    assert np.all(fit.h_path > 0)
    assert fit.converged and not fit.boundary


def test_fit_recovers_parameters(t_fit):
    _, fit = t_fit
    est = fit.params.to_vector(fit.spec)
    truth = TRUE_T.to_vector(fit.spec)
    assert np.all(np.abs(est - truth) <= 3 * fit.std_errors)


def test_loglik_dominates_random_feasible_points(t_fit):
    y, fit = t_fit
    rng = np.random.default_rng(0)
    best = fit.log_lik
    for _ in range(100):
        a, b = rng.dirichlet([1, 1, 1])[:2]
        p = GarchParams(rng.normal(0, 0.1), rng.uniform(0.01, 1.0), (a,), (b,), rng.uniform(2.5, 40))
        assert garch_loglik(p, y) <= best + 1e-9


def test_gradient_vanishes_at_interior_optimum(t_fit):
    y, fit = t_fit
    spec = fit.spec

    def ll(theta):
        return garch_loglik(GarchParams.from_vector(theta, spec), y)

    grad = approx_fprime(fit.params.to_vector(spec), ll, epsilon=1e-6, centered=True)
    assert np.max(np.abs(grad)) < 1e-4


def test_iid_series_recovered_by_arch1():
    # alpha = 0 leaves beta unidentified in GARCH(1,1); ARCH(1) is the identified model
    spec = GarchSpec(q=0, innovation="gaussian")
    omegas, alphas, ses = [], [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for seed in range(20):
            y = np.sqrt(0.01) * np.random.default_rng(seed).standard_normal(1000)
            fit = fit_garch(y, spec, seed=seed)
            omegas.append(fit.params.omega)
            alphas.append(fit.params.alpha[0])
            ses.append(fit.std_errors)
    se = np.nanmedian(np.array(ses), axis=0)
    assert abs(np.median(omegas) - 0.01) <= 2 * se[1]
    assert abs(np.median(alphas)) <= 2 * se[2]


def test_iid_series_unconditional_variance_under_garch11():
    spec = GarchSpec(innovation="gaussian")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        var = [fit_garch(np.sqrt(0.01) * np.random.default_rng(s).standard_normal(1000), spec, seed=s)
               .params.unconditional_variance for s in range(10)]
    assert np.median(var) == pytest.approx(0.01, rel=0.05)


def test_constant_series_rejected():
    with pytest.raises(GarchError, match="degenerate"):
        fit_garch(np.zeros(100))


def test_short_series_rejected():
    with pytest.raises(GarchError):
        fit_garch(np.random.default_rng(0).standard_normal(20))


def test_filter_constant_variance():
    p = GarchParams(0.0, 0.3, (0.0,), (0.0,))
    np.testing.assert_array_equal(garch_filter(p, np.random.default_rng(0).standard_normal(10)), 0.3)


def test_filter_single_shock_hand_unrolled():
    omega, a, b = 0.1, 0.2, 0.7
    y = np.array([2.0, 0.0, 0.0, 0.0, 0.0])
    pre = np.mean(y**2)
    h0 = omega / (1 - a - b)
    expected = [omega + a * pre + b * h0]
    expected.append(omega + a * y[0] ** 2 + b * expected[-1])
    for _ in range(3):
        expected.append(omega + b * expected[-1])
    h = garch_filter(GarchParams(0.0, omega, (a,), (b,)), y)
    np.testing.assert_allclose(h, expected, rtol=1e-14)
    # after the impulse the excess over the fixed point decays at rate beta
    excess = h[1:] - omega / (1 - b)
    np.testing.assert_allclose(excess[1:] / excess[:-1], b, rtol=1e-12)


def test_filter_matches_stored_path(t_fit):
    y, fit = t_fit
    np.testing.assert_allclose(garch_filter(fit, y), fit.h_path, rtol=1e-10)


def test_filter_rejects_nonstationary():
    with pytest.raises(GarchError, match="nonstationary"):
        garch_filter(GarchParams(0.0, 0.1, (0.5,), (0.6,)), np.ones(5))


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(0.0, 0.5), st.floats(0.0, 0.45), st.integers(0, 1000))
def test_filter_scale_equivariance(c, a, b, seed):
    y = np.random.default_rng(seed).standard_normal(60)
    p = GarchParams(0.1, 0.2, (a,), (b,))
    scaled = GarchParams(c * 0.1, c**2 * 0.2, (a,), (b,))
    np.testing.assert_allclose(garch_filter(scaled, c * y), c**2 * garch_filter(p, y), rtol=1e-10)


def test_log_arch_on_unit_magnitude_series():
    y = np.where(np.random.default_rng(0).random(100) < 0.5, -1.0, 1.0)
    fit = fit_log_arch(y, P=3)
    np.testing.assert_allclose(fit.gamma, 0.0, atol=1e-12)


def test_log_arch_normal_equations():
    y = np.random.default_rng(5).standard_normal(30)
    fit = fit_log_arch(y, P=2)
    z = np.log(y**2)
    X = np.column_stack([np.ones(28), z[1:29], z[0:28]])
    coef = np.linalg.solve(X.T @ X, X.T @ z[2:])
    np.testing.assert_allclose([fit.omega, *fit.gamma], coef, rtol=1e-10)


def test_log_arch_identical_series_identical_coefficients():
    y = np.random.default_rng(9).standard_normal(80)
    a, b = fit_log_arch(y, 4, ZeroAdjust()), fit_log_arch(y.copy(), 4, ZeroAdjust())
    np.testing.assert_array_equal(a.gamma, b.gamma)


def test_log_arch_lag_order_too_large():
    with pytest.raises(GarchError):
        fit_log_arch(np.ones(10), P=10)


def test_simulated_iid_variance():
    y = simulate_garch(GarchParams(0.0, 0.04, (0.0,), (0.0,)), 100_000, seed=1)
    assert np.var(y) == pytest.approx(0.04, rel=0.01)


def test_simulation_is_seed_deterministic():
    a = simulate_garch(TRUE_T, 300, seed=4)
    b = simulate_garch(TRUE_T, 300, seed=4)
    np.testing.assert_array_equal(a, b)


def test_student_t_draws_are_fat_tailed():
    y = simulate_garch(GarchParams(0.0, 1.0, (0.0,), (0.0,), 5.0), 100_000, seed=2)
    d = y - y.mean()
    assert np.mean(d**4) / np.mean(d**2) ** 2 > 3
    assert np.var(y) == pytest.approx(1.0, rel=0.05)
