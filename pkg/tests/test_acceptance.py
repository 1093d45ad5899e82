"""Acceptance criteria, one or more tests per criterion.

Tests that need the OPEC price file skip when it is absent; the summary at
the end of the run prints one verdict line per criterion.  Columns of the
price file are taken in the order Algeria, Iran, Libya, Nigeria,
Saudi Arabia, UAE.
"""

import os
import time
import warnings

import numpy as np
import pytest

from netlogarch.data import correlation_matrix, describe
from netlogarch.forecast_eval import (
    RollingConfig,
    cw_test,
    dm_test,
    loss_matrix,
    mcs,
    rmsfe_mafe,
    rolling_forecast,
)
from netlogarch.garch_multi import fit_ccc, fit_dcc, fit_gogarch, fit_univariate, givens_rotation, match_columns
from netlogarch.netarch import fit_gmm, log_square_transform
from netlogarch.network import build_weights
from netlogarch.sim import NetSimSpec, simulate_gogarch, simulate_net_logarch

COUNTRIES = ("Algeria", "Iran", "Libya", "Nigeria", "Saudi Arabia", "UAE")

# mean, median, std, min, max, skewness, kurtosis
TABLE_STATS = {
    "Algeria": (0.002013494, 0.007443834, 0.1015212, -0.6951943, 0.4956162, -0.6866453, 7.851252),
    "Iran": (0.002149783, 0.005534048, 0.104726, -0.6475425, 0.5536787, -0.6061617, 6.594064),
    "Libya": (0.001960725, 0.007137005, 0.1056493, -0.7700193, 0.5214684, -0.799952, 9.663932),
    "Nigeria": (0.001953813, 0.009854897, 0.1035821, -0.7654379, 0.4708431, -0.8414405, 9.467677),
    "Saudi Arabia": (0.002079986, 0.006545478, 0.09922573, -0.6665233, 0.5178323, -0.8279926, 8.10026),
    "UAE": (0.001946261, 0.007240163, 0.09070767, -0.4717577, 0.4757471, -0.6159549, 5.649863),
}
TABLE_CORR = np.array([
    [1.0000, 0.9518, 0.9928, 0.9946, 0.9529, 0.9376],
    [0.9518, 1.0000, 0.9515, 0.9525, 0.9804, 0.9677],
    [0.9928, 0.9515, 1.0000, 0.9934, 0.9537, 0.9350],
    [0.9946, 0.9525, 0.9934, 1.0000, 0.9569, 0.9356],
    [0.9529, 0.9804, 0.9537, 0.9569, 1.0000, 0.9769],
    [0.9376, 0.9677, 0.9350, 0.9356, 0.9769, 1.0000],
])
# alpha, beta, nu, log-likelihood
TABLE_GARCH = {
    "Algeria": (0.4432, 0.5408, 8.3936, 508.95),
    "Iran": (0.5865, 0.4036, 5.4360, 512.53),
    "Libya": (0.4496, 0.5494, 8.7382, 502.36),
    "Nigeria": (0.4553, 0.5437, 8.8888, 508.90),
    "Saudi Arabia": (0.5391, 0.4599, 5.0903, 546.14),
    "UAE": (0.5155, 0.4835, 5.1511, 575.59),
}
DCC_A, DCC_B, DCC_LL, CCC_LL = 0.1016, 0.8207, 7486.96, 7364.19
GO_LL = 7351.5
RHO_EUCLIDEAN, RHO_GO = 0.952, 0.922
RMSFE_NET_GO, RMSFE_STD_DCC = 2.4182, 2.3854
MCS_RETAINED = {"Std-DCC", "Net-GO", "Net-CCC", "Net-DCC", "Std-CCC"}


def row_stochastic(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.uniform(0.2, 1.0, (n, n))
    M = (M + M.T) / 2
    np.fill_diagonal(M, 0.0)
    return M / M.sum(axis=1, keepdims=True)


@pytest.fixture(scope="module")
def opec_fits(opec_returns):
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        uni = fit_univariate(opec_returns, seed=0)
        uni_time = time.perf_counter() - start
        ccc = fit_ccc(opec_returns, uni_fits=uni)
        dcc = fit_dcc(opec_returns, uni_fits=uni, seed=0)
    return {"uni": uni, "ccc": ccc, "dcc": dcc, "uni_time": uni_time, "total_time": time.perf_counter() - start}


@pytest.fixture(scope="module")
def opec_go(opec_returns):
    return fit_gogarch(opec_returns, seed=0)


@pytest.fixture(scope="module")
def opec_losses(opec_returns):
    start = time.perf_counter()
    cfg = RollingConfig(T0=300, seed=0, n_jobs=os.cpu_count() or 1)
    lp = rolling_forecast(opec_returns, cfg)
    lp.check_completeness(cfg.min_completeness)
    return lp, time.perf_counter() - start


# --- 1 ---------------------------------------------------------------------

@pytest.mark.criterion(1, "descriptive statistics and correlations")
def test_descriptive_statistics(opec_returns):
    start = time.perf_counter()
    stats = [describe(opec_returns.returns[:, i], c) for i, c in enumerate(COUNTRIES)]
    corr = correlation_matrix(opec_returns)
    elapsed = time.perf_counter() - start
    for s in stats:
        mean, median, sd, lo, hi, skew, kurt = TABLE_STATS[s.label]
        np.testing.assert_allclose([s.mean, s.median, s.std_dev, s.minimum, s.maximum], [mean, median, sd, lo, hi],
                                   atol=1e-6, err_msg=s.label)
        np.testing.assert_allclose([s.skewness, s.kurtosis], [skew, kurt], atol=1e-4, err_msg=s.label)
    np.testing.assert_allclose(corr, TABLE_CORR, atol=1e-4)
    assert elapsed < 1.0


# --- 2 ---------------------------------------------------------------------

@pytest.mark.criterion(2, "univariate GARCH(1,1)-t per country")
def test_univariate_garch(opec_fits):
    for country, fit in zip(COUNTRIES, opec_fits["uni"]):
        alpha, beta, nu, ll = TABLE_GARCH[country]
        p = fit.params
        assert abs(p.alpha[0] - alpha) <= 0.02, country
        assert abs(p.beta[0] - beta) <= 0.02, country
        assert abs(p.nu - nu) <= 0.5, country
        assert abs(fit.log_lik - ll) <= 1.0, country
    assert opec_fits["uni_time"] < 30.0


# --- 3 ---------------------------------------------------------------------

@pytest.mark.criterion(3, "DCC parameters and likelihood")
def test_dcc(opec_fits):
    dcc, ccc = opec_fits["dcc"], opec_fits["ccc"]
    assert abs(dcc.a - DCC_A) <= 0.01
    assert abs(dcc.b - DCC_B) <= 0.02
    assert abs(dcc.log_lik - DCC_LL) <= 5.0
    assert dcc.log_lik > ccc.log_lik
    assert opec_fits["total_time"] < 120.0


# --- 4 ---------------------------------------------------------------------

@pytest.mark.criterion(4, "GO-GARCH likelihood and rotation recovery")
def test_gogarch_likelihood(opec_go):
    assert abs(opec_go.log_lik - GO_LL) <= 10.0


@pytest.mark.criterion(4, "GO-GARCH likelihood and rotation recovery")
def test_gogarch_rotation_recovery():
    alpha = np.array([0.05, 0.15, 0.30])
    beta = np.array([0.93, 0.75, 0.50])
    worst = []
    for seed in range(10):
        U = givens_rotation(np.random.default_rng(100 + seed).uniform(-np.pi, np.pi, 3), 3)
        Z = np.diag([2.0, 1.0, 0.5]) @ U
        r, _ = simulate_gogarch(Z, 1 - alpha - beta, alpha, beta, 3000, seed=seed)
        fit = fit_gogarch(r, seed=seed)
        # true rotation expressed in the fitted whitening coordinates
        implied = np.diag(1 / np.sqrt(fit.A_eig)) @ fit.P_eig.T @ Z
        _, angles = match_columns(implied, fit.U)
        worst.append(angles.max())
    print(f"median worst-column angle {np.median(worst):.2f} deg")
    assert np.median(worst) < 5.0


# --- 5 ---------------------------------------------------------------------

def _rho_recovery_rate(seeds=50):
    W = row_stochastic(6, 0)
    hits = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for seed in range(seeds):
            sim = simulate_net_logarch(NetSimSpec(W, 2000, 0.5, 0.2, -1.0, seed=seed))
            fit = fit_gmm(sim.ystar, W)
            hits += abs(fit.rho - 0.5) <= 2 * fit.rho_se
    return hits / seeds


@pytest.mark.criterion(5, "network GMM rho")
def test_network_gmm_monte_carlo_recovery():
    rate = _rho_recovery_rate()
    print(f"rho within 2 SE in {100 * rate:.0f}% of seeds")
    assert rate >= 0.90


@pytest.mark.criterion(5, "network GMM rho")
def test_network_gmm_on_opec(opec_returns, opec_go):
    ys = log_square_transform(opec_returns)
    matches = []
    for scheme in ("row_stochastic", "spectral", "none"):
        rho_e = fit_gmm(ys, build_weights(opec_returns, "euclidean", scheme=scheme)).rho
        rho_g = fit_gmm(ys, build_weights(opec_returns, "go", opec_go, scheme=scheme)).rho
        print(f"{scheme}: euclidean rho {rho_e:.4f} (table {RHO_EUCLIDEAN}), go rho {rho_g:.4f} (table {RHO_GO})")
        if 0.90 <= rho_e <= 1.00 and 0.87 <= rho_g <= 0.97:
            matches.append(scheme)
    if matches:
        print(f"matching normalization: {', '.join(matches)}")
    else:
        print("no normalization matches; Monte-Carlo recovery governs")
        assert _rho_recovery_rate() >= 0.90


# --- 6 ---------------------------------------------------------------------

@pytest.mark.criterion(6, "baseline forecast ordering and RMSFE levels")
def test_forecast_ordering(opec_losses):
    lp, elapsed = opec_losses
    r = {m: rmsfe_mafe(lp, m)[0] for m in lp.models}
    print("RMSFE: " + ", ".join(f"{m}={v:.4f}" for m, v in sorted(r.items(), key=lambda kv: kv[1])))
    assert abs(r["Net-GO"] / RMSFE_NET_GO - 1) <= 0.05
    assert abs(r["Std-DCC"] / RMSFE_STD_DCC - 1) <= 0.05
    assert r["Std-DCC"] < r["Net-GO"]
    assert r["Net-GO"] <= r["Net-CCC"] and r["Net-GO"] <= r["Net-DCC"]
    assert max(r["Net-CCC"], r["Net-DCC"]) < r["Std-CCC"]
    assert r["Std-CCC"] < r["Net-Euclidean"] < r["Net-Correlation"]
    assert r["Net-Correlation"] < min(r["Net-Piccolo"], r["Std-GO"])
    assert abs(r["Net-Piccolo"] / r["Std-GO"] - 1) <= 0.05
    assert elapsed < 1800.0


# --- 7 ---------------------------------------------------------------------

@pytest.mark.criterion(7, "DM tests and model confidence set")
def test_inference_battery(opec_losses):
    lp, _ = opec_losses
    assert dm_test(lp.errors("Net-GO"), lp.errors("Std-GO")).p_value < 0.01
    assert dm_test(lp.errors("Net-GO"), lp.errors("Std-CCC")).p_value < 0.01
    for a, b in (("Net-CCC", "Net-DCC"), ("Net-CCC", "Net-GO"), ("Net-DCC", "Net-GO")):
        assert dm_test(lp.errors(a), lp.errors(b)).p_value > 0.05, (a, b)
    res = mcs(loss_matrix(lp), lp.models, alpha=0.05, B=5000, seed=0)
    print(res.to_dict())
    assert set(res.superior_set()) == MCS_RETAINED
    assert res.mcs_p_M[res.models.index("Std-DCC")] == 1.0


# --- 8 ---------------------------------------------------------------------

@pytest.mark.criterion(8, "property suites and Monte-Carlo size")
def test_dm_size_under_null():
    rng = np.random.default_rng(2024)
    rejections = 0
    for _ in range(1000):
        e1, e2 = rng.standard_normal((2, 200))
        rejections += dm_test(e1, e2).p_value < 0.05
    rate = rejections / 1000
    print(f"DM size {rate:.3f}")
    assert 0.03 <= rate <= 0.07


@pytest.mark.criterion(8, "property suites and Monte-Carlo size")
def test_cw_size_with_pure_noise_regressor():
    # the large model adds a regressor independent of the target
    rng = np.random.default_rng(7)
    rejections = 0
    for _ in range(1000):
        y = rng.standard_normal(200)
        small = np.zeros(200)
        big = 0.5 * rng.standard_normal(200)
        rejections += cw_test(y - small, y - big, small, big).p_value < 0.05
    rate = rejections / 1000
    print(f"CW size {rate:.3f}")
    assert 0.03 <= rate <= 0.07


@pytest.mark.criterion(8, "property suites and Monte-Carlo size")
def test_mcs_retains_true_best_model():
    rng = np.random.default_rng(11)
    gaps = np.array([[0.0], [0.15], [0.3], [0.6]])
    kept = 0
    for k in range(500):
        L = rng.chisquare(1, (4, 150)) + gaps
        kept += "M1" in mcs(L, B=300, seed=k).superior_set()
    print(f"best model retained in {kept}/500 panels")
    assert kept >= 475
