"""CCC-, DCC- and GO-GARCH estimation.

CCC and DCC are estimated in two steps: univariate GARCH fits per series,
then the correlation structure given the standardized residuals.  The joint
likelihood is multivariate Student-t with a single common shape parameter
estimated in the second step (Gaussian when the univariate fits are).

GO-GARCH whitens the demeaned returns with the eigendecomposition of their
sample covariance and estimates the orthogonal rotation (Givens angles)
jointly with the Gaussian GARCH(1,1) parameters of the latent factors.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize, signal, stats
from scipy.optimize import linear_sum_assignment
from scipy.special import gammaln
from statsmodels.tools.numdiff import approx_hess3

from .data import ReturnPanel
from .garch_uni import GarchError, GarchFit, GarchSpec, fit_garch

__all__ = [
    "MGarchError",
    "MGarchWarning",
    "CccFit",
    "DccFit",
    "GoGarchFit",
    "fit_univariate",
    "fit_ccc",
    "fit_dcc",
    "fit_gogarch",
    "mgarch_variance_forecast",
    "givens_rotation",
    "dcc_correlations",
    "match_columns",
]


class MGarchError(ValueError):
    pass


class MGarchWarning(UserWarning):
    pass


def _as_array(r: ReturnPanel | np.ndarray) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(r, ReturnPanel):
        return np.asarray(r.returns), r.labels
    x = np.asarray(r, dtype=float)
    return x, tuple(f"S{i + 1}" for i in range(x.shape[1]))


def _cov_to_corr(Q: np.ndarray) -> np.ndarray:
    d = np.sqrt(np.einsum("...ii->...i", Q))
    R = Q / (d[..., :, None] * d[..., None, :])
    R = 0.5 * (R + np.swapaxes(R, -1, -2))
    idx = np.arange(Q.shape[-1])
    R[..., idx, idx] = 1.0
    return R


def _nearest_psd_corr(R: np.ndarray, floor: float = 0.0) -> np.ndarray:
    w, v = np.linalg.eigh(R)
    return _cov_to_corr((v * np.clip(w, floor, None)) @ v.T)


def _mvt_loglik(eps: np.ndarray, log_h_sum: np.ndarray, R: np.ndarray, nu: float | None) -> float:
    """Joint log-likelihood of standardized residuals ``eps`` (T, n).

    ``R`` is (n, n) or (T, n, n); ``log_h_sum`` is sum_i ln h_it per period.
    """
    T, n = eps.shape
    if R.ndim == 2:
        sign, logdet = np.linalg.slogdet(R)
        if sign <= 0:
            return -np.inf
        quad = np.einsum("ti,ij,tj->t", eps, np.linalg.inv(R), eps)
        logdet = np.full(T, logdet)
    else:
        sign, logdet = np.linalg.slogdet(R)
        if np.any(sign <= 0):
            return -np.inf
        sol = np.linalg.solve(R, eps[:, :, None])[:, :, 0]
        quad = np.einsum("ti,ti->t", eps, sol)
    if nu is None:
        ll = -0.5 * (n * np.log(2 * np.pi) + log_h_sum + logdet + quad)
    else:
        c = gammaln((nu + n) / 2) - gammaln(nu / 2) - 0.5 * n * np.log(np.pi * (nu - 2))
        ll = c - 0.5 * (log_h_sum + logdet) - 0.5 * (nu + n) * np.log1p(quad / (nu - 2))
    total = float(np.sum(ll))
    return total if np.isfinite(total) else -np.inf


def fit_univariate(
    r: ReturnPanel | np.ndarray, spec: GarchSpec | None = None, *, seed: int = 0
) -> list[GarchFit]:
    """Stage-1 GARCH fits, one per column; failures name the series."""
    x, labels = _as_array(r)
    fits = []
    for i, label in enumerate(labels):
        try:
            fits.append(fit_garch(x[:, i], spec, seed=seed + i, label=label))
        except (GarchError, RuntimeError) as exc:
            raise type(exc)(f"stage-1 fit failed for series {label!r}: {exc}") from exc
    return fits


def _stage1(r, spec, uni_fits, seed):
    x, labels = _as_array(r)
    if x.shape[1] < 2:
        raise MGarchError("multivariate models need at least two series")
    fits = list(uni_fits) if uni_fits is not None else fit_univariate(r, spec, seed=seed)
    eps = np.column_stack([f.standardized_residuals for f in fits])
    log_h_sum = np.sum(np.log(np.column_stack([f.h_path for f in fits])), axis=1)
    return x, labels, fits, eps, log_h_sum


def _uses_t(fits: Sequence[GarchFit]) -> bool:
    return fits[0].spec.innovation == "student_t"


def _fit_common_nu(eps, log_h_sum, R) -> tuple[float, float]:
    res = optimize.minimize_scalar(
        lambda lnu: -_mvt_loglik(eps, log_h_sum, R, 2.0 + np.exp(lnu)),
        bounds=(np.log(0.05), np.log(300.0)), method="bounded",
        options={"xatol": 1e-10},
    )
    nu = 2.0 + float(np.exp(res.x))
    return nu, _mvt_loglik(eps, log_h_sum, R, nu)


@dataclass
class CccFit:
    uni: list[GarchFit]
    R: np.ndarray
    log_lik: float
    nu: float | None
    n_obs: int
    labels: tuple[str, ...]

    @property
    def n_params(self) -> int:
        n = len(self.uni)
        return sum(f.spec.n_params for f in self.uni) + n * (n - 1) // 2 + (self.nu is not None)

    @property
    def aic(self) -> float:
        return (-2.0 * self.log_lik + 2.0 * self.n_params) / self.n_obs

    @property
    def bic(self) -> float:
        return (-2.0 * self.log_lik + np.log(self.n_obs) * self.n_params) / self.n_obs

    @property
    def R_path(self) -> np.ndarray:
        return np.broadcast_to(self.R, (self.n_obs, *self.R.shape))

    def to_dict(self) -> dict:
        return {
            "model": "ccc",
            "labels": list(self.labels),
            "univariate": [f.to_dict() for f in self.uni],
            "R": self.R.tolist(),
            "shape": self.nu,
            "log_lik": self.log_lik,
            "aic": self.aic,
            "bic": self.bic,
            "n_params": self.n_params,
        }


def fit_ccc(
    r: ReturnPanel | np.ndarray,
    spec: GarchSpec | None = None,
    *,
    uni_fits: Sequence[GarchFit] | None = None,
    seed: int = 0,
) -> CccFit:
    """Constant conditional correlation GARCH.

    ``R`` is the correlation implied by the uncentered second moment of the
    standardized residuals, the same matrix DCC uses as its intercept.
    """
    x, labels, fits, eps, log_h_sum = _stage1(r, spec, uni_fits, seed)
    T = x.shape[0]
    R = _cov_to_corr(eps.T @ eps / T)
    w = np.linalg.eigvalsh(R)
    if w[0] < -1e-12:
        warnings.warn("CCC correlation matrix not PSD; projected to nearest PSD", MGarchWarning, stacklevel=2)
        R = _nearest_psd_corr(R)
        w = np.linalg.eigvalsh(R)
    if w[0] < 1e-10 * w[-1]:
        warnings.warn(
            "CCC correlation matrix is (near) singular; joint likelihood undefined",
            MGarchWarning, stacklevel=2,
        )
        return CccFit(fits, R, float("nan"), None, T, labels)
    if _uses_t(fits):
        nu, ll = _fit_common_nu(eps, log_h_sum, R)
    else:
        nu, ll = None, _mvt_loglik(eps, log_h_sum, R, None)
    return CccFit(fits, R, ll, nu, T, labels)


def dcc_correlations(eps: np.ndarray, a: float, b: float, Qbar: np.ndarray | None = None):
    """DCC recursion started at ``Qbar``; returns ``(Q_path, R_path)``."""
    T, n = eps.shape
    if Qbar is None:
        Qbar = eps.T @ eps / T
    Q = np.empty((T, n, n))
    Q[0] = Qbar
    if T > 1:
        outer = eps[:-1, :, None] * eps[:-1, None, :]
        x = (1.0 - a - b) * Qbar + a * outer
        Q[1:], _ = signal.lfilter([1.0], [1.0, -b], x, axis=0, zi=(b * Qbar)[None])
    return Q, _cov_to_corr(Q)


@dataclass
class DccFit:
    uni: list[GarchFit]
    a: float
    b: float
    nu: float | None
    Qbar: np.ndarray
    Q_last: np.ndarray
    R_path: np.ndarray
    eps: np.ndarray
    log_lik: float
    n_obs: int
    labels: tuple[str, ...]
    std_errors: np.ndarray = field(default_factory=lambda: np.full(2, np.nan))
    p_values: np.ndarray = field(default_factory=lambda: np.full(2, np.nan))
    boundary: bool = False

    @property
    def n_params(self) -> int:
        n = len(self.uni)
        return (sum(f.spec.n_params for f in self.uni) + n * (n - 1) // 2 + 2
                + (self.nu is not None))

    @property
    def aic(self) -> float:
        return (-2.0 * self.log_lik + 2.0 * self.n_params) / self.n_obs

    @property
    def bic(self) -> float:
        return (-2.0 * self.log_lik + np.log(self.n_obs) * self.n_params) / self.n_obs

    @property
    def R_mean(self) -> np.ndarray:
        return _cov_to_corr_mean(self.R_path)

    def next_correlation(self) -> np.ndarray:
        e = self.eps[-1]
        Q = (1 - self.a - self.b) * self.Qbar + self.a * np.outer(e, e) + self.b * self.Q_last
        return _cov_to_corr(Q)

    def to_dict(self, include_path: bool = False) -> dict:
        out = {
            "model": "dcc",
            "labels": list(self.labels),
            "univariate": [f.to_dict() for f in self.uni],
            "a": self.a,
            "b": self.b,
            "a_se": float(self.std_errors[0]),
            "b_se": float(self.std_errors[1]),
            "a_p": float(self.p_values[0]),
            "b_p": float(self.p_values[1]),
            "shape": self.nu,
            "Qbar": self.Qbar.tolist(),
            "R_mean": self.R_mean.tolist(),
            "log_lik": self.log_lik,
            "aic": self.aic,
            "bic": self.bic,
            "n_params": self.n_params,
            "boundary": self.boundary,
        }
        if include_path:
            out["R_path"] = self.R_path.tolist()
        return out


def _cov_to_corr_mean(R_path: np.ndarray) -> np.ndarray:
    Rm = R_path.mean(axis=0)
    Rm = 0.5 * (Rm + Rm.T)
    np.fill_diagonal(Rm, 1.0)
    return Rm


def _ab_from_z(z):
    logits = np.array([z[0], z[1], 0.0])
    w = np.exp(logits - logits.max())
    w /= w.sum()
    return w[0], w[1]


def _z_from_ab(a, b):
    rest = max(1.0 - a - b, 1e-8)
    return [np.log(max(a, 1e-8) / rest), np.log(max(b, 1e-8) / rest)]


def fit_dcc(
    r: ReturnPanel | np.ndarray,
    spec: GarchSpec | None = None,
    *,
    uni_fits: Sequence[GarchFit] | None = None,
    fix_ab: tuple[float, float] | None = None,
    seed: int = 0,
) -> DccFit:
    """Dynamic conditional correlation GARCH (two-step).

    Parameters
    ----------
    r : ReturnPanel or ndarray
        Returns, T by n with n >= 2.
    spec : GarchSpec, optional
        Univariate specification for stage 1.
    uni_fits : sequence of GarchFit, optional
        Reuse existing stage-1 fits instead of re-estimating.
    fix_ab : (float, float), optional
        Hold ``(a, b)`` fixed; only the common shape is estimated.
    seed : int
        Seed forwarded to the stage-1 fits.
    """
    x, labels, fits, eps, log_h_sum = _stage1(r, spec, uni_fits, seed)
    T, n = eps.shape
    Qbar = eps.T @ eps / T
    use_t = _uses_t(fits)

    def ll_ab(a, b, nu):
        if a < 0 or b < 0 or a + b >= 1:
            return -np.inf
        _, R = dcc_correlations(eps, a, b, Qbar)
        return _mvt_loglik(eps, log_h_sum, R, nu)

    def unpack(z):
        a, b = (fix_ab if fix_ab is not None else _ab_from_z(z[:2]))
        nu = 2.0 + np.exp(z[-1]) if use_t else None
        return a, b, nu

    def objective(z):
        v = ll_ab(*unpack(z))
        return 1e10 if not np.isfinite(v) else -v / T

    best = None
    if fix_ab is not None:
        grid = [fix_ab]
    else:
        grid = list(itertools.product((0.01, 0.05, 0.1), (0.5, 0.8, 0.9, 0.95)))
    nu0 = 8.0
    for a0, b0 in grid:
        v = ll_ab(a0, b0, nu0 if use_t else None)
        if best is None or v > best[0]:
            best = (v, a0, b0)
    z0 = ([] if fix_ab is not None else _z_from_ab(best[1], best[2])) + ([np.log(nu0 - 2)] if use_t else [])
    z0 = np.asarray(z0, dtype=float)
    if z0.size:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = optimize.minimize(objective, z0, method="BFGS", options={"gtol": 1e-8, "maxiter": 1000})
            res2 = optimize.minimize(objective, res.x, method="Nelder-Mead",
                                     options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        zbest = res2.x if res2.fun <= res.fun else res.x
        if not np.isfinite(min(res.fun, res2.fun)) or min(res.fun, res2.fun) >= 1e10:
            raise MGarchError("DCC optimizer failed to find a finite likelihood")
    else:
        zbest = z0
    a, b, nu = unpack(zbest)
    a, b = float(a), float(b)
    log_lik = ll_ab(a, b, nu)
    if not np.isfinite(log_lik):
        raise MGarchError("DCC optimizer failed to find a finite likelihood")

    se = np.full(2, np.nan)
    pv = np.full(2, np.nan)
    boundary = fix_ab is None and (a + b > 1 - 1e-4 or min(a, b) < 1e-5)
    if fix_ab is None and not boundary:
        def f_nat(v):
            return ll_ab(v[0], v[1], (v[2] if use_t else None))
        v0 = np.array([a, b] + ([nu] if use_t else []))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            H = approx_hess3(v0, f_nat)
        try:
            cov = np.linalg.inv(-H)
            se = np.sqrt(np.abs(np.diag(cov)))[:2]
            pv = 2 * stats.norm.sf(np.abs(np.array([a, b]) / se))
        except np.linalg.LinAlgError:
            pass
    if boundary:
        warnings.warn("DCC estimate on the boundary (a + b -> 1 or a parameter -> 0)", MGarchWarning, stacklevel=2)
    Q, R = dcc_correlations(eps, a, b, Qbar)
    return DccFit(
        uni=fits, a=a, b=b, nu=(float(nu) if use_t else None), Qbar=Qbar, Q_last=Q[-1],
        R_path=R, eps=eps, log_lik=float(log_lik), n_obs=T, labels=labels,
        std_errors=se, p_values=pv, boundary=bool(boundary),
    )


def _givens_factors(angles: np.ndarray, n: int) -> list[np.ndarray]:
    out = []
    for k, (i, j) in enumerate(itertools.combinations(range(n), 2)):
        c, s = np.cos(angles[k]), np.sin(angles[k])
        G = np.eye(n)
        G[i, i] = G[j, j] = c
        G[j, i], G[i, j] = s, -s
        out.append(G)
    return out


def givens_rotation(angles: Sequence[float], n: int) -> np.ndarray:
    """Orthogonal matrix as the ordered product of n(n-1)/2 plane rotations."""
    angles = np.asarray(angles, dtype=float)
    if angles.size != n * (n - 1) // 2:
        raise MGarchError(f"need {n * (n - 1) // 2} angles for n={n}")
    U = np.eye(n)
    for G in _givens_factors(angles, n):
        U = U @ G
    return U


def _givens_jacobian(angles: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Rotation and its derivative with respect to every angle, shape (m, n, n)."""
    Gs = _givens_factors(angles, n)
    m = len(Gs)
    prefix = [np.eye(n)]
    for G in Gs:
        prefix.append(prefix[-1] @ G)
    suffix = [np.eye(n)]
    for G in reversed(Gs):
        suffix.append(G @ suffix[-1])
    suffix = suffix[::-1]
    dU = np.empty((m, n, n))
    for k, (i, j) in enumerate(itertools.combinations(range(n), 2)):
        c, s = np.cos(angles[k]), np.sin(angles[k])
        dG = np.zeros((n, n))
        dG[i, i] = dG[j, j] = -s
        dG[j, i], dG[i, j] = c, -c
        dU[k] = prefix[k] @ dG @ suffix[k + 1]
    return prefix[-1], dU


def _factor_variances(f: np.ndarray, omega, alpha, beta) -> np.ndarray:
    """GARCH(1,1) variances for every factor column at once.

    Pre-sample squared factor is its sample mean; pre-sample variance the
    unconditional one.
    """
    T, n = f.shape
    f2 = f * f
    pre = f2.mean(axis=0)
    h = np.empty((T, n))
    for i in range(n):
        h0 = omega[i] / (1.0 - alpha[i] - beta[i])
        x = omega[i] + alpha[i] * np.concatenate([[pre[i]], f2[:-1, i]])
        h[:, i], _ = signal.lfilter([1.0], [1.0, -beta[i]], x, zi=[beta[i] * h0])
    return h


def _factor_loglik_grad(f, omega, alpha, beta):
    """Gaussian factor log-likelihood (without constants) and its gradient.

    Returns ``(ll, d_f, d_omega, d_alpha, d_beta)`` computed by a reverse
    (adjoint) pass through the variance recursion.
    """
    T, n = f.shape
    f2 = f * f
    pre = f2.mean(axis=0)
    h = _factor_variances(f, omega, alpha, beta)
    ll = -0.5 * float(np.sum(np.log(h) + f2 / h))
    g = -0.5 * (1.0 / h - f2 / h**2)
    lam = np.empty_like(g)
    for i in range(n):
        lam[::-1, i] = signal.lfilter([1.0], [1.0, -beta[i]], g[::-1, i])
    persist = 1.0 - alpha - beta
    hbar = omega / persist
    lam0 = lam[0]
    d_omega = lam.sum(axis=0) + lam0 * beta / persist
    d_alpha = np.sum(lam[1:] * f2[:-1], axis=0) + lam0 * (pre + beta * omega / persist**2)
    d_beta = np.sum(lam[1:] * h[:-1], axis=0) + lam0 * (hbar + beta * omega / persist**2)
    d_f = -f / h
    d_f[:-1] += 2.0 * alpha * f[:-1] * lam[1:]
    d_f += 2.0 * alpha * f * lam0 / T
    return ll, d_f, d_omega, d_alpha, d_beta


@dataclass
class GoGarchFit:
    mu: np.ndarray
    P_eig: np.ndarray
    A_eig: np.ndarray
    U: np.ndarray
    Z: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    factors: np.ndarray
    H_path: np.ndarray
    log_lik: float
    n_obs: int
    labels: tuple[str, ...]
    converged: bool = True

    @property
    def n_params(self) -> int:
        return 3 * self.U.shape[0]

    @property
    def aic(self) -> float:
        return (-2.0 * self.log_lik + 2.0 * self.n_params) / self.n_obs

    @property
    def bic(self) -> float:
        return (-2.0 * self.log_lik + np.log(self.n_obs) * self.n_params) / self.n_obs

    @property
    def Sigma_path(self) -> np.ndarray:
        return np.einsum("ik,tk,jk->tij", self.Z, self.H_path, self.Z)

    @property
    def R_path(self) -> np.ndarray:
        return _cov_to_corr(self.Sigma_path)

    @property
    def R_mean(self) -> np.ndarray:
        return _cov_to_corr_mean(self.R_path)

    def next_factor_variances(self) -> np.ndarray:
        f_last = self.factors[-1]
        return self.omega + self.alpha * f_last**2 + self.beta * self.H_path[-1]

    def to_dict(self, include_path: bool = False) -> dict:
        out = {
            "model": "gogarch",
            "labels": list(self.labels),
            "mu": self.mu.tolist(),
            "U": self.U.tolist(),
            "Z": self.Z.tolist(),
            "eigenvalues": self.A_eig.tolist(),
            "omega": self.omega.tolist(),
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "log_lik": self.log_lik,
            "aic": self.aic,
            "bic": self.bic,
            "n_params": self.n_params,
            "R_mean": self.R_mean.tolist(),
            "converged": self.converged,
        }
        if include_path:
            out["R_path"] = self.R_path.tolist()
        return out


def _go_unpack(z: np.ndarray, n: int):
    m = n * (n - 1) // 2
    angles = z[:m]
    g = z[m:].reshape(n, 3)
    omega = np.exp(g[:, 0])
    logits = np.column_stack([g[:, 1], g[:, 2], np.zeros(n)])
    w = np.exp(logits - logits.max(axis=1, keepdims=True))
    w /= w.sum(axis=1, keepdims=True)
    return angles, omega, w[:, 0], w[:, 1]


def _canonical(U: np.ndarray, A_sqrt_P: np.ndarray, omega, alpha, beta):
    """Fix column signs (largest |entry| positive) and order by factor loading norm."""
    U = U.copy()
    for j in range(U.shape[1]):
        if U[np.argmax(np.abs(U[:, j])), j] < 0:
            U[:, j] = -U[:, j]
    Z = A_sqrt_P @ U
    order = np.argsort(-np.sum(Z**2, axis=0), kind="stable")
    return U[:, order], omega[order], alpha[order], beta[order]


def _fobi_rotation(s: np.ndarray) -> np.ndarray:
    """Fourth-order blind separation of whitened data, used as a start."""
    wts = np.sum(s * s, axis=1)
    _, V = np.linalg.eigh((s * wts[:, None]).T @ s / s.shape[0])
    return V


def fit_gogarch(
    r: ReturnPanel | np.ndarray,
    *,
    n_starts: int = 4,
    seed: int = 0,
) -> GoGarchFit:
    """Generalized orthogonal GARCH with Gaussian GARCH(1,1) factors.

    Raises
    ------
    MGarchError
        For n < 2, a rank-deficient covariance, or optimizer failure.
    """
    x, labels = _as_array(r)
    if x.ndim != 2 or x.shape[1] < 2:
        raise MGarchError("GO-GARCH needs at least two series (factor rotation undefined for n=1)")
    T, n = x.shape
    mu = x.mean(axis=0)
    xc = x - mu
    S = xc.T @ xc / T
    A, P = np.linalg.eigh(S)
    A, P = A[::-1], P[:, ::-1]
    if A[-1] <= 1e-12 * A[0]:
        raise MGarchError("sample covariance is rank deficient")
    s = xc @ P / np.sqrt(A)
    m = n * (n - 1) // 2
    const = -0.5 * T * (n * np.log(2 * np.pi) + np.sum(np.log(A)))

    def value_grad(z, s0):
        angles, omega, alpha, beta = _go_unpack(z, n)
        U, dU = _givens_jacobian(angles, n)
        f = s0 @ U
        ll, d_f, d_om, d_al, d_be = _factor_loglik_grad(f, omega, alpha, beta)
        if not np.isfinite(ll):
            return 1e10, np.zeros_like(z)
        grad = np.empty_like(z)
        grad[:m] = np.einsum("ij,kij->k", s0.T @ d_f, dU)
        gg = grad[m:].reshape(n, 3)
        gg[:, 0] = d_om * omega
        gg[:, 1] = d_al * alpha * (1 - alpha) - d_be * alpha * beta
        gg[:, 2] = -d_al * alpha * beta + d_be * beta * (1 - beta)
        return -(const + ll) / T, -grad / T

    # the rotation is searched as U0 @ U(angles) from several base rotations U0
    rng = np.random.default_rng(seed)
    bases = [_fobi_rotation(s), np.eye(n)]
    while len(bases) < n_starts:
        bases.append(givens_rotation(rng.uniform(-np.pi, np.pi, m), n))
    g0 = np.tile([np.log(0.05), np.log(0.1 / 0.05), np.log(0.85 / 0.05)], n)
    best, best_U0 = None, None
    for U0 in bases[:max(n_starts, 1)]:
        z0 = np.concatenate([np.zeros(m), g0])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = optimize.minimize(value_grad, z0, args=(s @ U0,), jac=True, method="L-BFGS-B",
                                    options={"maxiter": 5000, "ftol": 1e-14, "gtol": 1e-9})
        if best is None or res.fun < best.fun:
            best, best_U0 = res, U0
    if best is None or not np.isfinite(best.fun) or best.fun >= 1e10:
        raise MGarchError("GO-GARCH optimizer failed to find a finite likelihood")
    angles, omega, alpha, beta = _go_unpack(best.x, n)
    U = best_U0 @ givens_rotation(angles, n)
    Ah_P = P * np.sqrt(A)
    U, omega, alpha, beta = _canonical(U, Ah_P, omega, alpha, beta)
    Z = Ah_P @ U
    f = s @ U
    h = _factor_variances(f, omega, alpha, beta)
    ll = const - 0.5 * float(np.sum(np.log(h) + f * f / h))
    return GoGarchFit(
        mu=mu, P_eig=P, A_eig=A, U=U, Z=Z, omega=omega, alpha=alpha, beta=beta,
        factors=f, H_path=h, log_lik=ll, n_obs=T, labels=labels,
        converged=bool(best.success or best.status == 2),
    )


def match_columns(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Match columns of ``B`` to ``A`` up to sign and permutation.

    Returns the permutation of ``B``'s columns and the angles (degrees)
    between matched column directions.
    """
    An = A / np.linalg.norm(A, axis=0)
    Bn = B / np.linalg.norm(B, axis=0)
    cos = np.abs(An.T @ Bn)
    rows, cols = linear_sum_assignment(-cos)
    ang = np.degrees(np.arccos(np.clip(cos[rows, cols], -1.0, 1.0)))
    return cols, ang


def mgarch_variance_forecast(fit: CccFit | DccFit | GoGarchFit, horizon: int = 1) -> np.ndarray:
    """One-step-ahead conditional variance of every series."""
    if horizon != 1:
        raise MGarchError("only one-step-ahead forecasts are supported")
    if isinstance(fit, (CccFit, DccFit)):
        return np.array([f.forecast_variance() for f in fit.uni])
    if isinstance(fit, GoGarchFit):
        h = fit.next_factor_variances()
        return np.einsum("ik,k,ik->i", fit.Z, h, fit.Z)
    raise TypeError(f"unsupported fit type {type(fit).__name__}")
