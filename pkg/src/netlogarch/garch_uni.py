"""Univariate GARCH(p, q) with Gaussian or Student-t innovations, and log-ARCH.

Estimation runs on the series rescaled to unit sample standard deviation and
maps the results back, so the optimizer sees well-conditioned parameters
whatever the units of the data.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np
from scipy import optimize, signal, stats
from scipy.special import gammaln
from statsmodels.tools.numdiff import approx_fprime, approx_hess3

from .netarch import ZeroAdjust, log_square_transform

__all__ = [
    "GarchError",
    "GarchConvergenceError",
    "GarchWarning",
    "GarchSpec",
    "GarchParams",
    "GarchFit",
    "LogArchFit",
    "fit_garch",
    "garch_filter",
    "garch_loglik",
    "fit_log_arch",
    "simulate_garch",
]


class GarchError(ValueError):
    pass


class GarchConvergenceError(RuntimeError):
    """Optimizer failed after all restarts; ``best`` holds the best point seen."""

    def __init__(self, message: str, best: "GarchParams | None" = None, loglik: float = -np.inf):
        super().__init__(message)
        self.best = best
        self.loglik = loglik


class GarchWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GarchSpec:
    p: int = 1
    q: int = 1
    mean: Literal["zero", "constant"] = "constant"
    innovation: Literal["gaussian", "student_t"] = "student_t"

    def __post_init__(self) -> None:
        if self.p < 1 or self.q < 0:
            raise GarchError("need p >= 1 and q >= 0")
        if self.mean not in ("zero", "constant"):
            raise GarchError(f"unknown mean specification {self.mean!r}")
        if self.innovation not in ("gaussian", "student_t"):
            raise GarchError(f"unknown innovation law {self.innovation!r}")

    @property
    def n_params(self) -> int:
        return (self.mean == "constant") + 1 + self.p + self.q + (self.innovation == "student_t")

    def param_names(self) -> list[str]:
        names = ["mu"] if self.mean == "constant" else []
        names.append("omega")
        names += [f"alpha[{i + 1}]" for i in range(self.p)]
        names += [f"beta[{j + 1}]" for j in range(self.q)]
        if self.innovation == "student_t":
            names.append("nu")
        return names


@dataclass(frozen=True)
class GarchParams:
    mu: float
    omega: float
    alpha: tuple[float, ...]
    beta: tuple[float, ...] = ()
    nu: float | None = None

    @property
    def persistence(self) -> float:
        return float(sum(self.alpha) + sum(self.beta))

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.persistence)

    def spec(self) -> GarchSpec:
        return GarchSpec(
            len(self.alpha), len(self.beta), "constant",
            "gaussian" if self.nu is None else "student_t",
        )

    def to_vector(self, spec: GarchSpec) -> np.ndarray:
        v = [self.mu] if spec.mean == "constant" else []
        v += [self.omega, *self.alpha, *self.beta]
        if spec.innovation == "student_t":
            v.append(self.nu)
        return np.asarray(v, dtype=float)

    @classmethod
    def from_vector(cls, v: Sequence[float], spec: GarchSpec) -> "GarchParams":
        v = list(map(float, v))
        k = 0
        mu = 0.0
        if spec.mean == "constant":
            mu, k = v[0], 1
        omega = v[k]
        alpha = tuple(v[k + 1 : k + 1 + spec.p])
        beta = tuple(v[k + 1 + spec.p : k + 1 + spec.p + spec.q])
        nu = v[-1] if spec.innovation == "student_t" else None
        return cls(mu, omega, alpha, beta, nu)

    def check(self) -> None:
        if not self.omega > 0:
            raise GarchError("omega must be positive")
        if any(a < 0 for a in self.alpha) or any(b < 0 for b in self.beta):
            raise GarchError("alpha and beta must be non-negative")
        if not self.persistence < 1:
            raise GarchError(
                f"nonstationary parameters: sum(alpha) + sum(beta) = {self.persistence:.6g} >= 1"
            )
        if self.nu is not None and not self.nu > 2:
            raise GarchError("Student-t degrees of freedom must exceed 2")


@dataclass
class GarchFit:
    """Maximum-likelihood GARCH estimates for one series."""

    spec: GarchSpec
    params: GarchParams
    h_path: np.ndarray
    residuals: np.ndarray
    log_lik: float
    std_errors: np.ndarray
    p_values: np.ndarray
    converged: bool
    boundary: bool
    n_obs: int
    label: str = ""
    diagnostics: dict = field(default_factory=dict)

    @property
    def standardized_residuals(self) -> np.ndarray:
        return self.residuals / np.sqrt(self.h_path)

    @property
    def aic(self) -> float:
        return (-2.0 * self.log_lik + 2.0 * self.spec.n_params) / self.n_obs

    @property
    def bic(self) -> float:
        return (-2.0 * self.log_lik + np.log(self.n_obs) * self.spec.n_params) / self.n_obs

    def forecast_variance(self) -> float:
        """One-step-ahead conditional variance after the last observation."""
        p = self.params
        e2 = self.residuals**2
        h = self.h_path
        out = p.omega
        for i, a in enumerate(p.alpha, start=1):
            out += a * e2[-i]
        for j, b in enumerate(p.beta, start=1):
            out += b * h[-j]
        return float(out)

    def to_dict(self) -> dict:
        names = self.spec.param_names()
        values = self.params.to_vector(self.spec)
        return {
            "label": self.label,
            "spec": {
                "p": self.spec.p, "q": self.spec.q,
                "mean": self.spec.mean, "innovation": self.spec.innovation,
            },
            "params": dict(zip(names, values.tolist())),
            "std_errors": dict(zip(names, self.std_errors.tolist())),
            "p_values": dict(zip(names, self.p_values.tolist())),
            "log_lik": self.log_lik,
            "aic": self.aic,
            "bic": self.bic,
            "converged": self.converged,
            "boundary": self.boundary,
            "n_obs": self.n_obs,
        }


def _variance_path(eps: np.ndarray, omega: float, alpha, beta) -> np.ndarray:
    """GARCH recursion with pre-sample ``eps**2`` at its sample mean and
    pre-sample variances at the unconditional variance."""
    e2 = eps * eps
    T = e2.size
    p, q = len(alpha), len(beta)
    pre = e2.mean()
    ext = np.concatenate([np.full(p, pre), e2])
    x = np.full(T, omega)
    for i, a in enumerate(alpha, start=1):
        x += a * ext[p - i : p - i + T]
    if q == 0:
        return x
    h0 = omega / (1.0 - sum(alpha) - sum(beta))
    a_coef = np.concatenate([[1.0], -np.asarray(beta, dtype=float)])
    zi = signal.lfiltic([1.0], a_coef, np.full(q, h0))
    h, _ = signal.lfilter([1.0], a_coef, x, zi=zi)
    return h


def _loglik_terms(eps: np.ndarray, h: np.ndarray, nu: float | None) -> np.ndarray:
    if nu is None:
        return -0.5 * (np.log(2 * np.pi) + np.log(h) + eps * eps / h)
    c = gammaln((nu + 1) / 2) - gammaln(nu / 2) - 0.5 * np.log(np.pi * (nu - 2))
    return c - 0.5 * np.log(h) - 0.5 * (nu + 1) * np.log1p(eps * eps / (h * (nu - 2)))


def garch_filter(params: GarchParams | GarchFit, r: Sequence[float]) -> np.ndarray:
    """Conditional variance path of ``r`` under ``params``.

    Raises
    ------
    GarchError
        If the parameters are not positive and weakly stationary.
    """
    if isinstance(params, GarchFit):
        params = params.params
    params.check()
    eps = np.asarray(r, dtype=float) - params.mu
    return _variance_path(eps, params.omega, params.alpha, params.beta)


def garch_loglik(params: GarchParams, r: Sequence[float]) -> float:
    """Log-likelihood of ``r``; ``-inf`` for infeasible parameters."""
    try:
        params.check()
    except GarchError:
        return -np.inf
    eps = np.asarray(r, dtype=float) - params.mu
    h = _variance_path(eps, params.omega, params.alpha, params.beta)
    if not np.all(h > 0) or not np.all(np.isfinite(h)):
        return -np.inf
    ll = float(np.sum(_loglik_terms(eps, h, params.nu)))
    return ll if np.isfinite(ll) else -np.inf


# --- unconstrained parameterization -------------------------------------

def _to_natural(z: np.ndarray, spec: GarchSpec) -> np.ndarray:
    k = 1 if spec.mean == "constant" else 0
    m = spec.p + spec.q
    out = []
    if k:
        out.append(z[0])
    out.append(np.exp(z[k]))
    logits = np.append(z[k + 1 : k + 1 + m], 0.0)
    w = np.exp(logits - logits.max())
    w /= w.sum()
    out.extend(w[:m])
    if spec.innovation == "student_t":
        out.append(2.0 + np.exp(z[k + 1 + m]))
    return np.asarray(out)


def _to_unconstrained(theta: np.ndarray, spec: GarchSpec) -> np.ndarray:
    k = 1 if spec.mean == "constant" else 0
    m = spec.p + spec.q
    z = []
    if k:
        z.append(theta[0])
    z.append(np.log(theta[k]))
    comps = np.clip(theta[k + 1 : k + 1 + m], 1e-8, None)
    rest = max(1.0 - comps.sum(), 1e-8)
    z.extend(np.log(comps / rest))
    if spec.innovation == "student_t":
        z.append(np.log(theta[-1] - 2.0))
    return np.asarray(z)


def _feasible(theta: np.ndarray, spec: GarchSpec) -> bool:
    k = 1 if spec.mean == "constant" else 0
    m = spec.p + spec.q
    comps = theta[k + 1 : k + 1 + m]
    if theta[k] <= 0 or np.any(comps < 0) or comps.sum() >= 1:
        return False
    if spec.innovation == "student_t" and theta[-1] <= 2:
        return False
    return True


def _starts(y: np.ndarray, spec: GarchSpec, n_starts: int, rng: np.random.Generator):
    mu0 = float(y.mean()) if spec.mean == "constant" else None
    var = float(np.var(y))
    out = []
    for s in range(n_starts):
        if s == 0:
            pers, share, nu = 0.9, 0.15, 8.0
        else:
            pers = rng.uniform(0.3, 0.98)
            share = rng.uniform(0.05, 0.7)
            nu = rng.uniform(4.0, 20.0)
        a_tot = pers * share if spec.q else pers
        b_tot = pers - a_tot
        theta = [mu0] if mu0 is not None else []
        theta.append(var * (1 - pers))
        theta += [a_tot / spec.p] * spec.p
        if spec.q:
            theta += [b_tot / spec.q] * spec.q
        if spec.innovation == "student_t":
            theta.append(nu)
        out.append(np.asarray(theta, dtype=float))
    return out


def _newton_polish(f, theta: np.ndarray, spec: GarchSpec, max_iter: int = 25) -> np.ndarray:
    """Newton steps on the log-likelihood in natural coordinates."""
    best = theta.copy()
    fbest = f(best)
    for _ in range(max_iter):
        g = approx_fprime(best, f, centered=True)
        if np.max(np.abs(g)) < 1e-9:
            break
        H = approx_hess3(best, f)
        if not np.all(np.isfinite(H)) or np.max(np.linalg.eigvalsh(0.5 * (H + H.T))) >= 0:
            break
        step = -np.linalg.solve(H, g)
        t = 1.0
        for _ in range(20):
            cand = best + t * step
            if _feasible(cand, spec) and f(cand) >= fbest:
                break
            t *= 0.5
        else:
            break
        best, fbest = cand, f(cand)
    return best


def fit_garch(
    r: Sequence[float],
    spec: GarchSpec | None = None,
    *,
    n_starts: int = 5,
    seed: int = 0,
    label: str = "",
) -> GarchFit:
    """Fit a GARCH(p, q) model by maximum likelihood.

    Parameters
    ----------
    r : array_like
        Return series, length at least 50.
    spec : GarchSpec, optional
        Model orders, mean and innovation law. Defaults to GARCH(1,1)-t with
        a constant mean.
    n_starts : int
        Number of quasi-Newton starts (one fixed, the rest random).
    seed : int
        Seed for the random starting points.
    label : str
        Series name carried into the result and error messages.

    Returns
    -------
    GarchFit

    Raises
    ------
    GarchError
        For short or degenerate (constant) series.
    GarchConvergenceError
        If no start produced a finite likelihood or the best point fails the
        gradient test.
    """
    spec = spec or GarchSpec()
    y = np.asarray(r, dtype=float).ravel()
    T = y.size
    name = f" for {label!r}" if label else ""
    if T < 50:
        raise GarchError(f"need at least 50 observations{name}, got {T}")
    if not np.all(np.isfinite(y)):
        raise GarchError(f"non-finite returns{name}")
    scale = float(np.std(y))
    if not scale > 1e-12 * max(1.0, float(np.max(np.abs(y)))):
        raise GarchError(f"degenerate likelihood: series{name} is constant")
    ys = y / scale

    def ll(theta: np.ndarray) -> float:
        if not _feasible(theta, spec):
            return -np.inf
        return garch_loglik(GarchParams.from_vector(theta, spec), ys)

    def objective(z: np.ndarray) -> float:
        v = ll(_to_natural(z, spec))
        return 1e10 if not np.isfinite(v) else -v / T

    rng = np.random.default_rng(seed)
    best_theta, best_ll = None, -np.inf
    for theta0 in _starts(ys, spec, n_starts, rng):
        z0 = _to_unconstrained(theta0, spec)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = optimize.minimize(objective, z0, method="BFGS", options={"gtol": 1e-7, "maxiter": 2000})
        theta = _to_natural(res.x, spec)
        v = ll(theta)
        if v > best_ll:
            best_theta, best_ll = theta, v
    if best_theta is None or not np.isfinite(best_ll):
        raise GarchConvergenceError(f"no start produced a finite likelihood{name}")

    k = 1 if spec.mean == "constant" else 0
    comps = best_theta[k + 1 : k + 1 + spec.p + spec.q]
    boundary = bool(
        np.any(comps < 1e-4)
        or comps.sum() > 1 - 1e-4
        or (spec.innovation == "student_t" and best_theta[-1] > 150.0)
    )
    if not boundary:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            best_theta = _newton_polish(ll, best_theta, spec)
        best_ll = ll(best_theta)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        grad = approx_fprime(best_theta, ll, centered=True)
        H = approx_hess3(best_theta, ll)
    # two-sided differences are undefined at the boundary of the feasible set
    converged = bool(boundary or (np.all(np.isfinite(grad)) and np.max(np.abs(grad)) / T < 1e-3))

    # back to data units: mu scales with s, omega with s^2
    D = np.ones(spec.n_params)
    if spec.mean == "constant":
        D[0] = scale
    D[k] = scale**2
    theta_orig = best_theta * D
    params = GarchParams.from_vector(theta_orig, spec)
    if np.all(np.isfinite(H)):
        try:
            cov_std = np.linalg.inv(-H)
            if np.any(np.diag(cov_std) < 0) or not np.all(np.isfinite(cov_std)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            cov_std = np.linalg.pinv(-H)
        se = np.sqrt(np.abs(np.diag(cov_std))) * D
    else:
        # finite-difference steps left the feasible region
        se = np.full(spec.n_params, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        pvals = 2 * stats.norm.sf(np.abs(theta_orig / se))
    pvals = np.where(np.isfinite(pvals), pvals, np.nan)

    eps = y - params.mu
    h = _variance_path(eps, params.omega, params.alpha, params.beta)
    log_lik = float(np.sum(_loglik_terms(eps, h, params.nu)))
    if not converged:
        raise GarchConvergenceError(
            f"optimizer did not converge{name} (max |grad| = {np.max(np.abs(grad)):.3g})",
            params, log_lik,
        )
    if boundary:
        warnings.warn(f"GARCH estimate{name} lies on the parameter boundary", GarchWarning, stacklevel=2)
    return GarchFit(
        spec=spec,
        params=params,
        h_path=h,
        residuals=eps,
        log_lik=log_lik,
        std_errors=se,
        p_values=pvals,
        converged=converged,
        boundary=boundary,
        n_obs=T,
        label=label,
        diagnostics={"max_abs_grad_scaled": float(np.max(np.abs(grad))), "scale": scale},
    )


def refit_with(fit: GarchFit, params: GarchParams) -> GarchFit:
    """Evaluate a fit object at ``params`` on the same data (no optimization)."""
    y = fit.residuals + fit.params.mu
    eps = y - params.mu
    h = _variance_path(eps, params.omega, params.alpha, params.beta)
    return replace(
        fit, params=params, h_path=h, residuals=eps,
        log_lik=float(np.sum(_loglik_terms(eps, h, params.nu))),
    )


@dataclass(frozen=True)
class LogArchFit:
    """Least-squares log-ARCH(P): ``ln y_t^2 = omega + sum_p gamma_p ln y_{t-p}^2 + e_t``."""

    omega: float
    gamma: np.ndarray
    P: int
    resid_var: float

    def padded(self, P: int) -> np.ndarray:
        out = np.zeros(P)
        out[: min(P, self.P)] = self.gamma[:P]
        return out


def fit_log_arch(
    r: Sequence[float],
    P: int = 5,
    eps_scheme: ZeroAdjust | None = None,
) -> LogArchFit:
    y = np.asarray(r, dtype=float).ravel()
    T = y.size
    if P < 1:
        raise GarchError("lag order P must be at least 1")
    if P >= T:
        raise GarchError(f"lag order P={P} must be smaller than the series length {T}")
    if T <= P + 10:
        raise GarchError(f"need more than P + 10 = {P + 10} observations, got {T}")
    ystar = log_square_transform(y[:, None], eps_scheme or ZeroAdjust()).ystar[:, 0]
    target = ystar[P:]
    X = np.column_stack([np.ones(T - P)] + [ystar[P - p : T - p] for p in range(1, P + 1)])
    coef, *_ = np.linalg.lstsq(X, target, rcond=None)
    resid = target - X @ coef
    return LogArchFit(float(coef[0]), coef[1:].copy(), P, float(np.mean(resid**2)))


def standardized_t(rng: np.random.Generator, nu: float | None, size) -> np.ndarray:
    """Unit-variance innovations: Gaussian, or Student-t scaled by sqrt((nu-2)/nu)."""
    if nu is None:
        return rng.standard_normal(size)
    return rng.standard_t(nu, size) * np.sqrt((nu - 2.0) / nu)


def simulate_garch(
    params: GarchParams,
    T: int,
    seed: int | np.random.Generator = 0,
    *,
    burn_in: int = 500,
    return_variance: bool = False,
):
    """Simulate ``T`` returns ``mu + sqrt(h_t) z_t`` after a burn-in."""
    params.check()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    total = T + burn_in
    z = standardized_t(rng, params.nu, total)
    p, q = len(params.alpha), len(params.beta)
    h0 = params.unconditional_variance
    h = np.full(total + max(p, q), h0)
    e = np.zeros(total + max(p, q))
    off = max(p, q)
    e[:off] = np.sqrt(h0)
    for t in range(off, total + off):
        ht = params.omega
        for i, a in enumerate(params.alpha, start=1):
            ht += a * e[t - i] ** 2
        for j, b in enumerate(params.beta, start=1):
            ht += b * h[t - j]
        h[t] = ht
        e[t] = np.sqrt(ht) * z[t - off]
    y = params.mu + e[off + burn_in :]
    if return_variance:
        return y, h[off + burn_in :]
    return y
