"""Seeded ground-truth generators for the estimators in this package.

Every generator is a pure function of its arguments and seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy.special import digamma

from .data import ReturnPanel
from .garch_uni import GarchParams
from .netarch import LogSquaredPanel, ZeroAdjust

LOG_CHI2_MEAN = float(digamma(0.5) + np.log(2.0))

__all__ = [
    "SimError",
    "NetSimSpec",
    "NetSimResult",
    "simulate_net_logarch",
    "simulate_dcc",
    "simulate_gogarch",
]


class SimError(ValueError):
    pass


def _spectral_radius(M: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(M)))) if M.size else 0.0


@dataclass(frozen=True)
class NetSimSpec:
    """Configuration of a network log-ARCH panel.

    ``innovation`` is ``"log_chi2"`` (``u = ln eps**2`` with standard normal
    ``eps``) or ``"gaussian"`` (``u ~ N(0, sigma2)``).
    """

    W: Any
    T: int
    rho: float
    gamma: Sequence[float]
    phi0: Sequence[float]
    innovation: str = "log_chi2"
    sigma2: float = 1.0
    seed: int = 0
    burn_in: int = 200

    def __post_init__(self) -> None:
        W = np.asarray(getattr(self.W, "w_norm", self.W), dtype=float)
        n = W.shape[0]
        if W.shape != (n, n):
            raise SimError("W must be square")
        gamma = np.broadcast_to(np.asarray(self.gamma, dtype=float), (n,)).copy()
        phi0 = np.broadcast_to(np.asarray(self.phi0, dtype=float), (n,)).copy()
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "phi0", phi0)
        if self.innovation not in ("log_chi2", "gaussian"):
            raise SimError(f"unknown innovation law {self.innovation!r}")
        if self.burn_in < 100:
            raise SimError("burn_in must be at least 100")
        if self.T < 1:
            raise SimError("T must be positive")
        if not self.sigma2 > 0:
            raise SimError("sigma2 must be positive")
        if _spectral_radius(self.rho * W) >= 1.0 - 1e-12:
            raise SimError("spectral radius of rho * W must be below 1")
        lag = np.linalg.solve(np.eye(n) - self.rho * W, np.diag(gamma))
        if _spectral_radius(lag) >= 1.0 - 1e-12:
            raise SimError("explosive configuration: reduced-form lag matrix has spectral radius >= 1")

    @property
    def n(self) -> int:
        return self.W.shape[0]


@dataclass(frozen=True)
class NetSimResult:
    ystar: LogSquaredPanel
    returns: ReturnPanel
    u: np.ndarray


def simulate_net_logarch(spec: NetSimSpec, labels: Sequence[str] | None = None) -> NetSimResult:
    """Simulate ``Y*_t = (I - rho W)^{-1} (phi0 + Gamma Y*_{t-1} + u_t)``.

    Returns are rebuilt as ``s_t exp(Y*_t / 2)`` with an independent fair
    coin for the sign ``s_t``.
    """
    rng = np.random.default_rng(spec.seed)
    n, total = spec.n, spec.T + spec.burn_in
    if spec.innovation == "log_chi2":
        u = np.log(rng.standard_normal((total, n)) ** 2)
    else:
        u = np.sqrt(spec.sigma2) * rng.standard_normal((total, n))
    A_inv = np.linalg.inv(np.eye(n) - spec.rho * spec.W)
    lag = A_inv * spec.gamma[None, :]
    const = A_inv @ spec.phi0
    shock = u @ A_inv.T
    # start at the stationary mean of the reduced form
    mean_u = LOG_CHI2_MEAN if spec.innovation == "log_chi2" else 0.0
    y = np.linalg.solve(np.eye(n) - lag, const + A_inv @ np.full(n, mean_u))
    out = np.empty((total, n))
    for t in range(total):
        y = const + lag @ y + shock[t]
        out[t] = y
    ystar = out[spec.burn_in:]
    sign = np.where(rng.random((spec.T, n)) < 0.5, -1.0, 1.0)
    returns = sign * np.exp(0.5 * ystar)
    rp = ReturnPanel.from_array(returns, labels)
    eps = ZeroAdjust().epsilon(returns**2)
    panel = LogSquaredPanel(ystar, eps, ZeroAdjust(), 0, rp.labels)
    return NetSimResult(panel, rp, u[spec.burn_in:])


def _garch_list(garch: GarchParams | Sequence[GarchParams], n: int) -> list[GarchParams]:
    if isinstance(garch, GarchParams):
        return [garch] * n
    garch = list(garch)
    if len(garch) != n:
        raise SimError(f"need {n} GARCH parameter sets, got {len(garch)}")
    return garch


def simulate_dcc(
    n: int,
    T: int,
    a: float,
    b: float,
    Rbar: np.ndarray,
    garch: GarchParams | Sequence[GarchParams],
    seed: int = 0,
    *,
    nu: float | None = None,
    burn_in: int = 500,
    labels: Sequence[str] | None = None,
) -> ReturnPanel:
    """DCC panel: correlated innovations from ``R_t`` scaled by GARCH volatilities.

    ``nu`` switches the innovations to a unit-variance multivariate t.
    Each series uses only ``(mu, omega, alpha[0], beta[0])`` of its GARCH set.
    """
    if a < 0 or b < 0 or a + b >= 1:
        raise SimError("DCC parameters must satisfy a, b >= 0 and a + b < 1")
    Rbar = np.asarray(Rbar, dtype=float)
    if Rbar.shape != (n, n) or not np.allclose(Rbar, Rbar.T, atol=1e-12) \
            or not np.allclose(np.diag(Rbar), 1.0, atol=1e-12):
        raise SimError("Rbar must be a symmetric n x n matrix with unit diagonal")
    if np.linalg.eigvalsh(Rbar)[0] <= 0:
        raise SimError("Rbar must be positive definite")
    params = _garch_list(garch, n)
    for p in params:
        p.check()
    rng = np.random.default_rng(seed)
    total = T + burn_in
    mu = np.array([p.mu for p in params])
    omega = np.array([p.omega for p in params])
    alpha = np.array([p.alpha[0] for p in params])
    beta = np.array([p.beta[0] if p.beta else 0.0 for p in params])
    h = omega / (1 - alpha - beta)
    Q = Rbar.copy()
    out = np.empty((total, n))
    for t in range(total):
        d = np.sqrt(np.diag(Q))
        R = Q / np.outer(d, d)
        z = np.linalg.cholesky(R) @ rng.standard_normal(n)
        if nu is not None:
            z *= np.sqrt((nu - 2.0) / rng.chisquare(nu))
        e = np.sqrt(h) * z
        out[t] = mu + e
        Q = (1 - a - b) * Rbar + a * np.outer(z, z) + b * Q
        h = omega + alpha * e**2 + beta * h
    return ReturnPanel.from_array(out[burn_in:], labels)


def simulate_gogarch(
    Z: np.ndarray,
    omega: Sequence[float],
    alpha: Sequence[float],
    beta: Sequence[float],
    T: int,
    seed: int = 0,
    *,
    burn_in: int = 500,
    labels: Sequence[str] | None = None,
) -> tuple[ReturnPanel, np.ndarray]:
    """Returns ``Z f_t`` with independent Gaussian GARCH(1,1) factors.

    Returns the panel and the (T, n) factor variance path.
    """
    Z = np.asarray(Z, dtype=float)
    n = Z.shape[0]
    omega, alpha, beta = (np.asarray(v, dtype=float) for v in (omega, alpha, beta))
    if np.any(omega <= 0) or np.any(alpha < 0) or np.any(beta < 0) or np.any(alpha + beta >= 1):
        raise SimError("factor GARCH parameters must be positive and stationary")
    if abs(np.linalg.det(Z)) < 1e-12:
        raise SimError("mixing matrix must be invertible")
    rng = np.random.default_rng(seed)
    total = T + burn_in
    h = omega / (1 - alpha - beta)
    f = np.empty((total, n))
    H = np.empty((total, n))
    for t in range(total):
        H[t] = h
        f[t] = np.sqrt(h) * rng.standard_normal(n)
        h = omega + alpha * f[t] ** 2 + beta * h
    return ReturnPanel.from_array(f[burn_in:] @ Z.T, labels), H[burn_in:]
