"""Network log-ARCH model: log-squared transform, GMM estimation, forecasting.

The model for the log-squared panel ``Y*`` is the simultaneous system

    Y*_t = phi0 + rho W Y*_t + Gamma Y*_{t-1} + u_t,

with ``Gamma`` diagonal.  ``W Y*_t`` is endogenous; it is instrumented by
``W Y*_{t-1}`` and ``W^2 Y*_{t-1}`` while the intercepts and own lags act as
their own instruments.  Each period contributes one moment vector
``Z_t' u_t`` so the long-run covariance of the moments allows arbitrary
cross-sectional correlation of ``u_t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Sequence

import numpy as np
from scipy import optimize

from .data import ReturnPanel

__all__ = [
    "NetArchError",
    "ZeroAdjust",
    "LogSquaredPanel",
    "NetLogArchFit",
    "log_square_transform",
    "fit_gmm",
    "forecast_logvol",
]

Scheme = Literal["min_nonzero", "percentile_1", "fixed"]


class NetArchError(ValueError):
    pass


@dataclass(frozen=True)
class ZeroAdjust:
    """Replacement rule for zero squared returns before taking logs.

    ``min_nonzero`` uses the smallest nonzero ``y**2`` of each series,
    ``percentile_1`` the 1st percentile of the nonzero ``y**2`` and
    ``fixed`` the constant ``fixed_value``.
    """

    scheme: Scheme = "min_nonzero"
    fixed_value: float = 1e-6

    def __post_init__(self) -> None:
        if self.scheme not in ("min_nonzero", "percentile_1", "fixed"):
            raise NetArchError(f"unknown zero-adjustment scheme {self.scheme!r}")
        if not self.fixed_value > 0:
            raise NetArchError("fixed replacement value must be positive")

    @classmethod
    def parse(cls, text: str) -> "ZeroAdjust":
        """Accept ``min``, ``min_nonzero``, ``1%ile``, ``percentile_1``, ``fixed`` or a float."""
        key = text.strip().lower()
        if key in ("min", "min_nonzero"):
            return cls("min_nonzero")
        if key in ("1%ile", "percentile_1", "p1"):
            return cls("percentile_1")
        if key == "fixed":
            return cls("fixed")
        try:
            return cls("fixed", float(key))
        except ValueError:
            raise NetArchError(f"unknown zero-adjustment scheme {text!r}") from None

    def epsilon(self, y2: np.ndarray) -> np.ndarray:
        """Per-column replacement values for a (T, n) matrix of squares."""
        y2 = np.atleast_2d(np.asarray(y2, dtype=float).T).T
        out = np.empty(y2.shape[1])
        for i in range(y2.shape[1]):
            nz = y2[y2[:, i] > 0, i]
            if nz.size == 0:
                raise NetArchError(f"series {i} has no nonzero return")
            if self.scheme == "min_nonzero":
                out[i] = nz.min()
            elif self.scheme == "percentile_1":
                out[i] = np.percentile(nz, 1.0)
            else:
                out[i] = self.fixed_value
        return out

    def label(self) -> str:
        if self.scheme == "fixed":
            return f"fixed({self.fixed_value:g})"
        return self.scheme


@dataclass(frozen=True)
class LogSquaredPanel:
    ystar: np.ndarray
    epsilon: np.ndarray
    adjust: ZeroAdjust
    n_adjusted: int
    labels: tuple[str, ...] = ()

    @property
    def T(self) -> int:
        return self.ystar.shape[0]

    @property
    def n(self) -> int:
        return self.ystar.shape[1]


def log_square_transform(
    r: ReturnPanel | np.ndarray,
    adjust: ZeroAdjust | None = None,
    epsilon: np.ndarray | None = None,
) -> LogSquaredPanel:
    """``ystar[t, i] = ln(max(y[t, i]**2, eps_i))``.

    ``epsilon`` overrides the per-series values that ``adjust`` would derive
    from ``r`` itself.
    """
    adjust = adjust or ZeroAdjust()
    if isinstance(r, ReturnPanel):
        labels, y = r.labels, r.returns
    else:
        y = np.asarray(r, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        labels = tuple(f"S{i + 1}" for i in range(y.shape[1]))
    y2 = y**2
    eps = adjust.epsilon(y2) if epsilon is None else np.broadcast_to(
        np.asarray(epsilon, dtype=float), (y.shape[1],)
    ).copy()
    if np.any(eps <= 0):
        raise NetArchError("replacement values must be positive")
    low = y2 < eps
    ystar = np.log(np.where(low, eps, y2))
    return LogSquaredPanel(ystar, eps, adjust, int(low.sum()), tuple(labels))


def _weights_array(w: Any) -> tuple[np.ndarray, str]:
    if hasattr(w, "w_norm"):
        return np.asarray(w.w_norm, dtype=float), getattr(w, "normalization", "unknown")
    return np.asarray(w, dtype=float), "none"


@dataclass
class NetLogArchFit:
    """GMM estimates of the network log-ARCH model.

    ``params`` is ordered ``(rho, gamma_1..gamma_n, phi0_1..phi0_n)`` and
    ``cov`` is its sandwich covariance.  ``sigma2`` is the pooled mean
    squared residual.
    """

    rho: float
    gamma: np.ndarray
    phi0: np.ndarray
    sigma2: float
    params: np.ndarray
    cov: np.ndarray
    residuals: np.ndarray
    W: np.ndarray
    normalization: str
    j_stat: float
    weight_matrix: np.ndarray
    moment_spec: "_Moments" = field(repr=False)
    invertible: bool = True
    rho_estimated: bool = True
    labels: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.gamma.size

    @property
    def std_errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.cov), 0.0, None))

    @property
    def rho_se(self) -> float:
        return float(self.std_errors[0])

    @property
    def gamma_se(self) -> np.ndarray:
        return self.std_errors[1 : 1 + self.n]

    @property
    def tstats(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.params / self.std_errors

    @property
    def moments(self) -> str:
        return self.moment_spec.kind

    def objective(self, theta: np.ndarray) -> float:
        """Second-step GMM criterion ``T gbar' W gbar`` at ``theta``."""
        theta = np.asarray(theta, dtype=float)
        if not self.rho_estimated:
            theta = theta[1:]
        gbar = self.moment_spec.gbar(theta)
        return float(self.moment_spec.T * gbar @ self.weight_matrix @ gbar)

    def to_dict(self) -> dict:
        se = self.std_errors
        t = self.tstats
        n = self.n
        return {
            "rho": self.rho,
            "rho_se": float(se[0]),
            "rho_t": float(t[0]),
            "gamma": self.gamma.tolist(),
            "gamma_se": se[1 : 1 + n].tolist(),
            "gamma_t": t[1 : 1 + n].tolist(),
            "phi0": self.phi0.tolist(),
            "phi0_se": se[1 + n :].tolist(),
            "sigma2": self.sigma2,
            "j_stat": self.j_stat,
            "moments": self.moments,
            "normalization": self.normalization,
            "invertible": self.invertible,
            "labels": list(self.labels),
        }


def _design(ystar: np.ndarray, W: np.ndarray, with_rho: bool):
    y = ystar[1:]
    lag = ystar[:-1]
    T, n = y.shape
    eye = np.eye(n)
    # regressors per period: (T, n, K)
    parts_x = []
    if with_rho:
        parts_x.append((y @ W.T)[:, :, None])
    parts_x.append(lag[:, :, None] * eye[None])
    parts_x.append(np.broadcast_to(eye, (T, n, n)))
    X = np.concatenate(parts_x, axis=2)
    parts_z = [lag[:, :, None] * eye[None], np.broadcast_to(eye, (T, n, n))]
    if with_rho:
        wl = lag @ W.T
        parts_z.append(wl[:, :, None])
        parts_z.append((wl @ W.T)[:, :, None])
    Z = np.concatenate(parts_z, axis=2)
    return y, X, Z


def _quadratic_matrices(W: np.ndarray) -> np.ndarray:
    """Symmetric zero-diagonal matrices ``sym(W)`` and ``sym(W^2)`` minus diagonal."""
    out = []
    for M in (W, W @ W):
        P = 0.5 * (M + M.T)
        np.fill_diagonal(P, 0.0)
        if np.any(P != 0):
            out.append(P)
    return np.array(out).reshape(-1, *W.shape)


@dataclass
class _Moments:
    """Per-period moment vectors: ``Z_t' u_t`` and optionally ``u_t' P_k u_t``."""

    y: np.ndarray
    X: np.ndarray
    Z: np.ndarray
    P: np.ndarray
    kind: str

    @property
    def T(self) -> int:
        return self.y.shape[0]

    def residuals(self, theta: np.ndarray) -> np.ndarray:
        return self.y - np.einsum("tnk,k->tn", self.X, theta)

    def per_period(self, theta: np.ndarray) -> np.ndarray:
        u = self.residuals(theta)
        lin = np.einsum("tnl,tn->tl", self.Z, u)
        if not len(self.P):
            return lin
        quad = np.einsum("tn,knm,tm->tk", u, self.P, u, optimize=True)
        return np.concatenate([lin, quad], axis=1)

    def gbar(self, theta: np.ndarray) -> np.ndarray:
        return self.per_period(theta).mean(axis=0)

    def jacobian(self, theta: np.ndarray) -> np.ndarray:
        """Derivative of ``gbar`` with respect to ``theta``."""
        T = self.T
        G_lin = -np.einsum("tnl,tnk->lk", self.Z, self.X) / T
        if not len(self.P):
            return G_lin
        u = self.residuals(theta)
        G_quad = -2.0 * np.einsum("tn,jnm,tmk->jk", u, self.P, self.X, optimize=True) / T
        return np.vstack([G_lin, G_quad])


def _minimize_gmm(mom: _Moments, theta0: np.ndarray, Wm: np.ndarray) -> np.ndarray:
    if not len(mom.P):
        G = mom.jacobian(theta0)
        g0 = mom.gbar(np.zeros_like(theta0))
        return np.linalg.solve(G.T @ Wm @ G, -G.T @ Wm @ g0)
    C = np.linalg.cholesky(0.5 * (Wm + Wm.T)).T
    res = optimize.least_squares(
        lambda th: C @ mom.gbar(th), theta0, jac=lambda th: C @ mom.jacobian(th),
        method="lm", xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=2000,
    )
    return res.x


def _rho_grid_start(mom: _Moments, W: np.ndarray, Wm: np.ndarray) -> np.ndarray:
    """Best point on a rho grid with the remaining coefficients by least squares.

    Given rho the least-squares coefficients, hence the residuals, are affine
    in rho, so every moment is a polynomial in rho of degree at most two.
    """
    lam = np.max(np.abs(np.linalg.eigvals(W)))
    Xs = mom.X[:, :, 1:].reshape(-1, mom.X.shape[2] - 1)
    wy = mom.X[:, :, 0]
    proj = np.linalg.pinv(Xs)
    c0 = proj @ mom.y.reshape(-1)
    c1 = proj @ wy.reshape(-1)
    u0 = mom.y - (Xs @ c0).reshape(mom.y.shape)
    u1 = wy - (Xs @ c1).reshape(mom.y.shape)
    T = mom.T
    lin0 = np.einsum("tnl,tn->l", mom.Z, u0) / T
    lin1 = np.einsum("tnl,tn->l", mom.Z, u1) / T
    q00 = np.einsum("tn,knm,tm->k", u0, mom.P, u0, optimize=True) / T
    q01 = np.einsum("tn,knm,tm->k", u0, mom.P, u1, optimize=True) / T
    q11 = np.einsum("tn,knm,tm->k", u1, mom.P, u1, optimize=True) / T
    rhos = np.linspace(-0.99, 0.99, 199) / lam
    g = np.concatenate([
        lin0[None] - rhos[:, None] * lin1[None],
        q00[None] - 2 * rhos[:, None] * q01[None] + rhos[:, None] ** 2 * q11[None],
    ], axis=1)
    rho = rhos[np.argmin(np.einsum("ri,ij,rj->r", g, Wm, g))]
    return np.concatenate([[rho], c0 - rho * c1])


def fit_gmm(
    ys: LogSquaredPanel | np.ndarray,
    w: Any,
    *,
    moments: str = "linear_quadratic",
) -> NetLogArchFit:
    """Two-step efficient GMM for the network log-ARCH model.

    Parameters
    ----------
    ys : LogSquaredPanel or ndarray
        Log-squared observations, shape (T, n).
    w : WeightMatrix or ndarray
        Weight matrix; a ``WeightMatrix`` contributes its normalized weights.
    moments : {"linear_quadratic", "linear"}
        ``linear`` uses only the instruments ``Z_t' u_t``.  ``linear_quadratic``
        adds ``u_t' P u_t`` for zero-diagonal ``P`` built from ``W``; these
        identify ``rho`` even when the lagged terms carry no information, but
        assume innovations uncorrelated across nodes.

    Returns
    -------
    NetLogArchFit

    Raises
    ------
    NetArchError
        If T < 30, shapes disagree, or the instruments are rank deficient.
    """
    if moments not in ("linear_quadratic", "linear"):
        raise NetArchError(f"unknown moment set {moments!r}")
    if isinstance(ys, LogSquaredPanel):
        ystar, labels = ys.ystar, ys.labels
    else:
        ystar = np.asarray(ys, dtype=float)
        labels = ()
    W, normalization = _weights_array(w)
    T_full, n = ystar.shape
    if T_full < 30:
        raise NetArchError("fit_gmm needs at least 30 periods")
    if W.shape != (n, n):
        raise NetArchError(f"weight matrix shape {W.shape} does not match n={n}")
    if not np.all(np.isfinite(ystar)):
        raise NetArchError("log-squared panel must be finite")
    with_rho = bool(np.any(W != 0))

    y, X, Z = _design(ystar, W, with_rho)
    T = y.shape[0]
    K, L = X.shape[2], Z.shape[2]
    Zs = Z.reshape(T * n, L)
    if np.linalg.matrix_rank(Zs) < L:
        raise NetArchError("instrument matrix is rank deficient")
    Szx = np.einsum("tnl,tnk->lk", Z, X) / T
    if np.linalg.matrix_rank(Szx) < K:
        raise NetArchError("parameters are not identified by the instruments")
    P = _quadratic_matrices(W) if (with_rho and moments == "linear_quadratic") else np.empty((0, n, n))
    mom = _Moments(y, X, Z, P, moments if with_rho else "linear")

    # first step: 2SLS on the linear moments
    lin = _Moments(y, X, Z, np.empty((0, n, n)), "linear")
    theta = _minimize_gmm(lin, np.zeros(K), np.linalg.inv(Zs.T @ Zs / T))
    M = L + len(P)
    if M > K:
        for _ in range(2):
            g = mom.per_period(theta)
            Wm = np.linalg.pinv(g.T @ g / T, hermitian=True)
            if len(P):
                theta = min(
                    (_minimize_gmm(mom, start, Wm) for start in (theta, _rho_grid_start(mom, W, Wm))),
                    key=lambda th: mom.gbar(th) @ Wm @ mom.gbar(th),
                )
            else:
                theta = _minimize_gmm(mom, theta, Wm)
    else:
        Wm = np.linalg.inv(Zs.T @ Zs / T)
    g = mom.per_period(theta)
    u = mom.residuals(theta)
    S = g.T @ g / T
    G = mom.jacobian(theta)
    bread = np.linalg.inv(G.T @ Wm @ G)
    cov = bread @ G.T @ Wm @ S @ Wm @ G @ bread / T
    gbar = g.mean(axis=0)
    j_stat = float(T * gbar @ Wm @ gbar)

    if with_rho:
        params, cov_full = theta, cov
    else:
        params = np.concatenate([[0.0], theta])
        cov_full = np.zeros((K + 1, K + 1))
        cov_full[1:, 1:] = cov
    rho = float(params[0])
    gamma = params[1 : 1 + n].copy()
    phi0 = params[1 + n :].copy()
    invertible = _is_invertible(rho, W)
    return NetLogArchFit(
        rho=rho,
        gamma=gamma,
        phi0=phi0,
        sigma2=float(np.mean(u**2)),
        params=params,
        cov=cov_full,
        residuals=u,
        W=W,
        normalization=normalization,
        j_stat=j_stat,
        weight_matrix=Wm,
        moment_spec=mom,
        invertible=invertible,
        rho_estimated=with_rho,
        labels=tuple(labels),
    )


def _is_invertible(rho: float, W: np.ndarray) -> bool:
    A = np.eye(W.shape[0]) - rho * W
    s = np.linalg.svd(A, compute_uv=False)
    return bool(s[-1] > 1e-10 * max(1.0, s[0]))


def forecast_logvol(fit: NetLogArchFit, ystar_t: Sequence[float]) -> np.ndarray:
    """One-step forecast ``(I - rho W)^{-1} (phi0 + Gamma ystar_t)``."""
    if not fit.invertible:
        raise NetArchError("I - rho W is singular at the fitted rho; cannot forecast")
    x = np.asarray(ystar_t, dtype=float)
    A = np.eye(fit.n) - fit.rho * fit.W
    return np.linalg.solve(A, fit.phi0 + fit.gamma * x)


def reduced_form(fit: NetLogArchFit, ystar_prev: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Map lagged values and innovations to ``Y*_t`` through the reduced form."""
    A = np.eye(fit.n) - fit.rho * fit.W
    rhs = fit.phi0 + fit.gamma * np.asarray(ystar_prev) + np.asarray(u)
    return np.linalg.solve(A, np.atleast_2d(rhs).T).T.reshape(np.shape(rhs))
