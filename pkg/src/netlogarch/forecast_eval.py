"""Rolling one-step log-volatility forecasts and forecast-comparison tests.

The harness refits every roster model on each training window, forecasts the
next period's log-squared return and collects the errors in a
:class:`LossPanel`.  The comparison battery covers RMSFE/MAFE, the
Diebold-Mariano and Clark-West tests, bootstrap intervals and the model
confidence set.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .data import ReturnPanel
from .garch_multi import fit_ccc, fit_dcc, fit_gogarch, fit_univariate, mgarch_variance_forecast
from .garch_uni import GarchSpec
from .netarch import ZeroAdjust, fit_gmm, forecast_logvol, log_square_transform
from .network import build_weights

__all__ = [
    "NETWORK_MODELS",
    "STANDARD_MODELS",
    "DEFAULT_ROSTER",
    "ForecastError",
    "RollingConfig",
    "WindowFailure",
    "LossPanel",
    "TestResult",
    "McsResult",
    "rolling_forecast",
    "rmsfe_mafe",
    "dm_test",
    "cw_test",
    "bootstrap_ci",
    "loss_matrix",
    "mcs",
    "moving_block_indices",
    "sensitivity_grid",
    "evaluate_battery",
]

NETWORK_MODELS = {
    "Net-Euclidean": "euclidean",
    "Net-Correlation": "correlation",
    "Net-Piccolo": "piccolo",
    "Net-CCC": "ccc",
    "Net-DCC": "dcc",
    "Net-GO": "go",
}
STANDARD_MODELS = {"Std-CCC": "ccc", "Std-DCC": "dcc", "Std-GO": "go"}
DEFAULT_ROSTER = tuple(NETWORK_MODELS) + tuple(STANDARD_MODELS)


class ForecastError(ValueError):
    pass


@dataclass(frozen=True)
class RollingConfig:
    """Rolling-window settings.

    ``fixed_networks`` adds network models with a given weight matrix
    (already normalized) under the mapping key as model name.
    """

    T0: int = 300
    zero_adjust: ZeroAdjust = ZeroAdjust()
    roster: tuple[str, ...] = DEFAULT_ROSTER
    normalization: str = "row_stochastic"
    piccolo_P: int = 5
    garch_spec: GarchSpec = GarchSpec()
    gmm_moments: str = "linear_quadratic"
    go_starts: int = 4
    seed: int = 0
    n_jobs: int = 1
    min_completeness: float = 0.95
    fixed_networks: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.T0 < 60:
            raise ForecastError("training window T0 must be at least 60")
        unknown = [m for m in self.roster if m not in NETWORK_MODELS and m not in STANDARD_MODELS]
        if unknown:
            raise ForecastError(f"unknown roster models {unknown}; choose from {DEFAULT_ROSTER}")
        if not self.roster and not self.fixed_networks:
            raise ForecastError("roster is empty")
        if not 0 < self.min_completeness <= 1:
            raise ForecastError("min_completeness must lie in (0, 1]")

    @property
    def models(self) -> tuple[str, ...]:
        return tuple(self.roster) + tuple(sorted(self.fixed_networks))


@dataclass(frozen=True)
class WindowFailure:
    model: str
    window: int
    date: dt.date
    error: str


def _window_forecasts(returns: np.ndarray, labels: tuple[str, ...], start: int, cfg: RollingConfig):
    """Fit every model on ``returns[start:start+T0]`` and forecast the next period."""
    window = ReturnPanel.from_array(returns[start : start + cfg.T0], labels)
    ys = log_square_transform(window, cfg.zero_adjust)
    out: dict[str, np.ndarray] = {}
    errors: dict[str, str] = {}
    cache: dict[str, object] = {}

    def model_fit(kind: str):
        if kind not in cache:
            try:
                if kind == "uni":
                    cache[kind] = fit_univariate(window, cfg.garch_spec, seed=cfg.seed)
                elif kind == "ccc":
                    cache[kind] = fit_ccc(window, uni_fits=model_fit("uni"))
                elif kind == "dcc":
                    cache[kind] = fit_dcc(window, uni_fits=model_fit("uni"))
                else:
                    cache[kind] = fit_gogarch(window, n_starts=cfg.go_starts, seed=cfg.seed)
            except Exception as exc:  # noqa: BLE001 - recorded per model
                cache[kind] = exc
        value = cache[kind]
        if isinstance(value, Exception):
            raise value
        return value

    def network_forecast(W) -> np.ndarray:
        fit = fit_gmm(ys, W, moments=cfg.gmm_moments)
        return forecast_logvol(fit, ys.ystar[-1])

    for name in cfg.models:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                if name in cfg.fixed_networks:
                    out[name] = network_forecast(np.asarray(cfg.fixed_networks[name], dtype=float))
                elif name in NETWORK_MODELS:
                    method = NETWORK_MODELS[name]
                    fit = model_fit(method) if method in ("ccc", "dcc", "go") else None
                    W = build_weights(window, method, fit, scheme=cfg.normalization,
                                      P=cfg.piccolo_P, zero_adjust=cfg.zero_adjust)
                    out[name] = network_forecast(W)
                else:
                    h = mgarch_variance_forecast(model_fit(STANDARD_MODELS[name]))
                    out[name] = np.log(h)
            if not np.all(np.isfinite(out[name])):
                raise FloatingPointError("non-finite forecast")
        except Exception as exc:  # noqa: BLE001 - recorded per model
            out.pop(name, None)
            errors[name] = f"{type(exc).__name__}: {exc}"
    return start, out, errors


def _window_task(args):
    return _window_forecasts(*args)


@dataclass
class LossPanel:
    """Out-of-sample actuals and forecasts on the log-squared scale.

    ``forecasts[model]`` and ``actual`` are (P, n) arrays over the same
    ``dates``; errors are ``actual - forecast``.
    """

    models: tuple[str, ...]
    labels: tuple[str, ...]
    dates: tuple[dt.date, ...]
    actual: np.ndarray
    forecasts: dict[str, np.ndarray]
    completeness: dict[str, float] = field(default_factory=dict)
    failures: list[WindowFailure] = field(default_factory=list)

    def __post_init__(self) -> None:
        P = len(self.dates)
        if self.actual.shape != (P, len(self.labels)):
            raise ForecastError("actual values do not match dates and labels")
        for m in self.models:
            f = self.forecasts[m]
            if f.shape != self.actual.shape:
                raise ForecastError(f"forecasts of {m!r} do not cover the common span")
            if not np.all(np.isfinite(f)):
                raise ForecastError(f"forecasts of {m!r} are not finite")

    @property
    def P(self) -> int:
        return len(self.dates)

    def errors(self, model: str) -> np.ndarray:
        return self.actual - self.forecasts[model]

    def losses(self, model: str, loss_type: str = "squared") -> np.ndarray:
        return _loss(self.errors(model), loss_type)

    def check_completeness(self, minimum: float = 0.95) -> None:
        low = {m: c for m, c in self.completeness.items() if c < minimum}
        if low:
            raise ForecastError(
                "too few successful windows: "
                + ", ".join(f"{m} {100 * c:.1f}%" for m, c in sorted(low.items()))
            )

    def to_csv(self, path: str | Path) -> None:
        """Long format: model, country, date, error, actual, forecast."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["model", "country", "date", "error", "actual", "forecast"])
            for m in self.models:
                f = self.forecasts[m]
                for t, d in enumerate(self.dates):
                    for i, c in enumerate(self.labels):
                        a = float(self.actual[t, i])
                        out.writerow([m, c, d.isoformat(), repr(a - float(f[t, i])), repr(a), repr(float(f[t, i]))])

    @classmethod
    def from_csv(cls, path: str | Path) -> "LossPanel":
        rows: dict[tuple[str, str, str], tuple[float, float]] = {}
        models, labels, dates = [], [], []
        with Path(path).open(newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                m, c, d = row["model"], row["country"], row["date"]
                for seq, v in ((models, m), (labels, c), (dates, d)):
                    if v not in seq:
                        seq.append(v)
                rows[(m, c, d)] = (float(row["actual"]), float(row["forecast"]))
        P, n = len(dates), len(labels)
        actual = np.full((P, n), np.nan)
        forecasts = {m: np.full((P, n), np.nan) for m in models}
        for (m, c, d), (a, f) in rows.items():
            t, i = dates.index(d), labels.index(c)
            actual[t, i] = a
            forecasts[m][t, i] = f
        if np.any(np.isnan(actual)) or any(np.any(np.isnan(f)) for f in forecasts.values()):
            raise ForecastError(f"{path}: incomplete loss panel")
        return cls(tuple(models), tuple(labels), tuple(dt.date.fromisoformat(d) for d in dates),
                   actual, forecasts)


def rolling_forecast(r: ReturnPanel, cfg: RollingConfig) -> LossPanel:
    """One-step forecasts from every window ``[t - T0 + 1, t]``.

    The target is ``ln max(y_{t+1}^2, eps)`` with ``eps`` from the full
    sample under ``cfg.zero_adjust``; each window derives its own ``eps``
    for estimation.  Windows run in a process pool when ``cfg.n_jobs > 1``;
    results are merged in window order so the output does not depend on
    the pool size.

    Raises
    ------
    ForecastError
        If ``T <= T0 + 10``.
    """
    T = r.T
    if cfg.T0 >= T or T <= cfg.T0 + 10:
        raise ForecastError(f"need T > T0 + 10 (T={T}, T0={cfg.T0})")
    returns = np.asarray(r.returns)
    starts = list(range(0, T - cfg.T0))
    tasks = [(returns, r.labels, s, cfg) for s in starts]
    if cfg.n_jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.n_jobs) as pool:
            results = list(pool.map(_window_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.n_jobs))))
    else:
        results = [_window_task(t) for t in tasks]
    results.sort(key=lambda item: item[0])

    models = cfg.models
    target = log_square_transform(r, cfg.zero_adjust).ystar
    failures: list[WindowFailure] = []
    ok = np.ones(len(starts), dtype=bool)
    success = {m: 0 for m in models}
    for k, (s, out, errs) in enumerate(results):
        date = r.dates[s + cfg.T0]
        for m in models:
            if m in out:
                success[m] += 1
            else:
                ok[k] = False
                failures.append(WindowFailure(m, s, date, errs.get(m, "missing")))
    keep = [k for k in range(len(starts)) if ok[k]]
    if not keep:
        raise ForecastError("no window produced forecasts for every model")
    forecasts = {m: np.array([results[k][1][m] for k in keep]) for m in models}
    idx = [starts[k] + cfg.T0 for k in keep]
    return LossPanel(
        models=models,
        labels=r.labels,
        dates=tuple(r.dates[i] for i in idx),
        actual=target[idx],
        forecasts=forecasts,
        completeness={m: success[m] / len(starts) for m in models},
        failures=failures,
    )


def _loss(e: np.ndarray, loss_type: str) -> np.ndarray:
    if loss_type == "squared":
        return e * e
    if loss_type == "absolute":
        return np.abs(e)
    raise ForecastError(f"unknown loss type {loss_type!r}")


def _errors_2d(e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    return e[:, None] if e.ndim == 1 else e


def _rms(e: np.ndarray, axis: int) -> np.ndarray:
    """Root mean square along ``axis``, scaled first so tiny errors do not underflow."""
    scale = np.max(np.abs(e), axis=axis, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    return np.squeeze(safe, axis=axis) * np.sqrt(np.mean((e / safe) ** 2, axis=axis))


def rmsfe_mafe(lp: LossPanel | np.ndarray, model: str | None = None) -> tuple[float, float]:
    """Per-country RMSE and MAE, each averaged across countries."""
    e = _errors_2d(lp.errors(model) if isinstance(lp, LossPanel) else lp)
    rmsfe = float(np.mean(_rms(e, axis=0)))
    mafe = float(np.mean(np.mean(np.abs(e), axis=0)))
    return rmsfe, mafe


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    loss_type: str
    pair: tuple[str, str] = ("model_1", "model_2")
    degenerate: bool = False
    mean_diff: float = 0.0

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "loss_type": self.loss_type,
            "pair": list(self.pair),
            "degenerate": self.degenerate,
            "mean_diff": self.mean_diff,
        }


def _mean_test(d: np.ndarray) -> tuple[float, float, bool]:
    """Mean, studentized mean with lag-0 HAC variance, degenerate flag."""
    mean = float(d.mean())
    var = float(np.mean((d - mean) ** 2)) / d.size
    scale = max(float(np.max(np.abs(d))), 1e-300)
    if var <= (1e-15 * scale) ** 2 / d.size:
        if mean == 0.0 or abs(mean) <= 1e-15 * scale:
            return 0.0, 0.0, True
        return mean, math.copysign(math.inf, mean), True
    return mean, mean / math.sqrt(var), False


def dm_test(
    e1: np.ndarray,
    e2: np.ndarray,
    loss_type: str = "squared",
    pair: tuple[str, str] = ("model_1", "model_2"),
) -> TestResult:
    """Diebold-Mariano test of equal accuracy, two-sided.

    Two-dimensional error arrays (time by country) are pooled into one
    stacked differential series.  A negative statistic favours ``e1``.
    Identical losses give a degenerate result with ``p = 1``.
    """
    a, b = _errors_2d(e1), _errors_2d(e2)
    if a.shape != b.shape:
        raise ForecastError("error series must have equal shapes")
    if a.shape[0] < 10:
        raise ForecastError("dm_test needs at least 10 periods")
    d = (_loss(a, loss_type) - _loss(b, loss_type)).ravel()
    mean, stat, degenerate = _mean_test(d)
    if degenerate and stat == 0.0:
        return TestResult(0.0, 1.0, loss_type, pair, True, mean)
    p = float(2.0 * stats.norm.sf(abs(stat)))
    return TestResult(float(stat), min(1.0, p), loss_type, pair, degenerate, mean)


def cw_test(
    e_small: np.ndarray,
    e_big: np.ndarray,
    yhat_small: np.ndarray,
    yhat_big: np.ndarray,
    pair: tuple[str, str] = ("small", "big"),
) -> TestResult:
    """Clark-West MSPE-adjusted test; one-sided, large values favour the big model.

    ``f_t = e_small^2 - (e_big^2 - (yhat_small - yhat_big)^2)``.  ``mean_diff``
    holds the raw mean of ``f_t``; ``statistic`` is ``sqrt(P) mean(f) / sd(f)``.
    """
    es, eb = _errors_2d(e_small), _errors_2d(e_big)
    ys, yb = _errors_2d(yhat_small), _errors_2d(yhat_big)
    if not (es.shape == eb.shape == ys.shape == yb.shape):
        raise ForecastError("CW inputs must have equal shapes")
    if es.shape[0] < 10:
        raise ForecastError("cw_test needs at least 10 periods")
    f = (es**2 - (eb**2 - (ys - yb) ** 2)).ravel()
    mean, stat, degenerate = _mean_test(f)
    if degenerate and stat == 0.0:
        return TestResult(0.0, 1.0, "cw", pair, True, mean)
    return TestResult(float(stat), float(stats.norm.sf(stat)), "cw", pair, degenerate, mean)


def bootstrap_ci(
    errors: np.ndarray,
    B: int = 2000,
    level: float = 0.95,
    seed: int = 0,
) -> dict[str, tuple[float, float]]:
    """Percentile intervals for RMSFE and MAFE.

    Time indices are resampled with replacement, the same draw for every
    country, preserving cross-sectional dependence.
    """
    e = _errors_2d(errors)
    if e.size == 0:
        raise ForecastError("bootstrap_ci needs nonempty losses")
    if B < 100:
        warnings.warn(f"only {B} bootstrap replications", RuntimeWarning, stacklevel=2)
    rng = np.random.default_rng(seed)
    P = e.shape[0]
    idx = rng.integers(0, P, size=(B, P))
    draws = e[idx]
    rm = np.mean(_rms(draws, axis=1), axis=1)
    ma = np.mean(np.mean(np.abs(draws), axis=1), axis=1)
    q = [(1 - level) / 2 * 100, (1 + level) / 2 * 100]
    out = {}
    for name, v in (("rmsfe", rm), ("mafe", ma)):
        lo, hi = np.percentile(v, q)
        out[name] = (float(lo), float(hi))
    return out


def loss_matrix(lp: LossPanel, loss_type: str = "squared", models: Sequence[str] | None = None) -> np.ndarray:
    """Models by time matrix of losses averaged across countries."""
    models = models or lp.models
    return np.array([lp.losses(m, loss_type).mean(axis=1) for m in models])


def moving_block_indices(P: int, B: int, rng: np.random.Generator, block: int | None = None) -> np.ndarray:
    """(B, P) moving-block resampling indices; default block length ceil(P^(1/3))."""
    block = block or max(1, math.ceil(P ** (1.0 / 3.0)))
    block = min(block, P)
    n_blocks = math.ceil(P / block)
    starts = rng.integers(0, P - block + 1, size=(B, n_blocks))
    idx = (starts[:, :, None] + np.arange(block)[None, None, :]).reshape(B, -1)
    return idx[:, :P]


@dataclass
class McsResult:
    """Model confidence set under both the T_max and T_R statistics.

    Arrays are aligned with ``models``.  ``v_*`` is the model's statistic
    within the final set for retained models and at its elimination step
    otherwise; rank 1 is the last surviving model.
    """

    models: tuple[str, ...]
    loss: np.ndarray
    rank_M: np.ndarray
    v_M: np.ndarray
    mcs_p_M: np.ndarray
    rank_R: np.ndarray
    v_R: np.ndarray
    mcs_p_R: np.ndarray
    alpha: float

    def included(self, statistic: str = "max") -> np.ndarray:
        p = self.mcs_p_M if statistic == "max" else self.mcs_p_R
        return p >= self.alpha

    def superior_set(self, statistic: str = "max") -> tuple[str, ...]:
        inc = self.included(statistic)
        return tuple(m for m, keep in zip(self.models, inc) if keep)

    def to_dict(self) -> dict:
        def num(v):
            return None if not np.isfinite(v) else float(v)

        return {
            "alpha": self.alpha,
            "models": [
                {
                    "model": m,
                    "loss": float(self.loss[i]),
                    "rank_M": int(self.rank_M[i]),
                    "v_M": num(self.v_M[i]),
                    "mcs_p_M": float(self.mcs_p_M[i]),
                    "rank_R": int(self.rank_R[i]),
                    "v_R": num(self.v_R[i]),
                    "mcs_p_R": float(self.mcs_p_R[i]),
                    "in_set_M": bool(self.included("max")[i]),
                    "in_set_R": bool(self.included("R")[i]),
                }
                for i, m in enumerate(self.models)
            ],
        }


def _mcs_statistics(L: np.ndarray, Lb: np.ndarray, members: list[int], statistic: str):
    """Per-model statistics, test statistic and bootstrap p-value on ``members``."""
    mean = L[members]
    boot = Lb[:, members]
    # rounding in the bootstrap means must not separate identical models
    if np.ptp(mean) <= 1e-12 * max(1.0, float(np.max(np.abs(mean)))) and \
            np.max(np.ptp(boot, axis=1)) <= 1e-12 * max(1.0, float(np.max(np.abs(boot)))):
        return np.zeros(len(members)), 0.0, 1.0
    if statistic == "max":
        d = mean - mean.mean()
        db = boot - boot.mean(axis=1, keepdims=True)
        se = np.sqrt(np.mean((db - d) ** 2, axis=0))
        if np.all(se <= 0):
            return np.zeros(len(members)), 0.0, 1.0
        se = np.where(se > 0, se, np.inf)
        t = d / se
        t_obs = float(np.max(t))
        t_boot = np.max((db - d) / se, axis=1)
        return t, t_obs, float(np.mean(t_boot >= t_obs))
    d = mean[:, None] - mean[None, :]
    db = boot[:, :, None] - boot[:, None, :]
    se = np.sqrt(np.mean((db - d) ** 2, axis=0))
    if np.all(se <= 0):
        return np.zeros(len(members)), 0.0, 1.0
    se = np.where(se > 0, se, np.inf)
    t = d / se
    t_obs = float(np.max(np.abs(t)))
    t_boot = np.max(np.abs(db - d) / se, axis=(1, 2))
    return np.max(t, axis=1), t_obs, float(np.mean(t_boot >= t_obs))


def _mcs_single(L: np.ndarray, Lb: np.ndarray, alpha: float, statistic: str):
    m = L.size
    members = list(range(m))
    pvals = np.ones(m)
    v = np.full(m, np.nan)
    order: list[int] = []
    running = 0.0
    while len(members) > 1:
        t, _, p = _mcs_statistics(L, Lb, members, statistic)
        if p >= 1.0 and np.all(t == 0):
            # remaining models have identical losses
            break
        running = max(running, p)
        worst = members[int(np.argmax(t))]
        v[worst] = float(np.max(t))
        pvals[worst] = running
        order.append(worst)
        members.remove(worst)
    final = [i for i in range(m) if pvals[i] >= alpha]
    if len(final) > 1:
        t, _, _ = _mcs_statistics(L, Lb, final, statistic)
        v[final] = t
    elif final:
        v[final[0]] = 0.0
    survivors = sorted(members, key=lambda i: L[i])
    rank = np.empty(m, dtype=int)
    for pos, i in enumerate(survivors + order[::-1], start=1):
        rank[i] = pos
    return rank, v, pvals


def mcs(
    losses: np.ndarray,
    models: Sequence[str] | None = None,
    alpha: float = 0.05,
    B: int = 5000,
    seed: int = 0,
    block: int | None = None,
) -> McsResult:
    """Model confidence set by sequential elimination.

    Parameters
    ----------
    losses : ndarray
        (m, P) matrix of per-period losses, one row per model.
    models : sequence of str, optional
        Model names.
    alpha : float
        Size of the equivalence tests.
    B : int
        Bootstrap replications; the same moving-block draws are reused at
        every elimination step and for both statistics.
    seed : int
        Seed of the bootstrap.
    block : int, optional
        Block length, default ``ceil(P ** (1/3))``.
    """
    losses = np.atleast_2d(np.asarray(losses, dtype=float))
    m, P = losses.shape
    models = tuple(models) if models is not None else tuple(f"M{i + 1}" for i in range(m))
    if len(models) != m:
        raise ForecastError("number of model names does not match loss rows")
    if not np.all(np.isfinite(losses)):
        raise ForecastError("losses must be finite")
    L = losses.mean(axis=1)
    if m == 1:
        one = np.ones(1)
        return McsResult(models, L, np.ones(1, dtype=int), np.zeros(1), one, np.ones(1, dtype=int),
                         np.zeros(1), one.copy(), alpha)
    rng = np.random.default_rng(seed)
    idx = moving_block_indices(P, B, rng, block)
    Lb = losses[:, idx].mean(axis=2).T
    rank_M, v_M, p_M = _mcs_single(L, Lb, alpha, "max")
    rank_R, v_R, p_R = _mcs_single(L, Lb, alpha, "R")
    return McsResult(models, L, rank_M, v_M, p_M, rank_R, v_R, p_R, alpha)


def sensitivity_grid(
    r: ReturnPanel,
    base: RollingConfig,
    T0_values: Iterable[int] = (200, 250, 300, 350),
    zero_adjusts: Iterable[ZeroAdjust] = (ZeroAdjust("min_nonzero"), ZeroAdjust("percentile_1"), ZeroAdjust("fixed")),
) -> dict[str, dict[str, tuple[float, float]]]:
    """RMSFE/MAFE per model across training windows and zero adjustments."""
    from dataclasses import replace

    out: dict[str, dict[str, tuple[float, float]]] = {}
    for T0 in T0_values:
        lp = rolling_forecast(r, replace(base, T0=T0))
        out[f"T0={T0}"] = {m: rmsfe_mafe(lp, m) for m in lp.models}
    for za in zero_adjusts:
        lp = rolling_forecast(r, replace(base, zero_adjust=za))
        out[f"eps={za.label()}"] = {m: rmsfe_mafe(lp, m) for m in lp.models}
    return out


def evaluate_battery(
    lp: LossPanel,
    dm_benchmark: str = "Net-GO",
    cw_benchmark: str = "Std-DCC",
    B: int = 2000,
    seed: int = 0,
) -> dict:
    """Accuracy table, bootstrap intervals and pairwise tests for a loss panel.

    DM tests compare every model with ``dm_benchmark`` (negative statistic
    favours the benchmark); CW tests treat ``cw_benchmark`` as the small
    model and each other model as the large one.
    """
    for name in (dm_benchmark, cw_benchmark):
        if name not in lp.models:
            raise ForecastError(f"benchmark {name!r} not in loss panel")
    models = lp.models
    out: dict = {"n_forecasts": lp.P, "countries": list(lp.labels), "models": {}}
    for m in models:
        rm, ma = rmsfe_mafe(lp, m)
        ci = bootstrap_ci(lp.errors(m), B=B, seed=seed)
        row = {"rmsfe": rm, "mafe": ma, "rmsfe_ci": list(ci["rmsfe"]), "mafe_ci": list(ci["mafe"])}
        if m != dm_benchmark:
            for loss in ("squared", "absolute"):
                row[f"dm_{loss}"] = dm_test(lp.errors(dm_benchmark), lp.errors(m), loss,
                                            (dm_benchmark, m)).to_dict()
        if m != cw_benchmark:
            row["cw"] = cw_test(lp.errors(cw_benchmark), lp.errors(m), lp.forecasts[cw_benchmark],
                                lp.forecasts[m], (cw_benchmark, m)).to_dict()
        out["models"][m] = row
    out["dm_pairwise_squared"] = {
        a: {b: (1.0 if a == b else dm_test(lp.errors(a), lp.errors(b)).p_value) for b in models}
        for a in models
    }
    out["ranking_rmsfe"] = sorted(models, key=lambda m: out["models"][m]["rmsfe"])
    return out
