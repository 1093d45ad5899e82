"""Command-line front end.

Every subcommand reads an optional JSON run configuration, applies flag
overrides and writes its artifacts plus a ``manifest.json`` under the
output directory.  The seed is mandatory.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
import scipy
import statsmodels

from . import __version__
from .data import (
    DataError,
    ReturnPanel,
    correlation_matrix,
    describe_panel,
    format_matrix,
    format_stats_table,
    load_prices,
    log_returns,
    prices_from_returns,
    write_prices,
)
from .forecast_eval import (
    DEFAULT_ROSTER,
    ForecastError,
    LossPanel,
    RollingConfig,
    evaluate_battery,
    loss_matrix,
    mcs,
    rolling_forecast,
    sensitivity_grid,
)
from .garch_multi import MGarchError, fit_ccc, fit_dcc, fit_gogarch, fit_univariate, givens_rotation
from .garch_uni import GarchError, GarchParams
from .netarch import NetArchError, ZeroAdjust, fit_gmm, log_square_transform
from .network import (METHODS, NORMALIZATIONS, NetworkError, WeightMatrix, build_weights, export_graph,
                      normalize)
from .sim import NetSimSpec, SimError, simulate_dcc, simulate_gogarch, simulate_net_logarch

OUTPUT_ENV = "NETLOGARCH_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4
NUMERICAL_ERRORS = (GarchError, MGarchError, NetArchError, NetworkError, ForecastError,
                    np.linalg.LinAlgError, FloatingPointError, RuntimeError)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    data: str | None = None
    zero_adjust: str = "min"
    T0: int = 300
    roster: tuple[str, ...] = DEFAULT_ROSTER
    normalization: str = "row_stochastic"
    piccolo_P: int = 5
    bootstrap_B: int = 2000
    mcs_alpha: float = 0.05
    mcs_B: int = 5000
    seed: int | None = None
    output_dir: str | None = None
    n_jobs: int = 1
    gmm_moments: str = "linear_quadratic"
    go_starts: int = 4
    dm_benchmark: str = "Net-GO"
    cw_benchmark: str = "Std-DCC"
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.seed is None:
            raise ConfigError("a seed is required (--seed or \"seed\" in the config file)")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        try:
            ZeroAdjust.parse(self.zero_adjust)
        except NetArchError as exc:
            raise ConfigError(str(exc)) from None
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"normalization must be one of {NORMALIZATIONS}")
        unknown = [m for m in self.roster if m not in DEFAULT_ROSTER]
        if unknown:
            raise ConfigError(f"unknown roster models {unknown}; choose from {list(DEFAULT_ROSTER)}")
        if self.T0 < 60:
            raise ConfigError("T0 must be at least 60")
        if self.piccolo_P < 1:
            raise ConfigError("piccolo_P must be positive")
        if self.bootstrap_B < 1 or self.mcs_B < 1:
            raise ConfigError("bootstrap replication counts must be positive")
        if not 0 < self.mcs_alpha < 1:
            raise ConfigError("mcs_alpha must lie in (0, 1)")
        if self.n_jobs < 1:
            raise ConfigError("n_jobs must be at least 1")
        if self.gmm_moments not in ("linear_quadratic", "linear"):
            raise ConfigError("gmm_moments must be 'linear_quadratic' or 'linear'")

    @property
    def zero(self) -> ZeroAdjust:
        return ZeroAdjust.parse(self.zero_adjust)

    def rolling(self) -> RollingConfig:
        return RollingConfig(
            T0=self.T0, zero_adjust=self.zero, roster=tuple(self.roster),
            normalization=self.normalization, piccolo_P=self.piccolo_P,
            gmm_moments=self.gmm_moments, go_starts=self.go_starts, seed=self.seed,
            n_jobs=self.n_jobs,
        )

    def hashable(self) -> dict:
        """Settings that determine results (paths, parallelism excluded)."""
        d = asdict(self)
        for key in ("output_dir", "n_jobs", "data"):
            d.pop(key)
        d["roster"] = list(d["roster"])
        return d


CONFIG_KEYS = {f.name for f in fields(RunConfig)} - {"extra"}


def load_config(path: str | None, overrides: dict[str, Any]) -> RunConfig:
    values: dict[str, Any] = {}
    if path:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(raw) - CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
        values.update(raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "roster" in values:
        roster = values["roster"]
        values["roster"] = tuple(roster.split(",") if isinstance(roster, str) else roster)
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "isoformat"):
        return obj.isoformat()
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


class Outputs:
    """Output directory that records every artifact for the manifest."""

    def __init__(self, root: Path) -> None:
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self.artifacts: list[str] = []

    def path(self, name: str) -> Path:
        p = self.root / name
        if name not in self.artifacts:
            self.artifacts.append(name)
        return p

    def json(self, name: str, obj: Any) -> Path:
        p = self.path(name)
        p.write_text(dumps(obj), encoding="utf-8")
        return p

    def text(self, name: str, text: str) -> Path:
        p = self.path(name)
        p.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        return p

    def manifest(self, command: str, cfg: RunConfig) -> None:
        config = cfg.hashable()
        digest = hashlib.sha256(json.dumps(_jsonable(config), sort_keys=True).encode()).hexdigest()
        self.json("manifest.json", {
            "command": command,
            "config": config,
            "config_hash": digest,
            "seed": cfg.seed,
            "data": cfg.data,
            "artifacts": sorted(set(self.artifacts) | {"manifest.json"}),
            "versions": {
                "netlogarch": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "statsmodels": statsmodels.__version__,
            },
        })


def _returns(cfg: RunConfig) -> ReturnPanel:
    if not cfg.data:
        raise ConfigError("no data file given (--data or \"data\" in the config file)")
    path = Path(cfg.data)
    if not path.exists():
        raise DataError(f"data file {path} not found")
    return log_returns(load_prices(path))


# --- report sections -------------------------------------------------------

def _garch_table(fits) -> str:
    lines = [f"{'Series':<14}{'mu':>12}{'omega':>12}{'alpha1':>10}{'beta1':>10}{'shape':>10}{'LogLik':>12}"]
    for f in fits:
        p = f.params
        nu = f"{p.nu:10.4f}" if p.nu is not None else f"{'-':>10}"
        beta = p.beta[0] if p.beta else 0.0
        lines.append(f"{f.label:<14}{p.mu:12.6f}{p.omega:12.3e}{p.alpha[0]:10.4f}{beta:10.4f}{nu}{f.log_lik:12.3f}")
    return "\n".join(lines)


def _section(title: str, body: str) -> str:
    return f"{title}\n{'=' * len(title)}\n{body}\n"


def _describe(r: ReturnPanel, out: Outputs) -> str:
    rows = describe_panel(r)
    corr = correlation_matrix(r)
    out.json("describe.json", {"statistics": [s.as_dict() for s in rows],
                               "correlation": {"labels": list(r.labels), "matrix": corr}})
    return (_section("Descriptive statistics of log returns", format_stats_table(rows))
            + "\n" + _section("Return correlations", format_matrix(corr, r.labels)))


def _mgarch_summary(fit) -> dict:
    return fit.to_dict()


def _gmm_table(results: dict) -> str:
    lines = [f"{'Network':<14}{'Normalization':<16}{'rho':>9}{'se':>9}{'sigma2':>9}  gamma"]
    for key in sorted(results):
        res = results[key]
        if "error" in res:
            lines.append(f"{res['method']:<14}{res['normalization']:<16}  {res['error']}")
            continue
        g = " ".join(f"{v:.3f}" for v in res["gamma"])
        lines.append(f"{res['method']:<14}{res['normalization']:<16}{res['rho']:9.4f}{res['rho_se']:9.4f}"
                     f"{res['sigma2']:9.4f}  {g}")
    return "\n".join(lines)


def _accuracy_table(battery: dict) -> str:
    lines = [f"{'Model':<16}{'RMSFE':>9}{'MAFE':>9}{'RMSFE 95% CI':>22}{'DM p (sq)':>11}{'CW p':>9}"]
    for m in battery["ranking_rmsfe"]:
        row = battery["models"][m]
        dm = row.get("dm_squared", {}).get("p_value")
        cw = row.get("cw", {}).get("p_value")
        ci = row["rmsfe_ci"]
        lines.append(f"{m:<16}{row['rmsfe']:9.4f}{row['mafe']:9.4f}   [{ci[0]:7.4f}, {ci[1]:7.4f}]"
                     f"{'-' if dm is None else f'{dm:.4f}':>11}{'-' if cw is None else f'{cw:.4f}':>9}")
    return "\n".join(lines)


def _mcs_table(res) -> str:
    lines = [f"{'Model':<16}{'Loss':>9}{'Rank_M':>7}{'v_M':>9}{'p_M':>8}{'Rank_R':>7}{'v_R':>9}{'p_R':>8}  in set"]
    order = np.argsort(res.rank_M)
    for i in order:
        fmt = lambda v: f"{v:9.4f}" if np.isfinite(v) else f"{'-':>9}"  # noqa: E731
        lines.append(f"{res.models[i]:<16}{res.loss[i]:9.4f}{res.rank_M[i]:7d}{fmt(res.v_M[i])}{res.mcs_p_M[i]:8.4f}"
                     f"{res.rank_R[i]:7d}{fmt(res.v_R[i])}{res.mcs_p_R[i]:8.4f}  {'yes' if res.included()[i] else 'no'}")
    return "\n".join(lines)


# --- subcommands -----------------------------------------------------------

def cmd_describe(cfg: RunConfig, args, out: Outputs) -> None:
    report = _describe(_returns(cfg), out)
    out.text("describe.txt", report)
    print(report)


def cmd_fit_garch(cfg: RunConfig, args, out: Outputs) -> None:
    r = _returns(cfg)
    fits = fit_univariate(r, seed=cfg.seed)
    out.json("garch.json", {"fits": [f.to_dict() for f in fits]})
    report = _section("Univariate GARCH(1,1) with Student-t innovations", _garch_table(fits))
    out.text("garch.txt", report)
    print(report)


def _fit_mgarch_models(r: ReturnPanel, models: Sequence[str], cfg: RunConfig):
    fits: dict[str, Any] = {}
    uni = fit_univariate(r, seed=cfg.seed) if {"ccc", "dcc"} & set(models) else None
    if "ccc" in models:
        fits["ccc"] = fit_ccc(r, uni_fits=uni)
    if "dcc" in models:
        fits["dcc"] = fit_dcc(r, uni_fits=uni)
    if "go" in models:
        fits["go"] = fit_gogarch(r, n_starts=cfg.go_starts, seed=cfg.seed)
    return uni, fits


def _mgarch_report(fits: dict) -> str:
    lines = [f"{'Model':<10}{'LogLik':>12}{'AIC':>10}{'BIC':>10}{'k':>5}  details"]
    for key, f in fits.items():
        extra = ""
        if key == "dcc":
            extra = f"a={f.a:.4f} (se {f.std_errors[0]:.4f})  b={f.b:.4f} (se {f.std_errors[1]:.4f})"
        if key in ("ccc", "dcc") and f.nu is not None:
            extra += f"  shape={f.nu:.3f}"
        lines.append(f"{key.upper():<10}{f.log_lik:12.3f}{f.aic:10.4f}{f.bic:10.4f}{f.n_params:5d}  {extra}")
    body = "\n".join(lines)
    if "go" in fits:
        g = fits["go"]
        body += "\n\nGO-GARCH rotation U\n" + format_matrix(g.U, g.labels)
        body += "\n\nFactor GARCH(1,1): " + "; ".join(
            f"({w:.4g}, {a:.4f}, {b:.4f})" for w, a, b in zip(g.omega, g.alpha, g.beta))
    return body


def cmd_fit_mgarch(cfg: RunConfig, args, out: Outputs) -> None:
    r = _returns(cfg)
    models = [m.strip() for m in args.models.split(",")]
    bad = [m for m in models if m not in ("ccc", "dcc", "go")]
    if bad:
        raise ConfigError(f"unknown multivariate models {bad}")
    _, fits = _fit_mgarch_models(r, models, cfg)
    out.json("mgarch.json", {k: (f.to_dict(include_path=args.include_path) if k != "ccc" else f.to_dict())
                             for k, f in fits.items()})
    report = _section("Multivariate GARCH fits", _mgarch_report(fits))
    out.text("mgarch.txt", report)
    print(report)


def _weights_for(r: ReturnPanel, methods: Sequence[str], cfg: RunConfig, fits: dict, scheme: str) -> dict:
    result = {}
    for method in methods:
        fit = fits.get(method)
        result[method] = build_weights(r, method, fit, scheme=scheme, P=cfg.piccolo_P, zero_adjust=cfg.zero)
    return result


def _methods(text: str | None) -> list[str]:
    methods = list(METHODS) if not text else [m.strip() for m in text.split(",")]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ConfigError(f"unknown network methods {bad}; choose from {list(METHODS)}")
    return methods


def cmd_network(cfg: RunConfig, args, out: Outputs) -> None:
    r = _returns(cfg)
    methods = _methods(args.methods)
    _, fits = _fit_mgarch_models(r, [m for m in methods if m in ("ccc", "dcc", "go")], cfg)
    weights = _weights_for(r, methods, cfg, fits, cfg.normalization)
    lines = []
    for m, w in weights.items():
        export_graph(w, out.path(f"edges_{m}.csv"))
        out.path(f"edges_{m}.json")
        lines.append(f"{m} ({w.normalization})\n" + format_matrix(w.w_norm, w.labels))
    report = _section("Network weight matrices", "\n\n".join(lines))
    out.text("network.txt", report)
    print(report)


def _load_weights(path: str, n: int) -> np.ndarray:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"weights file {path} not found") from None
    W = np.asarray(raw["w_norm"] if isinstance(raw, dict) else raw, dtype=float)
    if W.shape != (n, n):
        raise ConfigError(f"weights file holds a {W.shape} matrix, expected {(n, n)}")
    return W


def _recovery(fit, truth: dict) -> dict:
    rho_true = float(truth["rho"])
    gamma_true = np.asarray(truth["gamma"], dtype=float)
    gz = (fit.gamma - gamma_true) / fit.gamma_se
    rz = (fit.rho - rho_true) / fit.rho_se if fit.rho_se > 0 else 0.0
    return {
        "rho_true": rho_true,
        "rho_hat": fit.rho,
        "rho_se": fit.rho_se,
        "rho_within_2se": bool(abs(rz) <= 2),
        "gamma_true": gamma_true,
        "gamma_hat": fit.gamma,
        "gamma_se": fit.gamma_se,
        "gamma_within_2se": (np.abs(gz) <= 2).tolist(),
    }


def cmd_fit_net(cfg: RunConfig, args, out: Outputs) -> None:
    r = _returns(cfg)
    ys = log_square_transform(r, cfg.zero)
    results: dict[str, dict] = {}
    if args.weights:
        W = _load_weights(args.weights, r.n)
        fit = fit_gmm(ys, W, moments=cfg.gmm_moments)
        res = fit.to_dict() | {"method": "given", "normalization": "given"}
        if args.truth:
            res["recovery"] = _recovery(fit, json.loads(Path(args.truth).read_text(encoding="utf-8")))
        results["given"] = res
    else:
        methods = _methods(args.methods)
        _, fits = _fit_mgarch_models(r, [m for m in methods if m in ("ccc", "dcc", "go")], cfg)
        schemes = list(NORMALIZATIONS) if args.all_normalizations else [cfg.normalization]
        for scheme in schemes:
            for method, w in _weights_for(r, methods, cfg, fits, scheme).items():
                key = f"{method}/{scheme}"
                try:
                    results[key] = fit_gmm(ys, w, moments=cfg.gmm_moments).to_dict() | {
                        "method": method, "normalization": scheme}
                except NetArchError as exc:
                    results[key] = {"method": method, "normalization": scheme, "error": str(exc)}
    out.json("netfit.json", results)
    report = _section("Network log-ARCH GMM estimates", _gmm_table(results))
    if "given" in results and "recovery" in results["given"]:
        rec = results["given"]["recovery"]
        report += (f"\nRecovery: rho_hat={rec['rho_hat']:.4f} (true {rec['rho_true']:.4f}, se {rec['rho_se']:.4f}), "
                   f"within 2 SE: {rec['rho_within_2se']}; gamma within 2 SE: "
                   f"{sum(rec['gamma_within_2se'])}/{len(rec['gamma_within_2se'])}\n")
    out.text("netfit.txt", report)
    print(report)


def _forecast(cfg: RunConfig, r: ReturnPanel, out: Outputs) -> LossPanel:
    lp = rolling_forecast(r, cfg.rolling())
    lp.to_csv(out.path("losses.csv"))
    out.json("completeness.json", {
        "completeness": lp.completeness,
        "n_forecasts": lp.P,
        "failures": [{"model": f.model, "window": f.window, "date": f.date, "error": f.error} for f in lp.failures],
    })
    lp.check_completeness(cfg.rolling().min_completeness)
    return lp


def cmd_forecast(cfg: RunConfig, args, out: Outputs) -> None:
    lp = _forecast(cfg, _returns(cfg), out)
    print(f"{lp.P} forecast dates, {len(lp.models)} models; losses written to {out.root / 'losses.csv'}")


def _losses_path(args, out: Outputs) -> Path:
    path = Path(args.losses) if args.losses else out.root / "losses.csv"
    if not path.exists():
        raise DataError(f"loss file {path} not found (run 'forecast' first)")
    return path


def _evaluate(cfg: RunConfig, lp: LossPanel, out: Outputs) -> str:
    for key in ("dm_benchmark", "cw_benchmark"):
        if getattr(cfg, key) not in lp.models:
            raise ConfigError(f"{key} {getattr(cfg, key)!r} is not among the models {list(lp.models)}")
    battery = evaluate_battery(lp, cfg.dm_benchmark, cfg.cw_benchmark, B=cfg.bootstrap_B, seed=cfg.seed)
    out.json("evaluation.json", battery)
    return _section("Forecast accuracy and comparison tests", _accuracy_table(battery))


def cmd_evaluate(cfg: RunConfig, args, out: Outputs) -> None:
    report = _evaluate(cfg, LossPanel.from_csv(_losses_path(args, out)), out)
    out.text("evaluation.txt", report)
    print(report)


def _mcs(cfg: RunConfig, lp: LossPanel, out: Outputs, loss_type: str = "squared") -> str:
    res = mcs(loss_matrix(lp, loss_type), lp.models, alpha=cfg.mcs_alpha, B=cfg.mcs_B, seed=cfg.seed)
    out.json("mcs.json", res.to_dict() | {"loss_type": loss_type, "B": cfg.mcs_B})
    return _section(f"Model confidence set (alpha={cfg.mcs_alpha}, B={cfg.mcs_B})", _mcs_table(res))


def cmd_mcs(cfg: RunConfig, args, out: Outputs) -> None:
    report = _mcs(cfg, LossPanel.from_csv(_losses_path(args, out)), out, args.loss_type)
    out.text("mcs.txt", report)
    print(report)


def _random_weights(n: int, rng: np.random.Generator) -> np.ndarray:
    M = rng.uniform(0.2, 1.0, (n, n))
    M = 0.5 * (M + M.T)
    np.fill_diagonal(M, 0.0)
    return M


def cmd_simulate(cfg: RunConfig, args, out: Outputs) -> None:
    rng = np.random.default_rng(cfg.seed)
    n, T = args.n, args.T
    labels = [f"S{i + 1}" for i in range(n)]
    truth: dict[str, Any] = {"kind": args.kind, "n": n, "T": T, "seed": cfg.seed}
    try:
        if args.kind == "net":
            raw = _random_weights(n, rng)
            w = normalize(WeightMatrix("euclidean", raw, raw, "none", tuple(labels)), cfg.normalization)
            gamma = np.full(n, args.gamma)
            phi0 = np.full(n, args.phi0)
            spec = NetSimSpec(w.w_norm, T, args.rho, gamma, phi0, innovation=args.innovation, seed=cfg.seed)
            sim = simulate_net_logarch(spec, labels)
            returns = sim.returns
            truth |= {"rho": args.rho, "gamma": gamma, "phi0": phi0, "innovation": args.innovation}
            out.json("weights.json", w.to_dict())
        elif args.kind == "dcc":
            R = np.full((n, n), args.rbar)
            np.fill_diagonal(R, 1.0)
            g = GarchParams(0.0, 2e-4, (0.10,), (0.85,), args.nu)
            returns = simulate_dcc(n, T, args.a, args.b, R, g, seed=cfg.seed, nu=args.nu, labels=labels)
            truth |= {"a": args.a, "b": args.b, "Rbar": R, "garch": {"omega": 2e-4, "alpha": 0.10, "beta": 0.85},
                      "nu": args.nu}
        else:
            U = givens_rotation(rng.uniform(-np.pi, np.pi, n * (n - 1) // 2), n)
            Z = 0.05 * np.diag(np.linspace(1.0, 0.5, n)) @ U
            alpha = np.linspace(0.05, 0.25, n)
            beta = np.linspace(0.90, 0.60, n)
            omega = 1.0 - alpha - beta
            returns, _ = simulate_gogarch(Z, omega, alpha, beta, T, seed=cfg.seed, labels=labels)
            truth |= {"Z": Z, "U": U, "omega": omega, "alpha": alpha, "beta": beta}
    except SimError as exc:
        raise ConfigError(str(exc)) from None
    write_prices(prices_from_returns(returns), out.path("prices.csv"))
    out.json("truth.json", truth)
    print(f"simulated {args.kind} panel with n={n}, T={T}; prices written to {out.root / 'prices.csv'}")


def cmd_reproduce(cfg: RunConfig, args, out: Outputs) -> None:
    r = _returns(cfg)
    sections = [_describe(r, out)]
    uni, fits = _fit_mgarch_models(r, ["ccc", "dcc", "go"], cfg)
    out.json("garch.json", {"fits": [f.to_dict() for f in uni]})
    sections.append(_section("Univariate GARCH(1,1) with Student-t innovations", _garch_table(uni)))
    out.json("mgarch.json", {k: f.to_dict() for k, f in fits.items()})
    sections.append(_section("Multivariate GARCH fits", _mgarch_report(fits)))

    ys = log_square_transform(r, cfg.zero)
    netfits: dict[str, dict] = {}
    for scheme in NORMALIZATIONS:
        for method, w in _weights_for(r, METHODS, cfg, fits, scheme).items():
            if scheme == cfg.normalization:
                export_graph(w, out.path(f"edges_{method}.csv"))
                out.path(f"edges_{method}.json")
            try:
                netfits[f"{method}/{scheme}"] = fit_gmm(ys, w, moments=cfg.gmm_moments).to_dict() | {
                    "method": method, "normalization": scheme}
            except NetArchError as exc:
                netfits[f"{method}/{scheme}"] = {"method": method, "normalization": scheme, "error": str(exc)}
    out.json("netfit.json", netfits)
    sections.append(_section("Network log-ARCH GMM estimates", _gmm_table(netfits)))

    lp = _forecast(cfg, r, out)
    sections.append(_evaluate(cfg, lp, out))
    sections.append(_mcs(cfg, lp, out))
    if not args.skip_sensitivity:
        grid = sensitivity_grid(r, cfg.rolling())
        out.json("sensitivity.json", grid)
        lines = []
        for key, per_model in grid.items():
            cells = "  ".join(f"{m}={v[0]:.4f}" for m, v in per_model.items())
            lines.append(f"{key}: {cells}")
        sections.append(_section("Forecast accuracy sensitivity (RMSFE)", "\n".join(lines)))
    report = "\n".join(sections)
    out.text("report.txt", report)
    out.json("summary.json", {
        "descriptive": json.loads((out.root / "describe.json").read_text()),
        "garch": json.loads((out.root / "garch.json").read_text()),
        "mgarch": json.loads((out.root / "mgarch.json").read_text()),
        "network_gmm": netfits,
        "evaluation": json.loads((out.root / "evaluation.json").read_text()),
        "mcs": json.loads((out.root / "mcs.json").read_text()),
    })
    print(report)


COMMANDS: dict[str, Callable] = {
    "describe": cmd_describe,
    "fit-garch": cmd_fit_garch,
    "fit-mgarch": cmd_fit_mgarch,
    "network": cmd_network,
    "fit-net": cmd_fit_net,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "mcs": cmd_mcs,
    "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--data", help="price CSV (date column, one column per series)")
    common.add_argument("--seed", type=int, help="RNG seed (required here or in the config)")
    common.add_argument("--output-dir", help=f"artifact directory (env {OUTPUT_ENV} also accepted)")
    common.add_argument("--zero-adjust", help="zero replacement: min, 1%%ile, fixed or a number")
    common.add_argument("--T0", type=int, help="training window length")
    common.add_argument("--roster", help="comma-separated model roster")
    common.add_argument("--normalization", choices=NORMALIZATIONS, help="weight normalization")
    common.add_argument("--piccolo-p", dest="piccolo_P", type=int, help="log-ARCH lag order for Piccolo")
    common.add_argument("--bootstrap-b", dest="bootstrap_B", type=int, help="bootstrap replications for CIs")
    common.add_argument("--mcs-alpha", type=float, help="MCS level")
    common.add_argument("--mcs-b", dest="mcs_B", type=int, help="MCS bootstrap replications")
    common.add_argument("--n-jobs", type=int, help="worker processes for rolling windows")
    common.add_argument("--gmm-moments", choices=("linear_quadratic", "linear"), help="GMM moment set")

    parser = argparse.ArgumentParser(prog="netlogarch", description="Network log-ARCH volatility toolkit")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("describe", parents=[common], help="descriptive statistics and correlations")
    sub.add_parser("fit-garch", parents=[common], help="univariate GARCH(1,1)-t per series")
    p = sub.add_parser("fit-mgarch", parents=[common], help="CCC, DCC and GO-GARCH fits")
    p.add_argument("--models", default="ccc,dcc,go")
    p.add_argument("--include-path", action="store_true", help="write full R_t paths")
    p = sub.add_parser("network", parents=[common], help="weight matrices and edge lists")
    p.add_argument("--methods", help="comma-separated subset of " + ",".join(METHODS))
    p = sub.add_parser("fit-net", parents=[common], help="GMM fits of the network log-ARCH model")
    p.add_argument("--methods", help="comma-separated subset of " + ",".join(METHODS))
    p.add_argument("--weights", help="JSON weight matrix (w_norm) instead of derived networks")
    p.add_argument("--truth", help="simulation truth JSON for a recovery report")
    p.add_argument("--all-normalizations", action="store_true")
    sub.add_parser("forecast", parents=[common], help="rolling one-step forecasts")
    p = sub.add_parser("evaluate", parents=[common], help="RMSFE/MAFE, CIs, DM and CW tests")
    p.add_argument("--losses", help="loss CSV written by 'forecast'")
    p = sub.add_parser("mcs", parents=[common], help="model confidence set")
    p.add_argument("--losses", help="loss CSV written by 'forecast'")
    p.add_argument("--loss-type", choices=("squared", "absolute"), default="squared")
    p = sub.add_parser("simulate", parents=[common], help="simulate a panel with known parameters")
    p.add_argument("--kind", choices=("net", "dcc", "gogarch"), default="net")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--T", type=int, default=2000)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=0.2)
    p.add_argument("--phi0", type=float, default=-0.5)
    p.add_argument("--innovation", choices=("log_chi2", "gaussian"), default="log_chi2")
    p.add_argument("--a", type=float, default=0.05)
    p.add_argument("--b", type=float, default=0.90)
    p.add_argument("--rbar", type=float, default=0.5)
    p.add_argument("--nu", type=float, default=None)
    p = sub.add_parser("reproduce", parents=[common], help="full pipeline and report")
    p.add_argument("--skip-sensitivity", action="store_true", help="skip the T0 / zero-adjustment grid")
    return parser


OVERRIDE_KEYS = ("data", "seed", "output_dir", "zero_adjust", "T0", "roster", "normalization", "piccolo_P",
                 "bootstrap_B", "mcs_alpha", "mcs_B", "n_jobs", "gmm_moments")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {k: getattr(args, k) for k in OVERRIDE_KEYS}
        env_dir = os.environ.get(OUTPUT_ENV)
        if overrides["output_dir"] is None and env_dir:
            overrides["output_dir"] = env_dir
        cfg = load_config(args.config, overrides)
        out = Outputs(Path(cfg.output_dir or "netlogarch-output"))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            COMMANDS[args.command](cfg, args, out)
        out.manifest(args.command, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
