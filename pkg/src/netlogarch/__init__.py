"""Network log-ARCH volatility models with GARCH-derived weight matrices.

Modules
-------
data
    Price ingestion, log returns and descriptive statistics.
garch_uni
    Univariate GARCH(p, q) and log-ARCH estimation.
garch_multi
    CCC-, DCC- and GO-GARCH.
network
    Dissimilarity and weight matrices.
netarch
    Log-squared transform and GMM estimation of the network log-ARCH model.
forecast_eval
    Rolling forecasts, RMSFE/MAFE, DM/CW tests, bootstrap intervals, MCS.
sim
    Seeded data generators.
cli
    Command-line front end.
"""

from .data import DataError, PricePanel, ReturnPanel, describe, load_prices, log_returns
from .garch_multi import fit_ccc, fit_dcc, fit_gogarch, mgarch_variance_forecast
from .garch_uni import GarchParams, GarchSpec, fit_garch, fit_log_arch
from .netarch import ZeroAdjust, fit_gmm, forecast_logvol, log_square_transform
from .network import build_weights, dissimilarity, export_graph, normalize, to_weights

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "PricePanel",
    "ReturnPanel",
    "describe",
    "load_prices",
    "log_returns",
    "fit_ccc",
    "fit_dcc",
    "fit_gogarch",
    "mgarch_variance_forecast",
    "GarchParams",
    "GarchSpec",
    "fit_garch",
    "fit_log_arch",
    "ZeroAdjust",
    "fit_gmm",
    "forecast_logvol",
    "log_square_transform",
    "build_weights",
    "dissimilarity",
    "export_graph",
    "normalize",
    "to_weights",
]
