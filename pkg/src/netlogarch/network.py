"""Dissimilarity matrices, network weight matrices and graph export.

Six dissimilarity measures are supported.  Three are data based (Euclidean
distance between return paths, correlation distance, Piccolo distance
between log-ARCH coefficient vectors) and are turned into weights by
inverse distance.  Three are model based (CCC, DCC and GO-GARCH
correlations) and use the bounded transform ``w = 1 / (2(1 - rho) + 1)``,
which stays finite at perfect correlation.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .data import ReturnPanel, correlation_matrix
from .garch_uni import fit_log_arch
from .netarch import ZeroAdjust

__all__ = [
    "METHODS",
    "INVERSE_METHODS",
    "BOUNDED_METHODS",
    "NORMALIZATIONS",
    "NetworkError",
    "NetworkWarning",
    "DissimilarityMatrix",
    "WeightMatrix",
    "correlation_distance",
    "bounded_weight",
    "dissimilarity",
    "to_weights",
    "normalize",
    "build_weights",
    "export_graph",
]

INVERSE_METHODS = ("euclidean", "correlation", "piccolo")
BOUNDED_METHODS = ("ccc", "dcc", "go")
METHODS = INVERSE_METHODS + BOUNDED_METHODS
NORMALIZATIONS = ("row_stochastic", "spectral", "none")


class NetworkError(ValueError):
    pass


class NetworkWarning(UserWarning):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DissimilarityMatrix:
    method: str
    d: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise NetworkError(f"unknown dissimilarity method {self.method!r}")
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] != len(self.labels):
            raise NetworkError("dissimilarity must be square and match labels")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise NetworkError("dissimilarities must be finite and nonnegative")
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
        object.__setattr__(self, "d", _frozen(d))


@dataclass(frozen=True)
class WeightMatrix:
    method: str
    w_raw: np.ndarray
    w_norm: np.ndarray
    normalization: str
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.normalization not in NORMALIZATIONS:
            raise NetworkError(f"unknown normalization {self.normalization!r}")
        w_raw, w_norm = np.array(self.w_raw, dtype=float), np.array(self.w_norm, dtype=float)
        if w_raw.shape != w_norm.shape or w_raw.shape != (len(self.labels),) * 2:
            raise NetworkError("weight matrices must be square and match labels")
        if not (np.all(np.isfinite(w_raw)) and np.all(np.isfinite(w_norm))):
            raise NetworkError("weights must be finite")
        if np.any(np.diag(w_raw) != 0) or np.any(np.diag(w_norm) != 0):
            raise NetworkError("weight matrices must have a zero diagonal")
        if not np.array_equal(w_raw, w_raw.T):
            raise NetworkError("raw weights must be symmetric")
        if np.any(w_norm < 0):
            raise NetworkError("normalized weights must be nonnegative")
        object.__setattr__(self, "w_raw", _frozen(w_raw))
        object.__setattr__(self, "w_norm", _frozen(w_norm))

    @property
    def n(self) -> int:
        return len(self.labels)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "normalization": self.normalization,
            "labels": list(self.labels),
            "w_raw": self.w_raw.tolist(),
            "w_norm": self.w_norm.tolist(),
        }


def correlation_distance(rho: np.ndarray | float) -> np.ndarray | float:
    """``sqrt(2 (1 - rho))``; correlations above one are clamped with a warning."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho > 1.0):
        warnings.warn("correlation above 1 clamped to 1", NetworkWarning, stacklevel=2)
        rho = np.minimum(rho, 1.0)
    d = np.sqrt(2.0 * (1.0 - rho))
    return float(d) if d.ndim == 0 else d


def bounded_weight(rho: np.ndarray | float) -> np.ndarray | float:
    """``1 / (2 (1 - rho) + 1)``: equals 1 at rho = 1 and is increasing in rho."""
    rho = np.minimum(np.asarray(rho, dtype=float), 1.0)
    w = 1.0 / (2.0 * (1.0 - rho) + 1.0)
    return float(w) if w.ndim == 0 else w


def _model_correlation(method: str, fit: Any) -> np.ndarray:
    if method == "ccc":
        R = getattr(fit, "R", None)
    else:
        # time-averaged correlations of the in-sample R_t path
        R = getattr(fit, "R_mean", None)
    if R is None:
        raise NetworkError(
            f"method {method!r} needs a fitted {method.upper()} model "
            f"({'CccFit' if method == 'ccc' else 'DccFit' if method == 'dcc' else 'GoGarchFit'})"
        )
    return np.asarray(R, dtype=float)


def dissimilarity(
    r: ReturnPanel,
    method: str,
    fit: Any = None,
    *,
    P: int = 5,
    zero_adjust: ZeroAdjust | None = None,
) -> DissimilarityMatrix:
    """Pairwise dissimilarities between the series of ``r``.

    Parameters
    ----------
    r : ReturnPanel
        Training returns.
    method : str
        One of ``euclidean``, ``correlation``, ``piccolo``, ``ccc``, ``dcc``, ``go``.
    fit : CccFit, DccFit or GoGarchFit, optional
        Required for the model-based methods.
    P : int
        Log-ARCH lag order for the Piccolo distance.
    zero_adjust : ZeroAdjust, optional
        Zero handling for the log-ARCH regressions.
    """
    if method not in METHODS:
        raise NetworkError(f"unknown dissimilarity method {method!r}; choose from {METHODS}")
    x = np.asarray(r.returns)
    if method == "euclidean":
        diff = x[:, :, None] - x[:, None, :]
        d = np.sqrt(np.einsum("tij,tij->ij", diff, diff))
    elif method == "correlation":
        d = correlation_distance(correlation_matrix(r))
    elif method == "piccolo":
        coefs = np.array([fit_log_arch(x[:, i], P, zero_adjust).padded(P) for i in range(r.n)])
        diff = coefs[:, None, :] - coefs[None, :, :]
        d = np.sqrt(np.sum(diff * diff, axis=2))
    else:
        d = correlation_distance(_model_correlation(method, fit))
    return DissimilarityMatrix(method, d, tuple(r.labels))


def to_weights(d: DissimilarityMatrix) -> WeightMatrix:
    """Raw (unnormalized) weights from a dissimilarity matrix.

    Raises
    ------
    NetworkError
        If an off-diagonal distance is zero under inverse-distance weighting.
    """
    n = len(d.labels)
    off = ~np.eye(n, dtype=bool)
    if d.method in INVERSE_METHODS:
        if np.any(d.d[off] == 0):
            i, j = np.argwhere((d.d == 0) & off)[0]
            raise NetworkError(
                f"coincident nodes {d.labels[i]!r} and {d.labels[j]!r}: zero distance "
                "has no inverse-distance weight"
            )
        w = np.zeros((n, n))
        w[off] = 1.0 / d.d[off]
    else:
        w = 1.0 / (d.d * d.d + 1.0)
    np.fill_diagonal(w, 0.0)
    w = 0.5 * (w + w.T)
    return WeightMatrix(d.method, w, w.copy(), "none", d.labels)


def normalize(w: WeightMatrix, scheme: str = "row_stochastic") -> WeightMatrix:
    """Normalized copy of ``w``; the raw weights are kept alongside."""
    raw = np.asarray(w.w_raw)
    if scheme == "row_stochastic":
        sums = raw.sum(axis=1)
        if np.any(sums <= 0):
            bad = w.labels[int(np.argmax(sums <= 0))]
            raise NetworkError(f"row of {bad!r} has no positive weight; cannot row-normalize")
        norm = raw / sums[:, None]
    elif scheme == "spectral":
        lam = np.max(np.abs(np.linalg.eigvalsh(raw)))
        if lam <= 0:
            raise NetworkError("zero weight matrix cannot be spectrally normalized")
        norm = raw / lam
    elif scheme == "none":
        norm = raw.copy()
    else:
        raise NetworkError(f"unknown normalization {scheme!r}; choose from {NORMALIZATIONS}")
    return WeightMatrix(w.method, raw, norm, scheme, w.labels)


def build_weights(
    r: ReturnPanel,
    method: str,
    fit: Any = None,
    *,
    scheme: str = "row_stochastic",
    P: int = 5,
    zero_adjust: ZeroAdjust | None = None,
) -> WeightMatrix:
    """Dissimilarity, raw weights and normalization in one call."""
    return normalize(to_weights(dissimilarity(r, method, fit, P=P, zero_adjust=zero_adjust)), scheme)


def export_graph(w: WeightMatrix, path: str | Path, labels: Sequence[str] | None = None) -> tuple[Path, Path]:
    """Write an undirected edge list CSV and a JSON adjacency dump.

    Edges come from the raw (symmetric) weights, one row per unordered pair,
    sorted by (source, target).  Returns the two paths written.
    """
    path = Path(path)
    labels = tuple(labels) if labels is not None else w.labels
    edges = []
    for i in range(w.n):
        for j in range(i + 1, w.n):
            a, b = sorted((labels[i], labels[j]))
            edges.append((a, b, float(w.w_raw[i, j])))
    edges.sort()
    json_path = path.with_suffix(".json")
    with path.open("w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["source", "target", "weight"])
        for a, b, v in edges:
            out.writerow([a, b, repr(v)])
    payload = w.to_dict()
    payload["labels"] = list(labels)
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path, json_path
