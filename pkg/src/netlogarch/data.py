"""Price-panel ingestion, log returns and descriptive statistics."""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

__all__ = [
    "DataError",
    "PricePanel",
    "ReturnPanel",
    "DescriptiveStats",
    "load_prices",
    "write_prices",
    "log_returns",
    "describe",
    "describe_panel",
    "correlation_matrix",
    "format_stats_table",
    "format_matrix",
    "prices_from_returns",
]

JB_DISPLAY_FLOOR = 2.2e-16


class DataError(ValueError):
    """Raised when an input panel violates its invariants."""


def _parse_date(text: str) -> dt.date:
    text = text.strip()
    for fmt in ("%Y-%m-%d", "%Y-%m"):
        try:
            return dt.datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise DataError(f"unparsable date {text!r}")


@dataclass(frozen=True)
class PricePanel:
    """T+1 by n matrix of strictly positive price levels."""

    labels: tuple[str, ...]
    dates: tuple[dt.date, ...]
    prices: np.ndarray

    def __post_init__(self) -> None:
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 2 or prices.shape[1] != len(self.labels):
            raise DataError("prices must be a (periods, n_series) matrix matching labels")
        if prices.shape[0] != len(self.dates):
            raise DataError("number of dates does not match number of price rows")
        if not np.all(np.isfinite(prices)):
            raise DataError("prices must be finite")
        bad = np.argwhere(prices <= 0)
        if bad.size:
            row, col = bad[0]
            raise DataError(
                f"non-positive price at row {row + 1}, column {self.labels[col]!r}"
            )
        for a, b in zip(self.dates, self.dates[1:]):
            if b <= a:
                raise DataError(f"dates must be strictly increasing ({a} then {b})")
        prices.setflags(write=False)
        object.__setattr__(self, "prices", prices)

    @property
    def n(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class ReturnPanel:
    """T by n matrix of log returns, dated by the later price of each pair."""

    labels: tuple[str, ...]
    dates: tuple[dt.date, ...]
    returns: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.returns, dtype=float)
        if r.ndim == 1:
            r = r[:, None]
        if r.shape[1] != len(self.labels) or r.shape[0] != len(self.dates):
            raise DataError("returns shape does not match labels/dates")
        if not np.all(np.isfinite(r)):
            raise DataError("returns must be finite")
        r.setflags(write=False)
        object.__setattr__(self, "returns", r)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def T(self) -> int:
        return self.returns.shape[0]

    def window(self, start: int, stop: int) -> "ReturnPanel":
        return ReturnPanel(
            self.labels, self.dates[start:stop], self.returns[start:stop]
        )

    @classmethod
    def from_array(
        cls,
        returns: np.ndarray,
        labels: Sequence[str] | None = None,
        start: dt.date = dt.date(1900, 1, 1),
    ) -> "ReturnPanel":
        """Wrap a bare array, generating monthly dates from ``start``."""
        returns = np.asarray(returns, dtype=float)
        if returns.ndim == 1:
            returns = returns[:, None]
        n = returns.shape[1]
        labels = tuple(labels) if labels is not None else tuple(f"S{i + 1}" for i in range(n))
        return cls(labels, _monthly_dates(start, returns.shape[0]), returns)


def _monthly_dates(start: dt.date, count: int) -> tuple[dt.date, ...]:
    out = []
    y, m = start.year, start.month
    for _ in range(count):
        out.append(dt.date(y, m, 1))
        m += 1
        if m > 12:
            y, m = y + 1, 1
    return tuple(out)


def load_prices(path: str | Path) -> PricePanel:
    """Read a price CSV: header row, date column first, one column per series.

    Raises
    ------
    DataError
        On ragged rows, unparsable dates or cells, or non-positive prices.
    FileNotFoundError
        If ``path`` does not exist.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        labels = tuple(h.strip() for h in header[1:])
        if not labels:
            raise DataError(f"{path}: header must contain at least one series column")
        dates, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}:{lineno}: ragged row ({len(row)} cells, expected {len(header)})"
                )
            dates.append(_parse_date(row[0]))
            try:
                values = [float(c) for c in row[1:]]
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric price cell") from None
            for label, v in zip(labels, values):
                if not v > 0:
                    raise DataError(
                        f"{path}:{lineno}: non-positive price {v!r} in column {label!r}"
                    )
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return PricePanel(labels, tuple(dates), np.array(rows))


def write_prices(panel: PricePanel, path: str | Path) -> None:
    """Write ``panel`` in the layout read by :func:`load_prices`."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", *panel.labels])
        for d, row in zip(panel.dates, panel.prices):
            writer.writerow([d.isoformat(), *(repr(float(v)) for v in row)])


def prices_from_returns(r: ReturnPanel, base: float = 100.0) -> PricePanel:
    """Cumulate log returns into a price panel starting at ``base``."""
    levels = base * np.exp(np.vstack([np.zeros(r.n), np.cumsum(r.returns, axis=0)]))
    first = r.dates[0]
    start = dt.date(first.year - (first.month == 1), (first.month - 2) % 12 + 1, 1)
    return PricePanel(r.labels, (start, *r.dates), levels)


def log_returns(p: PricePanel) -> ReturnPanel:
    logp = np.log(p.prices)
    return ReturnPanel(p.labels, p.dates[1:], np.diff(logp, axis=0))


@dataclass(frozen=True)
class DescriptiveStats:
    """Summary moments of one return series.

    Kurtosis uses the Pearson convention (Gaussian -> 3).  When the series
    has zero variance ``degenerate`` is set and the standardized moments
    and Jarque-Bera fields are ``None``.
    """

    label: str
    n_obs: int
    mean: float
    median: float
    std_dev: float
    minimum: float
    maximum: float
    skewness: float | None
    kurtosis: float | None
    jb_stat: float | None
    jb_pvalue: float | None
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "n_obs": self.n_obs,
            "mean": self.mean,
            "median": self.median,
            "std_dev": self.std_dev,
            "minimum": self.minimum,
            "maximum": self.maximum,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "jb_stat": self.jb_stat,
            "jb_pvalue": self.jb_pvalue,
            "degenerate": self.degenerate,
        }


def describe(r: np.ndarray, label: str = "") -> DescriptiveStats:
    """Table-style descriptive statistics with a Jarque-Bera normality test."""
    x = np.asarray(r, dtype=float).ravel()
    T = x.size
    if T < 8:
        raise DataError("describe needs at least 8 observations")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev**2))
    base = dict(
        label=label,
        n_obs=T,
        mean=mean,
        median=float(np.median(x)),
        std_dev=float(x.std(ddof=1)),
        minimum=float(x.min()),
        maximum=float(x.max()),
    )
    # relative threshold: constant series leave rounding noise in dev
    if m2 <= (1e-14 * max(1.0, abs(mean))) ** 2:
        return DescriptiveStats(
            **base, skewness=None, kurtosis=None, jb_stat=None, jb_pvalue=None,
            degenerate=True,
        )
    skew = float(np.mean(dev**3) / m2**1.5)
    kurt = float(np.mean(dev**4) / m2**2)
    jb = T * (skew**2 / 6.0 + (kurt - 3.0) ** 2 / 24.0)
    return DescriptiveStats(
        **base, skewness=skew, kurtosis=kurt, jb_stat=float(jb),
        jb_pvalue=float(stats.chi2.sf(jb, 2)),
    )


def describe_panel(r: ReturnPanel) -> list[DescriptiveStats]:
    return [describe(r.returns[:, i], label) for i, label in enumerate(r.labels)]


def correlation_matrix(r: ReturnPanel | np.ndarray, labels: Sequence[str] | None = None) -> np.ndarray:
    """Pearson correlation matrix from population moments.

    The diagonal is set to exactly one and the result is exactly symmetric.
    """
    if isinstance(r, ReturnPanel):
        labels = r.labels
        x = r.returns
    else:
        x = np.asarray(r, dtype=float)
    if x.shape[0] < 2:
        raise DataError("correlation needs at least two observations")
    dev = x - x.mean(axis=0)
    var = np.mean(dev**2, axis=0)
    for i, v in enumerate(var):
        if v <= 0:
            name = labels[i] if labels is not None else str(i)
            raise DataError(f"series {name!r} has zero variance")
    sd = np.sqrt(var)
    c = (dev.T @ dev) / x.shape[0] / np.outer(sd, sd)
    c = np.clip(0.5 * (c + c.T), -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    return c


def _fmt_p(p: float | None) -> str:
    if p is None:
        return "n/a"
    if p < JB_DISPLAY_FLOOR:
        return "< 2.2e-16"
    return f"{p:.4g}"


def format_stats_table(rows: Sequence[DescriptiveStats]) -> str:
    header = ["Country", "Mean", "Median", "Std. Dev.", "Minimum", "Maximum",
              "Skewness", "Kurtosis", "JB p-value"]
    body = []
    for s in rows:
        num = lambda v: "n/a" if v is None else f"{v:.7g}"  # noqa: E731
        body.append([s.label, num(s.mean), num(s.median), num(s.std_dev), num(s.minimum),
                     num(s.maximum), num(s.skewness), num(s.kurtosis), _fmt_p(s.jb_pvalue)])
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [header, *body]]
    return "\n".join(lines)


def format_matrix(m: np.ndarray, labels: Sequence[str], digits: int = 4) -> str:
    width = max(max(len(l) for l in labels), digits + 3)
    lines = [" " * width + "  " + "  ".join(l.rjust(width) for l in labels)]
    for label, row in zip(labels, m):
        lines.append(label.ljust(width) + "  " + "  ".join(f"{v:.{digits}f}".rjust(width) for v in row))
    return "\n".join(lines)

