import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from netlogarch.data import (
    DataError,
    ReturnPanel,
    correlation_matrix,
    describe,
    format_stats_table,
    load_prices,
    log_returns,
    prices_from_returns,
    write_prices,
)


def write_csv(path, header, rows):
    path.write_text("\n".join([",".join(header)] + [",".join(map(str, r)) for r in rows]) + "\n")
    return path


def test_three_row_csv(tmp_path):
    p = load_prices(write_csv(tmp_path / "p.csv", ["date", "A"],
                              [["2000-01", 1.0], ["2000-02", math.e], ["2000-03", math.e**2]]))
    assert p.prices.shape == (3, 1)
    assert p.labels == ("A",)


def test_zero_price_rejected(tmp_path):
    path = write_csv(tmp_path / "p.csv", ["date", "A", "B"],
                     [["2000-01-01", 1.0, 2.0], ["2000-02-01", 0.0, 2.0]])
    with pytest.raises(DataError, match="non-positive price"):
        load_prices(path)


def test_ragged_and_bad_date_rejected(tmp_path):
    ragged = write_csv(tmp_path / "r.csv", ["date", "A", "B"], [["2000-01", 1.0, 2.0], ["2000-02", 1.0]])
    with pytest.raises(DataError, match="ragged"):
        load_prices(ragged)
    bad = write_csv(tmp_path / "d.csv", ["date", "A"], [["yesterday", 1.0]])
    with pytest.raises(DataError):
        load_prices(bad)


def test_unordered_dates_rejected(tmp_path):
    path = write_csv(tmp_path / "o.csv", ["date", "A"], [["2000-02", 1.0], ["2000-01", 2.0]])
    with pytest.raises(DataError):
        load_prices(path)


def test_log_returns_of_exponential_prices(tmp_path):
    p = load_prices(write_csv(tmp_path / "p.csv", ["date", "A"],
                              [["2000-01", 1.0], ["2000-02", math.e], ["2000-03", math.e**2]]))
    r = log_returns(p)
    np.testing.assert_allclose(r.returns[:, 0], [1.0, 1.0], atol=1e-15)
    assert r.T == p.prices.shape[0] - 1


def test_constant_prices_give_zero_returns(tmp_path):
    p = load_prices(write_csv(tmp_path / "p.csv", ["date", "A"], [[f"2000-0{i}", 5.0] for i in range(1, 6)]))
    assert np.all(log_returns(p).returns == 0.0)


def test_two_point_series_has_zero_skew():
    x = np.tile([0.3, -0.3], 20)
    s = describe(x)
    assert abs(s.skewness) < 1e-12
    assert s.minimum <= s.median <= s.maximum


def test_constant_series_is_flagged_degenerate():
    s = describe(np.full(20, 0.1))
    assert s.degenerate and s.skewness is None and s.jb_pvalue is None


def test_jb_pvalue_matches_chi2_series():
    # chi2(2) survival function is exp(-x/2); evaluate it from its power series
    x = np.random.default_rng(2024).standard_normal(10_000)
    s = describe(x)
    half = s.jb_stat / 2
    term, series = 1.0, 1.0
    for k in range(1, 200):
        term *= -half / k
        series += term
    assert s.jb_pvalue == pytest.approx(series, rel=1e-9)
    assert s.jb_stat == pytest.approx(10_000 * (s.skewness**2 / 6 + (s.kurtosis - 3) ** 2 / 24), rel=1e-12)


def test_describe_moments_against_direct_formulas():
    x = np.random.default_rng(1).standard_t(5, 500)
    s = describe(x)
    d = x - x.mean()
    m2 = np.mean(d**2)
    assert s.std_dev == pytest.approx(math.sqrt(np.sum(d**2) / (x.size - 1)))
    assert s.skewness == pytest.approx(np.mean(d**3) / m2**1.5)
    assert s.kurtosis == pytest.approx(np.mean(d**4) / m2**2)


def test_jb_display_floor():
    x = np.random.default_rng(0).standard_t(3, 2000)
    assert "< 2.2e-16" in format_stats_table([describe(x, "A")])


def test_correlation_of_series_with_itself():
    x = np.random.default_rng(0).standard_normal(50)
    c = correlation_matrix(np.column_stack([x, x]))
    assert c[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_orthogonal_four_point_series():
    a = np.array([1.0, -1.0, 1.0, -1.0])
    b = np.array([1.0, 1.0, -1.0, -1.0])
    cov = np.sum((a - a.mean()) * (b - b.mean()))
    assert cov == 0.0
    assert correlation_matrix(np.column_stack([a, b]))[0, 1] == pytest.approx(0.0, abs=1e-15)


def test_zero_variance_series_named_in_error():
    r = ReturnPanel.from_array(np.column_stack([np.arange(10.0), np.zeros(10)]), ["A", "Flat"])
    with pytest.raises(DataError, match="Flat"):
        correlation_matrix(r)


finite = st.floats(-0.5, 0.5, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 40), st.integers(1, 4)), elements=finite))
def test_price_round_trip(tmp_path_factory, returns):
    r = ReturnPanel.from_array(returns)
    p = prices_from_returns(r)
    path = tmp_path_factory.mktemp("rt") / "p.csv"
    write_prices(p, path)
    back = load_prices(path)
    rebuilt = back.prices[0] * np.exp(np.vstack([np.zeros(r.n), np.cumsum(log_returns(back).returns, axis=0)]))
    np.testing.assert_allclose(rebuilt, p.prices, rtol=1e-10)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(5, 60), st.integers(2, 5)), elements=st.floats(-1, 1)))
def test_correlation_symmetry_and_unit_diagonal(x):
    if np.any(np.ptp(x, axis=0) < 1e-3):
        return
    c = correlation_matrix(x)
    assert np.max(np.abs(c - c.T)) <= 1e-12
    assert np.all(np.diag(c) == 1.0)
    assert np.all(np.abs(c) <= 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-3, 1e3))
def test_standardized_moments_scale_invariant(seed, c):
    x = np.random.default_rng(seed).standard_t(6, 200)
    a, b = describe(x), describe(c * x)
    assert b.skewness == pytest.approx(a.skewness, abs=1e-8)
    assert b.kurtosis == pytest.approx(a.kurtosis, abs=1e-8)
    assert b.jb_stat == pytest.approx(a.jb_stat, rel=1e-8)
