import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jlsbubble.timeseries import (DataError, DiscountedSeries, PriceSeries, RateSeries, discount, index_to_date,
                                  load_price_csv, load_rate_csv, rolling_windows)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def daily_prices(start, values):
    dates = np.arange(np.datetime64(start), np.datetime64(start) + len(values))
    return PriceSeries(dates, np.asarray(values, dtype=float), "x")


def weekday_prices(n, start="2009-01-05", seed=0):
    rng = np.random.default_rng(seed)
    dates = np.busday_offset(np.datetime64(start), np.arange(n), roll="forward")
    return PriceSeries(dates, 100 * np.exp(np.cumsum(0.01 * rng.standard_normal(n))), "w")


def test_load_three_rows(tmp_path):
    p = write(tmp_path, "p.csv", "2009-01-05,100\n2009-01-06,101\n2009-01-07,99\n")
    s = load_price_csv(p)
    assert len(s) == 3
    assert list(s.values) == [100, 101, 99]
    assert s.label == "p"


def test_load_rejects_negative_price_with_line(tmp_path):
    p = write(tmp_path, "p.csv", "date,close\n2009-01-05,100\n2009-01-06,−5\n")
    with pytest.raises(DataError, match="non-positive price at line 3"):
        load_price_csv(p)


def test_load_sorts_dates(tmp_path):
    p = write(tmp_path, "p.csv", "2009-01-07,99\n2009-01-05,100\n2009-01-06,101\n")
    s = load_price_csv(p)
    assert [str(d) for d in s.dates] == ["2009-01-05", "2009-01-06", "2009-01-07"]
    assert list(s.values) == [100, 101, 99]


def test_load_errors(tmp_path):
    with pytest.raises(DataError, match="parse failure at line 2"):
        load_price_csv(write(tmp_path, "a.csv", "2009-01-05,100\n2009-13-06,101\n"))
    with pytest.raises(DataError, match="duplicate date"):
        load_price_csv(write(tmp_path, "b.csv", "2009-01-05,100\n2009-01-05,101\n"))
    with pytest.raises(FileNotFoundError, match="missing.csv"):
        load_price_csv(tmp_path / "missing.csv")


def test_load_skips_missing_markers_and_comments(tmp_path):
    p = write(tmp_path, "p.csv", "# provenance line\nDate,Close\n2009-01-05,100\n2009-01-06,.\n2009-01-07,99\n")
    assert len(load_price_csv(p)) == 2


def test_load_rate_units(tmp_path):
    r = load_rate_csv(write(tmp_path, "r.csv", "2009-01-05,4.0\n"))
    assert r.rates[0] == pytest.approx(0.04)
    r = load_rate_csv(write(tmp_path, "d.csv", "2009-01-05,0.04\n"), units="decimal")
    assert r.rates[0] == pytest.approx(0.04)
    with pytest.raises(DataError, match="empty rate series"):
        load_rate_csv(write(tmp_path, "e.csv", ""))
    with pytest.raises(DataError, match="-100%"):
        load_rate_csv(write(tmp_path, "n.csv", "2009-01-05,-100\n"))


def test_zero_rate_is_identity():
    prices = weekday_prices(60)
    rates = RateSeries.constant(0.0, "2008-12-01", "2009-12-31")
    d = discount(prices, rates, prices.dates[3], prices.dates[40])
    np.testing.assert_array_equal(d.values, prices.values[3:41])
    np.testing.assert_array_equal(d.t_index, np.arange(38))


def test_constant_rate_over_one_year():
    # 366 calendar days inclusive: 365 daily factors (1.0365)^(-1/365)
    prices = daily_prices("2009-01-01", np.full(366, 100.0))
    rates = RateSeries.constant(0.0365, "2009-01-01", "2010-01-01")
    d = discount(prices, rates, "2009-01-01", "2010-01-01")
    assert d.values[0] == 100.0
    assert d.values[-1] == pytest.approx(96.47853352629040, rel=1e-12)


def test_weekend_days_are_compounded():
    prices = weekday_prices(10, "2009-01-02")  # Friday start
    rates = RateSeries.constant(0.05, "2009-01-01", "2009-02-01")
    d = discount(prices, rates, prices.dates[0], prices.dates[1])
    assert d.factors[1] == pytest.approx(1.05 ** (-3 / 365), rel=1e-14)


def test_single_day_window():
    prices = weekday_prices(10)
    d = discount(prices, RateSeries.constant(0.05, "2009-01-01", "2009-02-01"), prices.dates[4], prices.dates[4])
    assert len(d) == 1 and d.values[0] == prices.values[4]


def test_rate_gap_at_window_start_is_backfilled():
    prices = weekday_prices(20)
    rates = RateSeries(np.array(["2009-01-12", "2009-02-10"], dtype="datetime64[D]"), np.array([0.02, 0.02]))
    d = discount(prices, rates, prices.dates[0], prices.dates[-1])
    assert d.rate_backfilled


def test_uncovered_window_errors():
    prices = weekday_prices(20)
    with pytest.raises(DataError, match="not inside price range"):
        discount(prices, None, "2008-01-01", prices.dates[5])
    stale = RateSeries.constant(0.02, "2008-01-01", "2008-12-01")
    with pytest.raises(DataError, match="does not cover"):
        discount(prices, stale, prices.dates[0], prices.dates[-1])


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(0.01, 100), r=st.floats(0.0, 0.2))
def test_discount_linear_in_price(scale, r):
    prices = weekday_prices(30)
    rates = RateSeries.constant(r, "2008-12-01", "2009-12-31")
    a = discount(prices, rates, prices.dates[0], prices.dates[-1])
    b = discount(prices.scaled(scale), rates, prices.dates[0], prices.dates[-1])
    np.testing.assert_allclose(b.values, scale * a.values, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(bump_day=st.integers(0, 40), bump=st.floats(0.0, 0.5))
def test_discount_monotone_in_rates(bump_day, bump):
    prices = weekday_prices(30)
    days = np.arange(np.datetime64("2009-01-01"), np.datetime64("2009-02-20"))
    base = np.full(len(days), 0.03)
    raised = base.copy()
    raised[bump_day] += bump
    a = discount(prices, RateSeries(days, base), prices.dates[0], prices.dates[-1])
    b = discount(prices, RateSeries(days, raised), prices.dates[0], prices.dates[-1])
    assert np.all(b.values <= a.values + 1e-12)


def test_rolling_windows_count():
    prices = weekday_prices(600)
    w = rolling_windows(prices, 550, 25)
    assert len(w) == 3
    assert [prices.index_of(a) for a, _ in w] == [0, 25, 50]
    assert all(prices.index_of(b) - prices.index_of(a) + 1 == 550 for a, b in w)
    assert len(rolling_windows(prices, 600, 25)) == 1
    with pytest.raises(ValueError):
        rolling_windows(prices, 601, 25)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(30, 400), length=st.integers(1, 400), step=st.integers(1, 60))
def test_rolling_window_count_formula(n, length, step):
    if length > n:
        return
    prices = weekday_prices(n)
    assert len(rolling_windows(prices, length, step)) == (n - length) // step + 1


def test_index_to_date_rounds_up_and_extrapolates():
    prices = weekday_prices(10, "2009-01-05")  # Mon 5 Jan .. Fri 16 Jan
    assert index_to_date(prices, 0, 2.2) == dt.date(2009, 1, 8)
    assert index_to_date(prices, 0, 3.0) == dt.date(2009, 1, 8)
    assert index_to_date(prices, 0, 10.0) == dt.date(2009, 1, 19)


def test_series_invariants():
    with pytest.raises(DataError):
        PriceSeries(np.array(["2009-01-02", "2009-01-01"], dtype="datetime64[D]"), np.array([1.0, 2.0]))
    with pytest.raises(DataError):
        PriceSeries(np.array(["2009-01-01"], dtype="datetime64[D]"), np.array([0.0]))
    s = DiscountedSeries.from_values(np.linspace(1, 2, 5))
    with pytest.raises(ValueError):
        s.values[0] = 3.0
