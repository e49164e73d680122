"""Price and rate ingestion, calendar alignment and continuous discounting."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MIN_FIT_LENGTH = 30
MAX_RATE_STALENESS_DAYS = 7
_MISSING_MARKERS = {"", ".", "na", "nan", "null", "#n/a"}


class DataError(ValueError):
    """Malformed or inconsistent input data."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def to_date(value) -> dt.date:
    """Coerce an ISO string, ``datetime64`` or ``date`` into a ``datetime.date``."""
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    if isinstance(value, np.datetime64):
        return value.astype("datetime64[D]").astype(dt.date)
    return dt.date.fromisoformat(str(value).strip())


@dataclass(frozen=True)
class PriceSeries:
    """Daily closes on the trading calendar, ascending and strictly positive."""

    dates: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=float)
        if dates.ndim != 1 or dates.shape != values.shape:
            raise DataError("dates and values must be 1-d arrays of equal length")
        if len(dates) == 0:
            raise DataError("empty price series")
        if np.any(np.diff(dates).astype(int) <= 0):
            raise DataError("price dates must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise DataError("prices must be finite and > 0")
        object.__setattr__(self, "dates", _frozen(dates))
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self) -> int:
        return len(self.values)

    def index_of(self, day, side: str = "left") -> int:
        """Position of the first trading date >= ``day`` (``side='left'``) or the
        last trading date <= ``day`` (``side='right'``)."""
        d = np.datetime64(to_date(day), "D")
        if side == "left":
            return int(np.searchsorted(self.dates, d, side="left"))
        return int(np.searchsorted(self.dates, d, side="right")) - 1

    def scaled(self, factor: float) -> "PriceSeries":
        return PriceSeries(self.dates, self.values * factor, self.label)


@dataclass(frozen=True)
class RateSeries:
    """Annualized risk-free rates as decimal fractions per year."""

    dates: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        rates = np.asarray(self.rates, dtype=float)
        if dates.ndim != 1 or dates.shape != rates.shape:
            raise DataError("dates and rates must be 1-d arrays of equal length")
        if len(dates) == 0:
            raise DataError("empty rate series")
        if np.any(np.diff(dates).astype(int) <= 0):
            raise DataError("rate dates must be strictly increasing")
        if np.any(rates <= -1.0):
            raise DataError("rates must be > -100%")
        object.__setattr__(self, "dates", _frozen(dates))
        object.__setattr__(self, "rates", _frozen(rates))

    @classmethod
    def constant(cls, rate: float, start, end) -> "RateSeries":
        return cls(np.array([to_date(start), to_date(end)], dtype="datetime64[D]"),
                   np.array([rate, rate]))

    def daily(self, first, last) -> tuple[np.ndarray, bool]:
        """Rate for every calendar day in ``[first, last]`` with last-known fill.

        Returns the array and whether leading days had to be back-filled from the
        first available observation.
        """
        days = np.arange(np.datetime64(to_date(first), "D"),
                         np.datetime64(to_date(last), "D") + 1)
        pos = np.searchsorted(self.dates, days, side="right") - 1
        backfilled = bool(np.any(pos < 0))
        return self.rates[np.clip(pos, 0, None)], backfilled


@dataclass(frozen=True)
class DiscountedSeries:
    """Window of prices discounted back to the window start.

    ``factors[i]`` is the cumulative discount factor applied to the observed price
    on ``dates[i]``; ``observed`` keeps the raw closes.
    """

    dates: np.ndarray
    values: np.ndarray
    observed: np.ndarray
    factors: np.ndarray
    label: str = ""
    rate_backfilled: bool = False
    t_index: np.ndarray = field(init=False)

    def __post_init__(self):
        for name in ("dates", "values", "observed", "factors"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if np.any(self.values <= 0):
            raise DataError("discounted prices must be > 0")
        object.__setattr__(self, "t_index", _frozen(np.arange(len(self.values), dtype=float)))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def t1(self) -> dt.date:
        return to_date(self.dates[0])

    @property
    def t2(self) -> dt.date:
        return to_date(self.dates[-1])

    def with_values(self, values) -> "DiscountedSeries":
        """Same dates and discount factors carrying different discounted prices."""
        values = np.asarray(values, dtype=float)
        if values.shape != self.values.shape:
            raise DataError("replacement values must match the window length")
        return DiscountedSeries(self.dates, values, values / self.factors, self.factors, self.label,
                                self.rate_backfilled)

    @classmethod
    def undiscounted(cls, prices: PriceSeries, start: int = 0, stop: int | None = None) -> "DiscountedSeries":
        """Window ``[start, stop)`` of ``prices`` with a zero risk-free rate."""
        stop = len(prices) if stop is None else stop
        v = prices.values[start:stop]
        return cls(prices.dates[start:stop], v, v, np.ones_like(v), prices.label)

    @classmethod
    def from_values(cls, values, start="2000-01-03", label: str = "") -> "DiscountedSeries":
        """Wrap a bare array on a Monday-to-Friday calendar (fixtures, synthetic data)."""
        values = np.asarray(values, dtype=float)
        dates = business_days(start, len(values))
        return cls(dates, values, values, np.ones_like(values), label)


def business_days(start, n: int) -> np.ndarray:
    """``n`` consecutive weekdays from ``start`` (rolled forward if a weekend)."""
    first = np.busday_offset(np.datetime64(to_date(start), "D"), 0, roll="forward")
    return np.busday_offset(first, np.arange(n), roll="forward")


def _read_rows(path, header, date_col=0):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)
                if row and any(c.strip() for c in row) and not row[0].lstrip().startswith("#")]
    if header == "auto":
        header = False
        if rows:
            try:
                to_date(rows[0][1][date_col])
            except (ValueError, IndexError):
                header = True
    return rows[1:] if header and rows else rows


def load_price_csv(path, date_col: int = 0, value_col: int = 1, header="auto",
                   label: str | None = None) -> PriceSeries:
    """Read a ``date,price`` CSV into a validated :class:`PriceSeries`.

    Rows may be in any order; they are sorted by date. ``header`` is ``True``,
    ``False`` or ``"auto"`` (skip the first row when its date does not parse).
    Lines starting with ``#`` and rows whose value is a missing marker such as
    ``.`` or ``NA`` are skipped.
    """
    dates, values = [], []
    for lineno, row in _read_rows(path, header, date_col):
        try:
            day = to_date(row[date_col])
            raw = row[value_col].strip()
        except (ValueError, IndexError) as exc:
            raise DataError(f"parse failure at line {lineno}: {exc}") from None
        if raw.lower() in _MISSING_MARKERS:
            continue
        try:
            price = float(raw.replace("−", "-"))
        except ValueError:
            raise DataError(f"parse failure at line {lineno}: bad price {raw!r}") from None
        if not price > 0 or not math.isfinite(price):
            raise DataError(f"non-positive price at line {lineno}")
        dates.append(day)
        values.append(price)
    if not dates:
        raise DataError("empty price series")
    order = sorted(range(len(dates)), key=dates.__getitem__)
    for a, b in zip(order, order[1:]):
        if dates[a] == dates[b]:
            raise DataError(f"duplicate date {dates[a].isoformat()}")
    return PriceSeries(np.array([dates[i] for i in order], dtype="datetime64[D]"),
                       np.array([values[i] for i in order]),
                       label if label is not None else Path(path).stem)


def load_rate_csv(path, units: str = "percent", date_col: int = 0, value_col: int = 1,
                  header="auto") -> RateSeries:
    """Read annualized rates; ``units`` is ``"percent"`` (T-bill quotes) or ``"decimal"``."""
    if units not in ("percent", "decimal"):
        raise ValueError(f"units must be 'percent' or 'decimal', got {units!r}")
    scale = 0.01 if units == "percent" else 1.0
    by_day = {}
    for lineno, row in _read_rows(path, header, date_col):
        try:
            day = to_date(row[date_col])
            raw = row[value_col].strip()
        except (ValueError, IndexError) as exc:
            raise DataError(f"parse failure at line {lineno}: {exc}") from None
        if raw.lower() in _MISSING_MARKERS:
            continue
        try:
            rate = float(raw.rstrip("%")) * scale
        except ValueError:
            raise DataError(f"parse failure at line {lineno}: bad rate {raw!r}") from None
        if rate <= -1.0:
            raise DataError(f"rate <= -100% at line {lineno}")
        if day in by_day:
            raise DataError(f"duplicate date {day.isoformat()}")
        by_day[day] = rate
    if not by_day:
        raise DataError("empty rate series")
    days = sorted(by_day)
    return RateSeries(np.array(days, dtype="datetime64[D]"), np.array([by_day[d] for d in days]))


def cumulative_discount(rates: RateSeries, t1, days) -> tuple[np.ndarray, bool]:
    """Discount factor prod_{s=t1+1..d} (1+r(s))^(-1/365) for each date ``d`` in ``days``."""
    t1 = to_date(t1)
    days = np.asarray(days, dtype="datetime64[D]")
    last = to_date(days.max()) if len(days) else t1
    if last <= t1:
        return np.ones(len(days)), False
    r, backfilled = rates.daily(t1 + dt.timedelta(days=1), last)
    log_f = np.concatenate([[0.0], np.cumsum(-np.log1p(r) / 365.0)])
    offset = (days - np.datetime64(t1, "D")).astype(int)
    return np.exp(log_f[offset]), backfilled


def discount(prices: PriceSeries, rates: RateSeries | None, t1, t2) -> DiscountedSeries:
    """Discount the closes in ``[t1, t2]`` continuously back to ``t1``.

    The product runs over calendar days with the most recent available rate on
    non-trading days. ``t1``/``t2`` snap inward to the nearest trading dates.
    ``rates=None`` means a zero rate.
    """
    t1, t2 = to_date(t1), to_date(t2)
    if t2 < t1:
        raise DataError(f"empty window: {t1} > {t2}")
    first, last = to_date(prices.dates[0]), to_date(prices.dates[-1])
    if t1 < first or t2 > last:
        raise DataError(f"window [{t1}, {t2}] not inside price range [{first}, {last}]")
    i, j = prices.index_of(t1, "left"), prices.index_of(t2, "right")
    if j < i:
        raise DataError(f"empty window: no trading days in [{t1}, {t2}]")
    dates = prices.dates[i:j + 1]
    obs = prices.values[i:j + 1]
    start = to_date(dates[0])
    if rates is None:
        factors, backfilled = np.ones(len(obs)), False
    else:
        stale = (np.datetime64(to_date(dates[-1]), "D") - rates.dates[-1]).astype(int)
        if stale > MAX_RATE_STALENESS_DAYS:
            raise DataError(f"rate series ends {to_date(rates.dates[-1])}, does not cover window end {to_date(dates[-1])}")
        factors, backfilled = cumulative_discount(rates, start, dates)
    return DiscountedSeries(dates, obs * factors, obs, factors, prices.label, backfilled)


def rolling_windows(prices: PriceSeries, length: int, step: int, offset: int = 0) -> list[tuple[dt.date, dt.date]]:
    """Fixed-length overlapping windows ``(t1, t2)`` starting every ``step`` trading days.

    Windows start at ``offset, offset+step, ...``; a trailing partial window is dropped.
    """
    n = len(prices) - offset
    if step < 1:
        raise ValueError("step must be >= 1")
    if length < 1 or length > n:
        raise ValueError(f"window length {length} exceeds series length {n}")
    starts = range(offset, offset + (n - length) // step * step + 1, step)
    return [(to_date(prices.dates[s]), to_date(prices.dates[s + length - 1])) for s in starts]


def index_to_date(prices: PriceSeries, start: int, t: float) -> dt.date:
    """Map a real trading-day offset from ``prices.dates[start]`` to a calendar date.

    Rounds up to the next trading day; beyond the end of the data, weekdays are
    used as the calendar.
    """
    k = start + int(math.ceil(t - 1e-9))
    if k < len(prices):
        return to_date(prices.dates[max(k, 0)])
    extra = k - (len(prices) - 1)
    return to_date(np.busday_offset(prices.dates[-1], extra, roll="forward"))
