"""Post-fit quantities: crash drawdowns and ratios, fundamental-value fractions
and the rolling-window stationarity census."""

from __future__ import annotations

import calendar
import datetime as dt
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .calibration import DEFAULT_N_STARTS, FitError, FitResult, fit
from .lppl import ModelSpec, is_gamma_one
from .stats.unitroot import stationarity
from .timeseries import DataError, DiscountedSeries, PriceSeries, RateSeries, cumulative_discount, discount, \
    index_to_date, rolling_windows, to_date

log = logging.getLogger(__name__)

PEAK_SLACK_DAYS = 60
DD_SHORT_MONTHS = 2
DD_MAX_MONTHS = 12


def add_months(day: dt.date, months: int) -> dt.date:
    """Same day-of-month ``months`` later, clamped to the month's last day."""
    y, m = divmod(day.month - 1 + months, 12)
    year, month = day.year + y, m + 1
    return dt.date(year, month, min(day.day, calendar.monthrange(year, month)[1]))


def has_unit_gamma(fit: FitResult) -> bool:
    return not fit.spec.has_gamma or is_gamma_one(fit.params.gamma)


def critical_date(fit: FitResult, prices: PriceSeries) -> dt.date:
    """Calendar date of the fitted t_c, rounded to the next trading day."""
    if not fit.window:
        raise ValueError("fit carries no window dates")
    return index_to_date(prices, prices.index_of(fit.window[0]), fit.params.t_c)


def compounded_p1(fit: FitResult, rates: RateSeries | None, t1, at) -> float:
    """p1 carried forward from the window start to ``at`` at the risk-free rate."""
    if fit.params.p1 == 0 or rates is None:
        return fit.params.p1
    factor, _ = cumulative_discount(rates, t1, np.array([to_date(at)], dtype="datetime64[D]"))
    return fit.params.p1 / float(factor[0])


@dataclass(frozen=True)
class CrashMetrics:
    t_p: dt.date
    t_c: dt.date
    p_peak: float
    DD_2months: float
    DD_max: float
    RC_2months: float
    RC_max: float
    kappa: float | None
    fundamental_fraction_t1: float | None
    fundamental_fraction_tp: float | None
    valley_date: dt.date
    notes: tuple[str, ...] = ()

    @property
    def tc_tp_gap(self) -> int:
        """|t_c - t_p| in calendar days."""
        return abs((self.t_c - self.t_p).days)

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("p_peak", "DD_2months", "DD_max", "RC_2months", "RC_max",
                                             "kappa", "fundamental_fraction_t1", "fundamental_fraction_tp")}
        d.update(t_p=self.t_p.isoformat(), t_c=self.t_c.isoformat(), valley_date=self.valley_date.isoformat(),
                 tc_tp_gap_days=self.tc_tp_gap, notes=list(self.notes))
        return d


def _segment(prices: PriceSeries, after: dt.date, until: dt.date) -> tuple[np.ndarray, np.ndarray]:
    lo = np.searchsorted(prices.dates, np.datetime64(after, "D"), side="right")
    hi = np.searchsorted(prices.dates, np.datetime64(until, "D"), side="right")
    return prices.dates[lo:hi], prices.values[lo:hi]


def crash_metrics(prices: PriceSeries, rates: RateSeries | None, fit: FitResult, t1=None,
                  peak_slack_days: int = PEAK_SLACK_DAYS, dd_max_months: int = DD_MAX_MONTHS) -> CrashMetrics:
    """Drawdowns after the bubble peak and their ratio to the over-valued part of the price.

    The peak t_p is the highest close from ``t1`` to ``peak_slack_days`` after
    the fitted critical date. DD_2months is the drop to the lowest close within
    two calendar months after t_p, DD_max the drop to the lowest close within
    ``dd_max_months``. Each RC divides a drawdown by p_obs(t_p) minus p1
    compounded from t1 to t_p. ``kappa`` equals RC_max for gamma = 1 specs and
    is None otherwise.
    """
    t1 = to_date(t1 if t1 is not None else fit.window[0])
    t_c = critical_date(fit, prices)
    dates, values = _segment(prices, t1 - dt.timedelta(days=1), t_c + dt.timedelta(days=peak_slack_days))
    if not len(values):
        raise DataError("no prices between the window start and the critical date")
    k = int(np.argmax(values))
    t_p, p_peak = to_date(dates[k]), float(values[k])
    last = to_date(prices.dates[-1])
    short_end = add_months(t_p, DD_SHORT_MONTHS)
    if last < short_end:
        raise DataError(f"need prices through {short_end} for the two-month drawdown; data end {last}")
    _, short = _segment(prices, t_p, short_end)
    long_end = add_months(t_p, dd_max_months)
    notes = []
    if last < long_end:
        notes.append(f"valley search truncated at data end {last}")
    long_dates, long_vals = _segment(prices, t_p, long_end)
    dd_2 = max(0.0, p_peak - float(short.min()))
    j = int(np.argmin(long_vals))
    dd_max = max(0.0, p_peak - float(long_vals[j]))
    denom = p_peak - compounded_p1(fit, rates, t1, t_p)
    if denom <= 0:
        raise DataError("fundamental value above the peak price; crash ratio undefined")
    rc_2, rc_max = dd_2 / denom, dd_max / denom
    kappa = rc_max if has_unit_gamma(fit) else None
    if kappa is None:
        notes.append("kappa differs from RC for gamma < 1")
    ff_t1 = ff_tp = None
    if fit.spec.has_p1:
        p_t1 = float(prices.values[prices.index_of(t1)])
        ff_t1 = fit.params.p1 / p_t1
        ff_tp = compounded_p1(fit, rates, t1, t_p) / p_peak
    return CrashMetrics(t_p=t_p, t_c=t_c, p_peak=p_peak, DD_2months=dd_2, DD_max=dd_max, RC_2months=rc_2,
                        RC_max=rc_max, kappa=kappa, fundamental_fraction_t1=ff_t1,
                        fundamental_fraction_tp=ff_tp, valley_date=to_date(long_dates[j]), notes=tuple(notes))


def fundamental_fraction(fit: FitResult, series: DiscountedSeries, at) -> float:
    """p1 / p(at) on the discounted window; the bubble share is one minus this."""
    if not fit.spec.has_p1:
        raise ValueError(f"{fit.spec.value} has no fundamental price")
    at = np.datetime64(to_date(at), "D")
    i = int(np.searchsorted(series.dates, at))
    if i >= len(series) or series.dates[i] != at:
        raise ValueError(f"{to_date(at)} is not a trading day of the window")
    return fit.params.p1 / float(series.values[i])


def bubble_fraction(fit: FitResult, series: DiscountedSeries, at) -> float:
    """Share of the discounted price at ``at`` not explained by the fundamental value."""
    return 1.0 - fundamental_fraction(fit, series, at)


@dataclass(frozen=True)
class WindowOutcome:
    t1: dt.date
    t2: dt.date
    ok: bool
    fit: FitResult | None = None
    pp_stat: float = math.nan
    df_stat: float = math.nan
    pp_stationary: bool = False
    df_stationary: bool = False
    lppl: bool = False
    error: str = ""

    CSV_FIELDS = ("t1", "t2", "ok", "t_c", "m", "omega", "phi", "A", "B", "C", "p1", "gamma", "rms",
                  "boundary_ok", "bubble_m", "hazard_nonneg", "lppl_conditions", "pp_stat", "pp_stationary",
                  "df_stat", "df_stationary", "error")

    def row(self) -> dict:
        out = {"t1": self.t1.isoformat(), "t2": self.t2.isoformat(), "ok": self.ok, "error": self.error}
        if self.fit is not None:
            out.update(self.fit.params.as_dict())
            out.update(rms=self.fit.rms, boundary_ok=self.fit.boundary_ok, bubble_m=self.fit.flags.bubble_m,
                       hazard_nonneg=self.fit.flags.hazard_nonneg, lppl_conditions=self.lppl,
                       pp_stat=self.pp_stat, pp_stationary=self.pp_stationary,
                       df_stat=self.df_stat, df_stationary=self.df_stationary)
        return {k: out.get(k, "") for k in self.CSV_FIELDS}


@dataclass(frozen=True)
class ScanCensus:
    spec: ModelSpec
    length: int
    step: int
    windows: tuple[WindowOutcome, ...]

    @property
    def n_windows(self) -> int:
        return len(self.windows)

    @property
    def n_failed(self) -> int:
        return sum(not w.ok for w in self.windows)

    @property
    def fitted(self) -> list[WindowOutcome]:
        return [w for w in self.windows if w.ok]

    @staticmethod
    def _share(rows, attr) -> float:
        return sum(getattr(w, attr) for w in rows) / len(rows) if rows else math.nan

    @property
    def frac_pp(self) -> float:
        return self._share(self.fitted, "pp_stationary")

    @property
    def frac_df(self) -> float:
        return self._share(self.fitted, "df_stationary")

    @property
    def p_lppl(self) -> float:
        return self._share(self.fitted, "lppl")

    @property
    def frac_pp_lppl(self) -> float:
        return self._share([w for w in self.fitted if w.lppl], "pp_stationary")

    @property
    def frac_df_lppl(self) -> float:
        return self._share([w for w in self.fitted if w.lppl], "df_stationary")

    def as_dict(self) -> dict:
        return {"spec": self.spec.value, "length": self.length, "step": self.step,
                "n_windows": self.n_windows, "n_failed": self.n_failed, "n_fitted": len(self.fitted),
                "n_lppl": sum(w.lppl for w in self.fitted),
                "n_pp_stationary": sum(w.pp_stationary for w in self.fitted),
                "n_df_stationary": sum(w.df_stationary for w in self.fitted),
                "frac_pp": self.frac_pp, "frac_df": self.frac_df, "p_lppl": self.p_lppl,
                "frac_pp_lppl": self.frac_pp_lppl, "frac_df_lppl": self.frac_df_lppl}


def _scan_one(args) -> WindowOutcome:
    prices, rates, spec, t1, t2, n_starts, seed = args
    try:
        series = discount(prices, rates, t1, t2)
        result = fit(spec, series, n_starts=n_starts, seed=seed)
        st = stationarity(result.residuals.values)
    except (FitError, DataError, ValueError) as exc:
        return WindowOutcome(t1, t2, ok=False, error=str(exc))
    return WindowOutcome(t1, t2, ok=True, fit=result, pp_stat=st.pp.stat, df_stat=st.df.stat,
                         pp_stationary=st.pp_stationary, df_stationary=st.df_stationary,
                         lppl=result.flags.lppl_conditions)


def scan_windows(prices: PriceSeries, rates: RateSeries | None, spec: ModelSpec, length: int, step: int = 25,
                 offset: int = 0, n_starts: int = DEFAULT_N_STARTS, seed: int = 0, workers: int = 1):
    """Yield one :class:`WindowOutcome` per rolling window, in window order."""
    spec = ModelSpec(spec)
    tasks = [(prices, rates, spec, t1, t2, n_starts, seed)
             for t1, t2 in rolling_windows(prices, length, step, offset)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(_scan_one, tasks)
    else:
        for task in tasks:
            yield _scan_one(task)


def rolling_scan(prices: PriceSeries, rates: RateSeries | None, spec: ModelSpec, length: int, step: int = 25,
                 offset: int = 0, n_starts: int = DEFAULT_N_STARTS, seed: int = 0, workers: int = 1) -> ScanCensus:
    """Fit every rolling window and test its residuals for stationarity at 99%.

    Windows whose fit fails are kept with ``ok=False`` and excluded from all
    fractions.
    """
    spec = ModelSpec(spec)
    outcomes = tuple(scan_windows(prices, rates, spec, length, step, offset, n_starts, seed, workers))
    return ScanCensus(spec=spec, length=length, step=step, windows=outcomes)
