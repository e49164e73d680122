"""Dickey-Fuller and Phillips-Perron unit-root tests (constant, no trend).

Both tests share the constant-only Dickey-Fuller distribution. Critical values
come from MacKinnon's (2010) response surfaces
``tau(T) = b_inf + b1/T + b2/T^2 + b3/T^3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MIN_LENGTH = 25

#: Response-surface coefficients, constant-only case, one variable.
_CRIT_SURFACE = {
    0.99: (-3.43035, -6.5393, -16.786, -79.433),
    0.95: (-2.86154, -2.8903, -4.234, -40.040),
    0.90: (-2.56677, -1.5384, -2.809, 0.0),
}


def critical_value(nobs: int, level: float = 0.99) -> float:
    """Finite-sample Dickey-Fuller critical value for a regression on ``nobs`` points."""
    try:
        b = _CRIT_SURFACE[round(level, 2)]
    except KeyError:
        raise ValueError(f"no critical values for level {level}; use 0.90, 0.95 or 0.99") from None
    return b[0] + b[1] / nobs + b[2] / nobs ** 2 + b[3] / nobs ** 3


@dataclass(frozen=True)
class UnitRootResult:
    test: str
    stat: float
    critical: float
    level: float
    nobs: int
    lags: int
    stationary: bool
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("test", "stat", "critical", "level", "nobs", "lags", "stationary", "degenerate")}


@dataclass(frozen=True)
class StationarityResult:
    pp: UnitRootResult
    df: UnitRootResult

    @property
    def pp_stationary(self) -> bool:
        return self.pp.stationary

    @property
    def df_stationary(self) -> bool:
        return self.df.stationary


def _check(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < MIN_LENGTH:
        raise ValueError(f"unit-root tests need a 1-d series of length >= {MIN_LENGTH}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def _degenerate(test, x, level, lags):
    n = len(x) - 1 - lags
    return UnitRootResult(test, -math.inf, critical_value(n, level), level, n, lags, True, True)


def _ols(y, X):
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return beta, resid


def adf_test(x, level: float = 0.99, lags: int = 0) -> UnitRootResult:
    """Dickey-Fuller t-test of ``dx_t = a + rho x_{t-1} (+ lagged dx) + e_t``.

    ``lags=0`` is the plain Dickey-Fuller test. Stationary means the unit-root
    null is rejected at ``level``. A constant series is reported stationary and
    flagged ``degenerate``.
    """
    x = _check(x)
    if np.ptp(x) == 0:
        return _degenerate("DF", x, level, lags)
    dx = np.diff(x)
    n = len(dx) - lags
    cols = [np.ones(n), x[lags:-1]]
    cols += [dx[lags - j:len(dx) - j] for j in range(1, lags + 1)]
    X = np.column_stack(cols)
    y = dx[lags:]
    beta, resid = _ols(y, X)
    s2 = resid @ resid / (n - X.shape[1])
    if s2 <= 0:
        return _degenerate("DF", x, level, lags)
    cov = s2 * np.linalg.inv(X.T @ X)
    stat = float(beta[1] / math.sqrt(cov[1, 1]))
    crit = critical_value(n, level)
    return UnitRootResult("DF", stat, crit, level, n, lags, stat < crit)


def newey_west_lags(n: int) -> int:
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def long_run_variance(u, lags: int) -> float:
    """Bartlett-kernel (Newey-West) long-run variance of a zero-mean series."""
    u = np.asarray(u, dtype=float)
    n = len(u)
    lrv = u @ u / n
    for j in range(1, lags + 1):
        lrv += 2.0 * (1.0 - j / (lags + 1.0)) * (u[j:] @ u[:-j]) / n
    return float(lrv)


def pp_test(x, level: float = 0.99, lags: int | None = None) -> UnitRootResult:
    """Phillips-Perron Z_t test with a Newey-West long-run variance.

    ``lags`` defaults to floor(4 (N/100)^(2/9)).
    """
    x = _check(x)
    if lags is None:
        lags = newey_west_lags(len(x))
    if np.ptp(x) == 0:
        return _degenerate("PP", x, level, 0)
    y = x[1:]
    X = np.column_stack([np.ones(len(y)), x[:-1]])
    n, k = X.shape
    beta, u = _ols(y, X)
    s2 = u @ u / (n - k)
    if s2 <= 0:
        return _degenerate("PP", x, level, 0)
    se = math.sqrt(s2 * np.linalg.inv(X.T @ X)[1, 1])
    gamma0 = s2 * (n - k) / n
    lam2 = long_run_variance(u, lags)
    lam = math.sqrt(lam2)
    tau = (beta[1] - 1.0) / se
    stat = float(math.sqrt(gamma0 / lam2) * tau - 0.5 * (lam2 - gamma0) / lam * n * se / math.sqrt(s2))
    crit = critical_value(n, level)
    return UnitRootResult("PP", stat, crit, level, n, lags, stat < crit)


def stationarity(x, level: float = 0.99) -> StationarityResult:
    """Both tests on one residual series."""
    return StationarityResult(pp=pp_test(x, level), df=adf_test(x, level))
