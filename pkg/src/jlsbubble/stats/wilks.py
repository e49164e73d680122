"""Wilks log-likelihood-ratio test between nested calibrations."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..calibration import FitResult
from ..lppl import ModelSpec
from .chi2 import chi2_sf

#: Relative excess of the larger model's residual sum tolerated as rounding.
WORSE_RTOL = 1e-9

M0, M1, M2, M3 = ModelSpec.M0, ModelSpec.M1, ModelSpec.M2, ModelSpec.M3

#: (smaller, larger) model pairs and their degrees of freedom.
NESTED_PAIRS: dict[tuple[ModelSpec, ModelSpec], int] = {
    (M0, M1): 1,
    (M0, M2): 1,
    (M1, M3): 1,
    (M2, M3): 1,
    (M0, M3): 2,
}


class NotNested(ValueError):
    pass


@dataclass(frozen=True)
class WilksResult:
    T: float
    k: int
    p_value: float
    n_obs: int
    clamped: bool = False

    def as_dict(self) -> dict:
        return {"T": self.T, "k": self.k, "p_value": self.p_value, "n_obs": self.n_obs,
                "clamped": self.clamped}


def wilks_statistic(res_l, res_h) -> float:
    """T = 2 ln(L_h/L_l) for i.i.d. Gaussian residuals with MLE variances.

    With sigma^2 = sum(R^2)/N the two normalized sums both equal N and T
    reduces to N ln(sigma_l^2 / sigma_h^2).
    """
    res_l, res_h = np.asarray(res_l, dtype=float), np.asarray(res_h, dtype=float)
    if res_l.shape != res_h.shape:
        raise ValueError("residual vectors must cover the same window")
    n = len(res_l)
    ss_l, ss_h = float(res_l @ res_l), float(res_h @ res_h)
    if ss_l == ss_h:
        return 0.0
    return n * math.log(ss_l / ss_h)


def wilks_pvalue(T: float, k: int) -> tuple[float, bool]:
    """Upper chi-square tail; a negative T (optimizer artefact) is clamped to 0."""
    if T < 0:
        return 1.0, True
    return chi2_sf(T, k), False


def wilks_test(fit_l: FitResult, fit_h: FitResult) -> WilksResult:
    """Test H0 "the smaller model suffices" for a nested pair of fits on one window."""
    pair = (fit_l.spec, fit_h.spec)
    if pair not in NESTED_PAIRS and fit_l.spec is not fit_h.spec:
        raise NotNested(f"{fit_l.spec.value} is not nested in {fit_h.spec.value}")
    if fit_l.n_obs != fit_h.n_obs or (fit_l.window and fit_h.window and fit_l.window != fit_h.window):
        raise ValueError("fits were calibrated on different windows")
    k = NESTED_PAIRS.get(pair, 0)
    T = wilks_statistic(fit_l.residuals.values, fit_h.residuals.values)
    if k == 0:
        return WilksResult(T=T, k=0, p_value=1.0, n_obs=fit_l.n_obs)
    p, clamped = wilks_pvalue(T, k)
    if clamped and T < -WORSE_RTOL * fit_l.n_obs:
        warnings.warn(f"negative Wilks statistic for {pair[0].value} vs {pair[1].value} "
                      f"(T={T:.4g}); the larger model fit worse, p set to 1", RuntimeWarning)
    return WilksResult(T=T, k=k, p_value=p, n_obs=fit_l.n_obs, clamped=clamped)


def compare_fits(fits: dict[ModelSpec, FitResult]) -> dict[str, WilksResult]:
    """Wilks results for every nested pair present in ``fits``, keyed ``"M0,M1"``."""
    out = {}
    for (lo, hi) in NESTED_PAIRS:
        if lo in fits and hi in fits:
            out[f"{lo.value},{hi.value}"] = wilks_test(fits[lo], fits[hi])
    return out
