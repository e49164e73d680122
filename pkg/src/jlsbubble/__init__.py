"""Calibration and testing of generalized JLS/LPPL bubble models."""

from .lppl import (BubbleFlags, IllConditioned, LpplParams, ModelSpec, ModelUndefined,
                   ResidualVector, check_bubble_conditions, eval_flppl, model_price,
                   residuals, solve_linear_abc)
from .timeseries import (DataError, DiscountedSeries, PriceSeries, RateSeries, discount,
                         load_price_csv, load_rate_csv, rolling_windows)

__version__ = "0.1.0"

__all__ = [
    "BubbleFlags", "DataError", "DiscountedSeries", "IllConditioned", "LpplParams",
    "ModelSpec", "ModelUndefined", "PriceSeries", "RateSeries", "ResidualVector",
    "check_bubble_conditions", "discount", "eval_flppl", "load_price_csv",
    "load_rate_csv", "model_price", "residuals", "rolling_windows", "solve_linear_abc",
]
