"""Model adjudication: Wilks tests, residual bootstrap and unit-root tests."""

from .chi2 import chi2_sf, gammaincc
from .unitroot import StationarityResult, UnitRootResult, adf_test, pp_test, stationarity
from .wilks import NESTED_PAIRS, WilksResult, compare_fits, wilks_statistic, wilks_test

__all__ = [
    "NESTED_PAIRS", "StationarityResult", "UnitRootResult", "WilksResult", "adf_test",
    "chi2_sf", "compare_fits", "gammaincc", "pp_test", "stationarity", "wilks_statistic",
    "wilks_test",
]
