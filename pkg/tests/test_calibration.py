import json
import math

import numpy as np
import pytest

from jlsbubble.calibration import (FitError, FitResult, SearchBounds, boundary_distances, boundary_ok, fit,
                                   fit_family, fit_m0_prime, lm_polish, nested_seeds,
                                   taboo_seed_points)
from jlsbubble.lppl import LpplParams, ModelSpec
from jlsbubble.timeseries import DiscountedSeries

from synth import N, draw_params, noiseless, noisy, recovery_errors

M0, M1, M2, M3 = ModelSpec.M0, ModelSpec.M1, ModelSpec.M2, ModelSpec.M3


@pytest.fixture(scope="module")
def m0_truth():
    return draw_params(M0, 3)


@pytest.fixture(scope="module")
def m0_series(m0_truth):
    return noiseless(M0, m0_truth)


def test_bounds_for_series(m0_series):
    b = SearchBounds.for_series(m0_series)
    assert b.t_c == pytest.approx((N - 1, (N - 1) * 1.4))
    p_min = m0_series.values.min()
    assert b.p1 == pytest.approx((0.2 * p_min, 0.99 * p_min))
    assert SearchBounds.for_series(m0_series, omega=(5, 15)).omega == (5, 15)
    with pytest.raises(ValueError):
        SearchBounds(t_c=(3, 2))


def test_single_start_is_midpoint(m0_series):
    b = SearchBounds.for_series(m0_series)
    (x,) = taboo_seed_points(M0, b, 1, 0, m0_series)
    lo, hi = b.arrays(M0.nonlinear_names)
    np.testing.assert_allclose(x, 0.5 * (lo + hi))


def test_seed_points_deterministic(m0_series):
    b = SearchBounds.for_series(m0_series)
    a = taboo_seed_points(M1, b, 6, 42, m0_series)
    c = taboo_seed_points(M1, b, 6, 42, m0_series)
    assert len(a) == 6
    for x, y in zip(a, c):
        np.testing.assert_array_equal(x, y)
    lo, hi = b.arrays(M1.nonlinear_names)
    assert all(np.all((x >= lo) & (x <= hi)) for x in a)


def test_polish_fixed_point(m0_truth, m0_series):
    params, cost, converged = lm_polish(M0, m0_truth, m0_series, SearchBounds.for_series(m0_series))
    assert cost < 1e-24 and converged
    assert params.t_c == pytest.approx(m0_truth.t_c, rel=1e-9)


def test_polish_m3_from_perturbed_start():
    truth = draw_params(M3, 1)
    series = noiseless(M3, truth)
    start = LpplParams(**{**truth.as_dict(), **{k: getattr(truth, k) * 1.05 for k in ("m", "omega", "p1", "gamma")},
                          "t_c": truth.t_c + 0.05 * (truth.t_c - (N - 1))})
    params, cost, _ = lm_polish(M3, start, series, SearchBounds.for_series(series))
    assert recovery_errors(M3, truth, params.normalized()) == []


def test_polish_rejects_undefined_candidate():
    truth = draw_params(M2, 0)
    series = noiseless(M2, truth)
    bad = LpplParams(**{**truth.as_dict(), "gamma": 0.999, "t_c": N - 1 + 1e-3})
    out = lm_polish(M2, bad, series, SearchBounds.for_series(series))
    assert out is None or math.isfinite(out[1])


def test_m1_round_trip():
    truth = draw_params(M1, 5)
    r = fit(M1, noiseless(M1, truth), n_starts=10, seed=0)
    assert r.boundary_ok
    assert r.params.p1 == pytest.approx(truth.p1, rel=1e-3)
    assert recovery_errors(M1, truth, r.params) == []


def test_fit_is_deterministic(m0_series):
    a = fit(M1, m0_series, n_starts=4, seed=9)
    b = fit(M1, m0_series, n_starts=4, seed=9)
    assert json.dumps(a.as_dict()) == json.dumps(b.as_dict())


def test_fit_result_fields(m0_truth, m0_series):
    r = fit(M0, m0_series, n_starts=6, seed=1)
    assert r.cost == pytest.approx(np.sum(r.residuals.values ** 2))
    assert r.rms == pytest.approx(math.sqrt(r.cost / N))
    assert r.n_starts_tried == 6 and r.seed == 1
    assert r.window == (str(m0_series.t1), str(m0_series.t2))
    assert boundary_distances(M0, r.params, r.bounds)["t_c"] >= 0.01
    back = FitResult.from_dict(json.loads(json.dumps(r.as_dict())))
    assert back.params == r.params and back.cost == r.cost and back.spec is M0


def test_boundary_rule():
    b = SearchBounds(t_c=(100.0, 140.0), p1=(10.0, 50.0))
    inner = LpplParams(t_c=120, m=0.5, omega=7, phi=0, p1=30, gamma=0.5)
    assert boundary_ok(M3, inner, b)
    assert not boundary_ok(M0, LpplParams(t_c=100.3, m=0.5, omega=7, phi=0), b)
    assert not boundary_ok(M3, LpplParams(t_c=120, m=0.5, omega=7, phi=0, p1=49.9, gamma=0.5), b)
    assert not boundary_ok(M2, LpplParams(t_c=120, m=0.5, omega=7, phi=0, gamma=0.995), b)
    # omega and phi are not boundary-checked
    assert boundary_ok(M0, LpplParams(t_c=120, m=0.5, omega=40, phi=0), b)


def test_no_survivor_returns_flagged_best():
    # tiny window forces the t_c search against the lower bound
    truth = draw_params(M0, 2)
    series = noiseless(M0, truth)
    b = SearchBounds.for_series(series, t_c=(N - 1, N - 1 + 2.0))
    r = fit(M0, series, b, n_starts=4, seed=0)
    assert not r.boundary_ok and r.notes


def test_short_window_rejected():
    with pytest.raises(ValueError, match="at least 30"):
        fit(M0, DiscountedSeries.from_values(np.linspace(1, 2, 29)))


def test_all_candidates_undefined(m0_series):
    # p1 above every price leaves ln(p - p1) undefined everywhere
    p_min = float(m0_series.values.min())
    b = SearchBounds.for_series(m0_series, p1=(1.1 * p_min, 1.2 * p_min))
    with pytest.raises(FitError, match="undefined"):
        fit(M1, m0_series, b, n_starts=3)


def test_m0_prime_matches_m0_on_noiseless_data(m0_truth, m0_series):
    a = fit(M0, m0_series, n_starts=6, seed=0)
    b = fit_m0_prime(m0_series, n_starts=6, seed=0)
    assert b.spec is ModelSpec.M0PRIME
    assert b.params.t_c == pytest.approx(a.params.t_c, abs=1e-3)
    assert b.params.m == pytest.approx(a.params.m, rel=1e-4)


def test_m0_prime_cost_agrees_to_first_order():
    truth = draw_params(M0, 4)
    series = noisy(M0, truth, 1e-4, seed=1)
    a = fit(M0, series, n_starts=6, seed=0)
    b = fit_m0_prime(series, n_starts=6, seed=0)
    assert b.objective == pytest.approx(a.cost, rel=0.02)
    assert b.cost == pytest.approx(a.cost, rel=0.02)


def test_nesting_monotone_when_larger_model_is_true():
    truth = draw_params(M3, 7)
    series = noisy(M3, truth, 0.002, seed=3)
    fits = fit_family(series, (M0, M3), n_starts=6, seed=0)
    assert fits[M3].cost <= fits[M0].cost + 1e-12


def test_family_fits_missing_parents_and_returns_requested():
    truth = draw_params(M3, 2)
    fits = fit_family(noiseless(M3, truth), (M3,), n_starts=6, seed=0)
    assert list(fits) == [M3]
    assert recovery_errors(M3, truth, fits[M3].params) == []


def test_nested_seeds_expand_fixed_parameters(m0_series):
    b = SearchBounds.for_series(m0_series)
    parent = LpplParams(t_c=280, m=0.5, omega=7, phi=1)
    assert len(nested_seeds(M3, parent, M0, b)) == 1 + 9
    assert len(nested_seeds(M3, parent, M1, b)) == 1 + 3
    seeds = nested_seeds(M1, parent, M0, b)
    assert all(b.p1[0] < s["p1"] < b.p1[1] for s in seeds[1:])
