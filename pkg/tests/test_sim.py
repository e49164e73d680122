import math

import numpy as np
import pytest

from jlsbubble.lppl import LpplParams, ModelSpec, eval_flppl, hazard_b, model_price
from jlsbubble.sim import (HazardNegative, PathDiscarded, SimConfig, SimMode, hazard_coefficients, hazard_rate,
                           simulate)
from jlsbubble.timeseries import load_price_csv

from synth import draw_params

BASE = LpplParams(t_c=280, m=0.5, omega=7, phi=1.0, A=math.log(1000), B=-0.03, C=0.002)


def _with(p, **kw):
    return LpplParams(**{**p.as_dict(), **kw})


def test_curve_mode_is_exp_f():
    path = simulate(SimConfig(BASE, n_days=250))
    np.testing.assert_allclose(path.prices, np.exp(eval_flppl(BASE, np.arange(250.0))), rtol=1e-15)
    assert not path.jumped and path.crash_day is None


def test_single_term_hazard():
    p = _with(BASE, C=0.0)
    t = np.array([0.0, 100.0, 250.0])
    np.testing.assert_allclose(hazard_rate(p, 0.5, t), (-p.m * p.B / 0.5) * (p.t_c - t) ** (p.m - 1), rtol=1e-14)


def test_hazard_power_law_ratio():
    p = _with(BASE, C=0.0, m=0.3)
    ratio = hazard_rate(p, 1.0, p.t_c - 0.01) / hazard_rate(p, 1.0, p.t_c - 1.0)
    assert ratio == pytest.approx(100 ** (1 - p.m), rel=1e-12)


def test_hazard_coefficients_invert():
    bp, cp, _ = hazard_coefficients(BASE, 0.4)
    assert -0.4 * bp / BASE.m == pytest.approx(BASE.B)
    assert -0.4 * cp / math.hypot(BASE.m, BASE.omega) == pytest.approx(BASE.C)


def test_hazard_nonnegative_at_boundary():
    # choose C so that b = -B m - |C| sqrt(m^2 + w^2) is exactly zero
    p = _with(BASE, C=-BASE.B * BASE.m / math.hypot(BASE.m, BASE.omega))
    assert hazard_b(p) == pytest.approx(0.0, abs=1e-15)
    grid = np.linspace(0, p.t_c - 1e-6, 200_001)
    assert hazard_rate(p, 1.0, grid, check=False).min() >= -1e-12


def test_negative_hazard_rejected():
    p = _with(BASE, C=2 * BASE.C * 20)
    assert hazard_b(p) < 0
    with pytest.raises(HazardNegative):
        hazard_rate(p, 1.0, np.linspace(0, 279, 5000))


def test_drift_reproduces_price_form():
    # kappa (p - p1)^gamma h equals dp/dt along the model curve
    for spec in (ModelSpec.M0, ModelSpec.M1, ModelSpec.M2, ModelSpec.M3):
        par = draw_params(spec, 4)
        t = np.linspace(0, 240, 50)
        cfg = SimConfig(par, kappa=0.7, n_days=250)
        price = model_price(spec, par, t)
        deriv = (model_price(spec, par, t + 1e-5) - model_price(spec, par, t - 1e-5)) / 2e-5
        gamma = par.gamma if spec.has_gamma else 1.0
        drift = cfg.kappa * (price - par.p1) ** gamma * hazard_rate(par, cfg.kappa, t, check=False)
        np.testing.assert_allclose(drift, deriv, rtol=1e-6)


def test_jump_lands_on_fundamental_value():
    # hazard above one near t_c forces a crash
    p = LpplParams(t_c=50.4, m=0.1, omega=7, phi=0, A=math.log(100), B=-20, C=0, p1=30.0)
    path = simulate(SimConfig(p, kappa=1.0, n_days=51, seed=1, mode="stochastic"))
    assert path.jumped and path.prices[-1] == pytest.approx(30.0, rel=1e-12)
    assert path.jump_size == pytest.approx(path.prices[-2] - 30.0, rel=1e-12)
    assert path.crash_day == len(path.prices) - 1


def test_same_seed_same_path():
    cfg = SimConfig(BASE, kappa=0.5, sigma=0.01, n_days=200, seed=3, mode=SimMode.STOCHASTIC)
    a, b = simulate(cfg), simulate(cfg)
    np.testing.assert_array_equal(a.prices, b.prices)
    c = simulate(SimConfig(BASE, kappa=0.5, sigma=0.01, n_days=200, seed=4, mode=SimMode.STOCHASTIC))
    assert not np.array_equal(a.prices[:len(c.prices)], c.prices[:len(a.prices)])


def test_crash_probability_matches_integrated_hazard():
    p = _with(BASE, C=0.0, B=-0.002, t_c=202.0)
    n = 200
    h = hazard_rate(p, 0.5, np.arange(n, dtype=float))
    survive = float(np.prod(1 - np.minimum(h[:-1], 1)))
    # the continuous integral up to t_c is finite, so crashing is not certain
    total = -p.B / 0.5 * p.t_c ** p.m
    assert math.isfinite(total) and math.exp(-total) > 0
    crashed = sum(simulate(SimConfig(p, kappa=0.5, n_days=n, seed=s, mode="stochastic")).jumped for s in range(600))
    expected = 1 - survive
    assert 0 < expected < 1
    assert abs(crashed / 600 - expected) < 4 * math.sqrt(expected * (1 - expected) / 600)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(BASE, sigma=-1)
    with pytest.raises(ValueError):
        SimConfig(BASE, n_days=1)
    with pytest.raises(ValueError):
        SimConfig(BASE, kappa=1.5)
    with pytest.raises(ValueError, match="t_c"):
        SimConfig(BASE, n_days=300)
    with pytest.raises(PathDiscarded):
        simulate(SimConfig(BASE, sigma=5.0, n_days=250, seed=0, mode="stochastic"))


def test_csv_round_trip(tmp_path):
    path = simulate(SimConfig(BASE, n_days=60))
    out = tmp_path / "sim.csv"
    path.to_csv(out)
    back = load_price_csv(out)
    np.testing.assert_array_equal(back.values, path.prices)
    assert str(back.dates[0]) == "2000-01-03" and len(back) == 60
