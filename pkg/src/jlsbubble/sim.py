"""Synthetic price paths from the generalized JLS jump dynamics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .lppl import LpplParams, ModelSpec, hazard_b, is_gamma_one, model_price
from .timeseries import business_days

HAZARD_TOL = 1e-12


class SimMode(str, Enum):
    CURVE = "curve"
    STOCHASTIC = "stochastic"


class HazardNegative(ValueError):
    """The hazard parameters violate non-negativity of the crash rate."""


class PathDiscarded(RuntimeError):
    """The simulated price went non-positive."""


def _spec_of(params: LpplParams) -> ModelSpec:
    has_p1, has_gamma = params.p1 > 0, not is_gamma_one(params.gamma)
    return {(False, False): ModelSpec.M0, (True, False): ModelSpec.M1,
            (False, True): ModelSpec.M2, (True, True): ModelSpec.M3}[has_p1, has_gamma]


def hazard_coefficients(params: LpplParams, kappa: float) -> tuple[float, float, float]:
    """(B', C', phi') of the crash hazard that integrates to the price-form LPPL.

    B' = -m B / kappa and C' = -C sqrt(m^2 + omega^2) / kappa. The phase
    phi' = phi - atan2(omega, m) makes the hazard's derivative phase line up
    with the price form. For gamma < 1 the drift also carries 1 / (1 - gamma),
    which is applied in :func:`hazard_rate`.
    """
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    m, w = params.m, params.omega
    return (-m * params.B / kappa, -params.C * math.hypot(m, w) / kappa,
            params.phi - math.atan2(w, m))


def hazard_rate(params: LpplParams, kappa: float, t, check: bool = True):
    """Crash hazard h(t) per trading day.

    With gamma < 1 the hazard is scaled by 1 / (1 - gamma) so that the drift
    kappa (p - p1)^gamma h reproduces (p - p1)^(1 - gamma) = F_LPPL.
    Raises :class:`HazardNegative` when ``check`` and any value is below -1e-12.
    """
    bp, cp, php = hazard_coefficients(params, kappa)
    d = params.t_c - np.asarray(t, dtype=float)
    if np.any(d <= 0):
        raise ValueError("t must be strictly before t_c")
    h = d ** (params.m - 1.0) * (bp + cp * np.cos(params.omega * np.log(d) - php))
    if not is_gamma_one(params.gamma):
        h = h / (1.0 - params.gamma)
    if check and np.any(h < -HAZARD_TOL):
        raise HazardNegative(f"negative hazard rate (b = {hazard_b(params):.4g})")
    return float(h) if np.ndim(h) == 0 else h


@dataclass(frozen=True)
class SimConfig:
    params: LpplParams
    kappa: float = 1.0
    sigma: float = 0.0
    n_days: int = 250
    seed: int = 0
    mode: SimMode = SimMode.CURVE

    def __post_init__(self):
        object.__setattr__(self, "mode", SimMode(self.mode))
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.n_days < 2:
            raise ValueError("n_days must be >= 2")
        if not 0 < self.kappa <= 1:
            raise ValueError("kappa must lie in (0, 1]")
        if self.params.t_c <= self.n_days - 1:
            raise ValueError("t_c must lie beyond the last simulated day")

    @property
    def spec(self) -> ModelSpec:
        return _spec_of(self.params)


@dataclass(frozen=True)
class SimPath:
    prices: np.ndarray
    crash_day: int | None = None
    jumped: bool = False
    jump_size: float = 0.0

    def to_csv(self, path, start="2000-01-03") -> None:
        """Write ``date,price`` rows on a weekday calendar, readable by ``load_price_csv``."""
        dates = business_days(start, len(self.prices))
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["date", "price"])
            for d, p in zip(dates, self.prices):
                w.writerow([str(d), repr(float(p))])


def simulate(config: SimConfig) -> SimPath:
    """Price path over ``n_days`` trading days.

    Curve mode returns the model price without noise or jumps. Stochastic
    mode runs a daily Euler step ``p += mu p + sigma p Z`` with
    ``mu p = kappa (p - p1)^gamma h(t)``; each day a crash occurs with
    probability ``min(h, 1)``, removes ``kappa (p - p1)^gamma`` and ends the path.
    """
    par, n = config.params, config.n_days
    t = np.arange(n, dtype=float)
    if config.mode is SimMode.CURVE:
        return SimPath(np.asarray(model_price(config.spec, par, t), dtype=float))

    h = hazard_rate(par, config.kappa, t)
    rng = np.random.default_rng(config.seed)
    gamma = 1.0 if is_gamma_one(par.gamma) else par.gamma
    p = np.empty(n)
    p[0] = model_price(config.spec, par, 0.0)
    for i in range(n - 1):
        excess = p[i] - par.p1
        if excess <= 0:
            raise PathDiscarded(f"price fell to the fundamental value on day {i}")
        if rng.random() < min(h[i], 1.0):
            jump = config.kappa * excess ** gamma
            p[i + 1] = p[i] - jump
            if p[i + 1] <= 0:
                raise PathDiscarded(f"jump on day {i} drives the price non-positive")
            return SimPath(p[:i + 2].copy(), crash_day=i + 1, jumped=True, jump_size=jump)
        drift = config.kappa * excess ** gamma * h[i]
        p[i + 1] = p[i] + drift + config.sigma * p[i] * rng.standard_normal()
        if p[i + 1] <= 0:
            raise PathDiscarded(f"price driven non-positive on day {i + 1}")
    return SimPath(p)
