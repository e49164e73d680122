"""LPPL function, the four nested price models, the profiled linear solve and
bubble-validity diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

TWO_PI = 2.0 * math.pi
GAMMA_ONE_TOL = 1e-5
MAX_CONDITION = 1e12


class ModelUndefined(ValueError):
    """The model price (or its transformed target) is undefined on the window."""


class IllConditioned(ValueError):
    """The 3x3 normal system for (A, B, C) is numerically singular."""


class ModelSpec(str, Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    M0PRIME = "M0prime"

    @classmethod
    def parse(cls, text: str) -> "ModelSpec":
        key = str(text).strip().replace("′", "prime").replace("'", "prime")
        for spec in cls:
            if spec.value.lower() == key.lower():
                return spec
        raise ValueError(f"unknown model spec {text!r}")

    @property
    def has_p1(self) -> bool:
        return self in (ModelSpec.M1, ModelSpec.M3)

    @property
    def has_gamma(self) -> bool:
        return self in (ModelSpec.M2, ModelSpec.M3)

    @property
    def nonlinear_names(self) -> tuple[str, ...]:
        names = ("t_c", "m", "omega", "phi")
        if self.has_p1:
            names += ("p1",)
        if self.has_gamma:
            names += ("gamma",)
        return names

    @property
    def n_free(self) -> int:
        """Free parameters including the three linear ones."""
        return len(self.nonlinear_names) + 3

    @property
    def price_form(self) -> "ModelSpec":
        """Spec whose price formula this spec uses (M0prime prices like M0)."""
        return ModelSpec.M0 if self is ModelSpec.M0PRIME else self


@dataclass(frozen=True)
class LpplParams:
    """Full parameter vector. ``t_c`` is in trading days from the window start."""

    t_c: float
    m: float
    omega: float
    phi: float
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    p1: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.p1 < 0:
            raise ValueError(f"p1 must be >= 0, got {self.p1}")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")

    def with_linear(self, abc) -> "LpplParams":
        a, b, c = (float(v) for v in abc)
        return replace(self, A=a, B=b, C=c)

    def normalized(self) -> "LpplParams":
        """Same curve in canonical form: C >= 0 and phi in [0, 2*pi).

        (C, phi) and (-C, phi + pi) describe the same oscillation.
        """
        if self.C < 0:
            return replace(self, C=-self.C, phi=(self.phi + math.pi) % TWO_PI)
        return replace(self, phi=self.phi % TWO_PI)

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in
                ("t_c", "m", "omega", "phi", "A", "B", "C", "p1", "gamma")}


@dataclass(frozen=True)
class ResidualVector:
    values: np.ndarray
    rms: float

    @classmethod
    def of(cls, values) -> "ResidualVector":
        values = np.asarray(values, dtype=float)
        return cls(values, float(np.sqrt(np.mean(values ** 2))))

    @property
    def sse(self) -> float:
        return float(np.dot(self.values, self.values))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class BubbleFlags:
    bubble_m: bool
    hazard_nonneg: bool
    lppl_conditions: bool
    b: float


def _dt(t_c, t):
    d = t_c - np.asarray(t, dtype=float)
    if np.any(d <= 0):
        raise ModelUndefined("t must be strictly before t_c")
    return d


def regressors(t, t_c, m, omega, phi) -> np.ndarray:
    """Columns {1, (t_c-t)^m, (t_c-t)^m cos(omega ln(t_c-t) - phi)}."""
    d = _dt(t_c, t)
    f = d ** m
    return np.column_stack([np.ones_like(f), f, f * np.cos(omega * np.log(d) - phi)])


def eval_flppl(params: LpplParams, t):
    """A + B(t_c-t)^m + C(t_c-t)^m cos(omega ln(t_c-t) - phi); scalar or array ``t``."""
    d = _dt(params.t_c, t)
    f = d ** params.m
    out = params.A + params.B * f + params.C * f * np.cos(params.omega * np.log(d) - params.phi)
    return float(out) if np.ndim(out) == 0 else out


def is_gamma_one(gamma: float) -> bool:
    return gamma >= 1.0 - GAMMA_ONE_TOL


def price_from_f(spec: ModelSpec, f, p1: float = 0.0, gamma: float = 1.0):
    """Model price from an already-evaluated F_LPPL."""
    spec = spec.price_form
    base = p1 if spec.has_p1 else 0.0
    if not spec.has_gamma or is_gamma_one(gamma):
        return base + np.exp(f)
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ModelUndefined("F_LPPL <= 0 with gamma < 1: model undefined on window")
    return base + f ** (1.0 / (1.0 - gamma))


def model_price(spec: ModelSpec, params: LpplParams, t):
    """Price curve of ``spec`` at trading-day index ``t``.

    gamma within 1e-5 of 1 takes the exponential branch.
    """
    out = price_from_f(spec, eval_flppl(params, t), params.p1, params.gamma)
    return float(out) if np.ndim(out) == 0 else out


def transformed_target(spec: ModelSpec, p, p1: float = 0.0, gamma: float = 1.0) -> np.ndarray:
    """The quantity the LPPL is regressed on: ln p, ln(p-p1), p^(1-g) or (p-p1)^(1-g)."""
    p = np.asarray(p, dtype=float)
    spec = spec.price_form
    x = p - p1 if spec.has_p1 else p
    if np.any(x <= 0):
        raise ModelUndefined("p1 must be below every price in the window")
    if not spec.has_gamma or is_gamma_one(gamma):
        return np.log(x)
    return x ** (1.0 - gamma)


def _sym3_extreme_eigs(a00, a01, a02, a11, a12, a22) -> tuple[float, float]:
    """Largest and smallest eigenvalue of a symmetric 3x3 matrix (closed form)."""
    p1 = a01 * a01 + a02 * a02 + a12 * a12
    q = (a00 + a11 + a22) / 3.0
    b00, b11, b22 = a00 - q, a11 - q, a22 - q
    p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * p1
    if p2 == 0.0:
        return q, q
    p = math.sqrt(p2 / 6.0)
    det = (b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02)
           + a02 * (a01 * a12 - b11 * a02))
    r = min(1.0, max(-1.0, det / (2.0 * p ** 3)))
    ang = math.acos(r) / 3.0
    return q + 2.0 * p * math.cos(ang), q + 2.0 * p * math.cos(ang + TWO_PI / 3.0)


def linear_lstsq(X: np.ndarray, y: np.ndarray, max_condition: float = MAX_CONDITION) -> np.ndarray:
    """Three-column least squares through the normal equations.

    The normal matrix is Jacobi-equilibrated, its condition number checked
    against ``max_condition`` (:class:`IllConditioned` above it) and the system
    solved by Cholesky.
    """
    G = (X.T @ X).tolist()
    rhs = (X.T @ y).tolist()
    d0, d1, d2 = (math.sqrt(v) if v > 0 else 0.0 for v in (G[0][0], G[1][1], G[2][2]))
    if not (d0 and d1 and d2) or not math.isfinite(d0 * d1 * d2):
        raise IllConditioned("degenerate regressor")
    s01, s02, s12 = G[0][1] / (d0 * d1), G[0][2] / (d0 * d2), G[1][2] / (d1 * d2)
    hi, lo = _sym3_extreme_eigs(1.0, s01, s02, 1.0, s12, 1.0)
    if not lo > 0 or hi / lo > max_condition:
        raise IllConditioned("normal matrix condition number above threshold")
    # Cholesky of the unit-diagonal equilibrated matrix
    l10, l20 = s01, s02
    l11 = math.sqrt(1.0 - l10 * l10)
    l21 = (s12 - l20 * l10) / l11
    l22 = math.sqrt(max(1.0 - l20 * l20 - l21 * l21, 0.0))
    if l22 == 0.0:
        raise IllConditioned("normal matrix not positive definite")
    b0, b1, b2 = rhs[0] / d0, rhs[1] / d1, rhs[2] / d2
    z0 = b0
    z1 = (b1 - l10 * z0) / l11
    z2 = (b2 - l20 * z0 - l21 * z1) / l22
    x2 = z2 / l22
    x1 = (z1 - l21 * x2) / l11
    x0 = z0 - l10 * x1 - l20 * x2
    return np.array([x0 / d0, x1 / d1, x2 / d2])


def solve_linear_abc(spec: ModelSpec, nonlinear, series) -> tuple[float, float, float]:
    """(A, B, C) minimizing the squared LPPL misfit of the transformed prices.

    ``nonlinear`` is an :class:`LpplParams` or a mapping with ``t_c, m, omega, phi``
    and, where relevant, ``p1`` and ``gamma``. ``series`` is a
    :class:`~jlsbubble.timeseries.DiscountedSeries` or a ``(t, p)`` pair.
    """
    nl = nonlinear.as_dict() if isinstance(nonlinear, LpplParams) else dict(nonlinear)
    t, p = _tp(series)
    y = transformed_target(spec, p, nl.get("p1", 0.0), nl.get("gamma", 1.0))
    X = regressors(t, nl["t_c"], nl["m"], nl["omega"], nl["phi"])
    a, b, c = linear_lstsq(X, y)
    return float(a), float(b), float(c)


def _tp(series):
    if isinstance(series, tuple):
        return np.asarray(series[0], dtype=float), np.asarray(series[1], dtype=float)
    return series.t_index, series.values


def relative_residuals(p, p_model) -> np.ndarray:
    return (np.asarray(p) - p_model) / p_model


def residuals(spec: ModelSpec, params: LpplParams, series) -> ResidualVector:
    """R(t) = (p - p_M)/p_M; for M0prime the log residual ln p - F_LPPL."""
    t, p = _tp(series)
    if spec is ModelSpec.M0PRIME:
        return ResidualVector.of(np.log(p) - eval_flppl(params, t))
    return ResidualVector.of(relative_residuals(p, model_price(spec, params, t)))


def hazard_b(params: LpplParams) -> float:
    """b = -B m - |C| sqrt(m^2 + omega^2); the hazard rate is non-negative iff b >= 0."""
    return -params.B * params.m - abs(params.C) * math.hypot(params.m, params.omega)


def check_bubble_conditions(params: LpplParams) -> BubbleFlags:
    b = hazard_b(params)
    lppl = (params.B < 0 and 0.1 <= params.m <= 0.9
            and 6.0 <= params.omega <= 13.0 and -1.0 <= params.C <= 1.0)
    return BubbleFlags(bubble_m=bool(0.0 < params.m < 1.0), hazard_nonneg=bool(b >= 0.0),
                       lppl_conditions=bool(lppl), b=float(b))
