"""Fitting a model spec to a discounted window.

The linear coefficients (A, B, C) are always profiled out by
:func:`~jlsbubble.lppl.linear_lstsq`; the search runs over the nonlinear
parameters only. Starting points come from a seeded taboo search over a cell
grid, each start is polished by a bounded Levenberg-Marquardt, and the cheapest
candidate that keeps clear of the search boundaries wins.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .lppl import (GAMMA_ONE_TOL, TWO_PI, BubbleFlags, IllConditioned, LpplParams,
                   ModelSpec, ModelUndefined, ResidualVector, check_bubble_conditions,
                   linear_lstsq, model_price, price_from_f, regressors, relative_residuals,
                   transformed_target)
from .timeseries import MIN_FIT_LENGTH, DiscountedSeries

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
DEFAULT_N_STARTS = 50
GRID_CELLS = 8
BOUNDARY_MARGIN = 0.01
TC_EPS = 1e-6
PHI_MAX = TWO_PI - 1e-5
LM_MAX_ITER = 500
LM_RTOL = 1e-10
FD_REL_STEP = 1e-6
BOUNDARY_CHECKED = ("t_c", "m", "p1", "gamma")


class FitError(RuntimeError):
    """No candidate produced a defined model on the window."""


@dataclass(frozen=True)
class SearchBounds:
    """Search intervals for the nonlinear parameters (t_c in trading days from t1)."""

    t_c: tuple[float, float]
    m: tuple[float, float] = (1e-5, 1 - 1e-5)
    omega: tuple[float, float] = (0.01, 40.0)
    phi: tuple[float, float] = (0.0, PHI_MAX)
    p1: tuple[float, float] = (0.0, 0.0)
    gamma: tuple[float, float] = (1e-5, 1 - GAMMA_ONE_TOL)

    @classmethod
    def for_series(cls, series: DiscountedSeries, tc_extension: float = 0.4, **overrides) -> "SearchBounds":
        t2 = float(len(series) - 1)
        p_min = float(np.min(series.values))
        b = cls(t_c=(t2, t2 + tc_extension * t2), p1=(0.2 * p_min, 0.99 * p_min))
        return replace(b, **{k: tuple(v) for k, v in overrides.items()})

    def __post_init__(self):
        for name in ("t_c", "m", "omega", "phi", "p1", "gamma"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"empty search interval for {name}: [{lo}, {hi}]")

    def interval(self, name: str) -> tuple[float, float]:
        return getattr(self, name)

    def arrays(self, names) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([self.interval(n)[0] for n in names], dtype=float)
        hi = np.array([self.interval(n)[1] for n in names], dtype=float)
        if "t_c" in names:
            i = names.index("t_c")
            lo[i] += TC_EPS
            hi[i] = max(hi[i], lo[i])
        return lo, hi

    def as_dict(self) -> dict:
        return {k: list(getattr(self, k)) for k in ("t_c", "m", "omega", "phi", "p1", "gamma")}


@dataclass(frozen=True)
class FitResult:
    spec: ModelSpec
    params: LpplParams
    residuals: ResidualVector
    cost: float
    rms: float
    flags: BubbleFlags
    boundary_ok: bool
    n_starts_tried: int
    seed: int
    bounds: SearchBounds
    objective: float
    n_obs: int
    converged: bool = True
    window: tuple[str, str] | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def sigma2(self) -> float:
        """Maximum-likelihood residual variance."""
        return self.cost / self.n_obs

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "spec": self.spec.value,
            "params": self.params.as_dict(),
            "cost": self.cost,
            "rms": self.rms,
            "objective": self.objective,
            "n_obs": self.n_obs,
            "flags": {"bubble_m": self.flags.bubble_m, "hazard_nonneg": self.flags.hazard_nonneg,
                      "lppl_conditions": self.flags.lppl_conditions, "b": self.flags.b},
            "boundary_ok": self.boundary_ok,
            "converged": self.converged,
            "n_starts_tried": self.n_starts_tried,
            "seed": self.seed,
            "bounds": self.bounds.as_dict(),
            "window": list(self.window) if self.window else None,
            "notes": list(self.notes),
            "residuals": [float(v) for v in self.residuals.values],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        params = LpplParams(**d["params"])
        res = ResidualVector.of(d["residuals"])
        return cls(spec=ModelSpec.parse(d["spec"]), params=params, residuals=res,
                   cost=float(d["cost"]), rms=float(d["rms"]),
                   flags=check_bubble_conditions(params), boundary_ok=bool(d["boundary_ok"]),
                   n_starts_tried=int(d["n_starts_tried"]), seed=int(d["seed"]),
                   bounds=SearchBounds(**{k: tuple(v) for k, v in d["bounds"].items()}),
                   objective=float(d["objective"]), n_obs=int(d["n_obs"]),
                   converged=bool(d.get("converged", True)),
                   window=tuple(d["window"]) if d.get("window") else None,
                   notes=tuple(d.get("notes", ())))


class _Problem:
    """Profiled residual map x -> r(x) for one spec on one window."""

    def __init__(self, spec: ModelSpec, series: DiscountedSeries, bounds: SearchBounds,
                 log_cost: bool = False):
        self.spec = spec
        self.names = spec.nonlinear_names
        self.lo, self.hi = bounds.arrays(self.names)
        self.t = np.asarray(series.t_index, dtype=float)
        self.p = np.asarray(series.values, dtype=float)
        self.log_cost = log_cost
        self._logp = np.log(self.p)
        self._iphi = self.names.index("phi")

    def unpack(self, x) -> dict:
        return dict(zip(self.names, (float(v) for v in x)))

    def pack(self, params) -> np.ndarray:
        d = params.as_dict() if isinstance(params, LpplParams) else params
        return np.array([d.get(n, 0.0) for n in self.names], dtype=float)

    def project(self, x) -> np.ndarray:
        x = np.array(x, dtype=float)
        x[self._iphi] = x[self._iphi] % TWO_PI
        return np.clip(x, self.lo, self.hi)

    def solve(self, x):
        """(params with A,B,C, F, objective residual vector); raises on undefined models."""
        nl = self.unpack(x)
        p1, gamma = nl.get("p1", 0.0), nl.get("gamma", 1.0)
        X = regressors(self.t, nl["t_c"], nl["m"], nl["omega"], nl["phi"])
        y = self._logp if self.spec.price_form is ModelSpec.M0 else transformed_target(self.spec, self.p, p1, gamma)
        abc = linear_lstsq(X, y)
        f = X @ abc
        if self.log_cost:
            r = y - f
        else:
            r = relative_residuals(self.p, price_from_f(self.spec, f, p1, gamma))
        if not np.all(np.isfinite(r)):
            raise ModelUndefined("non-finite residuals")
        params = LpplParams(t_c=nl["t_c"], m=nl["m"], omega=nl["omega"], phi=nl["phi"],
                            A=float(abc[0]), B=float(abc[1]), C=float(abc[2]), p1=p1, gamma=gamma)
        return params, f, r

    def residual(self, x) -> np.ndarray | None:
        try:
            return self.solve(x)[2]
        except (ModelUndefined, IllConditioned, FloatingPointError, np.linalg.LinAlgError, ValueError):
            return None

    def cost(self, x) -> float:
        r = self.residual(x)
        return math.inf if r is None else float(r @ r)


def _midpoint(problem: _Problem) -> np.ndarray:
    return 0.5 * (problem.lo + problem.hi)


def taboo_seed_points(spec: ModelSpec, bounds: SearchBounds, n_starts: int, seed: int,
                      series: DiscountedSeries, grid: int = GRID_CELLS, log_cost: bool | None = None) -> list[np.ndarray]:
    """Seeded starting points for :func:`lm_polish`, best first.

    A Latin hypercube over ``bounds`` is scored by the profiled cost, then a
    taboo walk on a ``grid``-cells-per-dimension lattice keeps moving to the best
    not-yet-visited neighbouring cell. The best point of each of the
    ``n_starts`` cheapest cells is returned. ``n_starts=1`` is the bounds midpoint.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    if log_cost is None:
        log_cost = spec is ModelSpec.M0PRIME
    problem = _Problem(spec, series, bounds, log_cost)
    if n_starts == 1:
        return [_midpoint(problem)]
    rng = np.random.default_rng(seed)
    lo, hi = problem.lo, problem.hi
    dim = len(lo)
    width = np.where(hi > lo, hi - lo, 1.0)

    best_in_cell: dict[tuple, tuple[float, np.ndarray]] = {}

    def cell_of(x):
        return tuple(np.minimum(((x - lo) / width * grid).astype(int), grid - 1))

    def visit(x):
        c = problem.cost(x)
        key = cell_of(x)
        prev = best_in_cell.get(key)
        if prev is None or c < prev[0]:
            best_in_cell[key] = (c, x)
        return key, c

    def sample_cell(key):
        return lo + (np.array(key) + rng.random(dim)) / grid * (hi - lo)

    n_lhs = max(64 * dim, 4 * n_starts)
    u = (rng.permuted(np.tile(np.arange(n_lhs), (dim, 1)), axis=1).T + rng.random((n_lhs, dim))) / n_lhs
    for row in u:
        visit(lo + row * (hi - lo))

    taboo = set(best_in_cell)
    n_moves = 16 * n_starts
    current = min(best_in_cell, key=lambda k: best_in_cell[k][0])
    for _ in range(n_moves):
        moves = []
        for d in range(dim):
            for step in (-1, 1):
                k = list(current)
                k[d] += step
                if 0 <= k[d] < grid and tuple(k) not in taboo:
                    moves.append(tuple(k))
        if not moves:
            frontier = sorted((v[0], k) for k, v in best_in_cell.items() if math.isfinite(v[0]))
            fresh = [k for _, k in frontier if any(
                0 <= k[d] + s < grid and tuple(k[:d] + (k[d] + s,) + k[d + 1:]) not in taboo
                for d in range(dim) for s in (-1, 1))]
            if not fresh:
                break
            current = fresh[0]
            continue
        scored = []
        for k in moves:
            key, c = visit(sample_cell(k))
            taboo.add(key)
            scored.append((c, key))
        scored.sort()
        current = scored[0][1]

    ranked = sorted(best_in_cell.values(), key=lambda cx: (cx[0], tuple(cx[1])))
    out = [x for c, x in ranked if math.isfinite(c)][:n_starts]
    return out or [_midpoint(problem)]


def _jacobian(problem: _Problem, x, r0) -> np.ndarray | None:
    J = np.empty((len(r0), len(x)))
    for i in range(len(x)):
        h = FD_REL_STEP * max(abs(x[i]), 1.0)
        xp, xm = x.copy(), x.copy()
        xp[i] = min(x[i] + h, problem.hi[i])
        xm[i] = max(x[i] - h, problem.lo[i])
        rp = problem.residual(xp) if xp[i] != x[i] else r0
        rm = problem.residual(xm) if xm[i] != x[i] else r0
        if rp is None and rm is None:
            return None
        if rp is None:
            rp, xp = r0, x
        if rm is None:
            rm, xm = r0, x
        span = xp[i] - xm[i]
        J[:, i] = 0.0 if span == 0 else (rp - rm) / span
    return J


def lm_polish(spec: ModelSpec, candidate, series: DiscountedSeries, bounds: SearchBounds,
              log_cost: bool | None = None, max_iter: int = LM_MAX_ITER, rtol: float = LM_RTOL):
    """Bounded Levenberg-Marquardt on the profiled residuals.

    Marquardt's diagonal scaling with Nielsen's damping update: the damping
    shrinks by up to 3x according to the gain ratio of accepted steps and grows
    by a doubling factor after rejected ones. Steps are projected onto the
    bounds with phi wrapped.

    Returns ``(params, cost, converged)`` where ``cost`` is the minimized objective,
    or ``None`` when the candidate itself is undefined on the window.
    """
    if log_cost is None:
        log_cost = spec is ModelSpec.M0PRIME
    problem = _Problem(spec, series, bounds, log_cost)
    x = problem.project(problem.pack(candidate) if not isinstance(candidate, np.ndarray) else candidate)
    r = problem.residual(x)
    if r is None:
        return None
    cost = float(r @ r)
    lam, nu = 1e-3, 2.0
    converged = False
    for _ in range(max_iter):
        if cost == 0.0:
            converged = True
            break
        J = _jacobian(problem, x, r)
        if J is None:
            break
        g = J.T @ r
        H = J.T @ J
        scale = np.maximum(np.diag(H), 1e-300)
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(H + lam * np.diag(scale), -g)
            except np.linalg.LinAlgError:
                lam, nu = lam * nu, nu * 2.0
                continue
            x_new = problem.project(x + step)
            r_new = problem.residual(x_new)
            c_new = math.inf if r_new is None else float(r_new @ r_new)
            if c_new < cost:
                accepted = True
                break
            lam, nu = lam * nu, nu * 2.0
        if not accepted:
            converged = True
            break
        # gain ratio of actual to linearly predicted reduction
        predicted = -2.0 * float(step @ g) - float(step @ H @ step)
        rho = (cost - c_new) / predicted if predicted > 0 else 1.0
        lam = max(lam * max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3), 1e-12)
        nu = 2.0
        rel = (cost - c_new) / cost
        x, r, cost = x_new, r_new, c_new
        if rel < rtol:
            converged = True
            break
    params = problem.solve(x)[0]
    return params, cost, converged


def boundary_distances(spec: ModelSpec, params: LpplParams, bounds: SearchBounds) -> dict[str, float]:
    """Distance of each boundary-checked parameter to its nearest search endpoint,
    relative to the interval width."""
    out = {}
    for name in BOUNDARY_CHECKED:
        if name not in spec.nonlinear_names:
            continue
        lo, hi = bounds.interval(name)
        v = getattr(params, name)
        out[name] = math.inf if hi <= lo else min(v - lo, hi - v) / (hi - lo)
    return out


def boundary_ok(spec: ModelSpec, params: LpplParams, bounds: SearchBounds, margin: float = BOUNDARY_MARGIN) -> bool:
    return all(d >= margin for d in boundary_distances(spec, params, bounds).values())


def _polish_task(args):
    spec, x, series, bounds, log_cost = args
    return lm_polish(spec, x, series, bounds, log_cost=log_cost)


def _result(spec, params, series, bounds, objective, ok, n_tried, seed, converged, notes=()):
    pricing = spec.price_form
    t, p = series.t_index, series.values
    res = ResidualVector.of(relative_residuals(p, model_price(pricing, params, t)))
    window = (series.t1.isoformat(), series.t2.isoformat()) if len(series.dates) else None
    return FitResult(spec=spec, params=params.normalized(), residuals=res, cost=res.sse, rms=res.rms,
                     flags=check_bubble_conditions(params), boundary_ok=ok, n_starts_tried=n_tried,
                     seed=seed, bounds=bounds, objective=objective, n_obs=len(series),
                     converged=converged, window=window, notes=tuple(notes))


def fit(spec: ModelSpec, series: DiscountedSeries, bounds: SearchBounds | None = None,
        n_starts: int = DEFAULT_N_STARTS, seed: int = 0, extra_seeds=(), workers: int = 1,
        log_cost: bool | None = None) -> FitResult:
    """Calibrate ``spec`` on ``series``.

    ``extra_seeds`` (parameter objects or dicts, e.g. the optimum of a nested
    model) are polished alongside the taboo starts, after projection into
    ``bounds``. Candidates closer than 1% of an interval width to a bound on
    t_c, m, p1 or gamma are discarded; if nothing survives, the cheapest raw
    candidate is returned with ``boundary_ok=False``.
    """
    if len(series) < MIN_FIT_LENGTH:
        raise ValueError(f"fit window must hold at least {MIN_FIT_LENGTH} observations, got {len(series)}")
    if log_cost is None:
        log_cost = spec is ModelSpec.M0PRIME
    bounds = bounds or SearchBounds.for_series(series)
    starts = taboo_seed_points(spec, bounds, n_starts, seed, series, log_cost=log_cost)
    problem = _Problem(spec, series, bounds, log_cost)
    starts += [problem.project(problem.pack(s)) for s in extra_seeds]
    tasks = [(spec, x, series, bounds, log_cost) for x in starts]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            polished = list(pool.map(_polish_task, tasks))
    else:
        polished = [_polish_task(t) for t in tasks]

    valid = [p for p in polished if p is not None]
    if not valid:
        raise FitError(f"{spec.value}: all {len(starts)} candidates undefined on the window")

    def rank(item):
        params, cost, _ = item
        return (cost, params.t_c, params.m)

    survivors = [v for v in valid if boundary_ok(spec, v[0], bounds)]
    pool_ = survivors or valid
    params, objective, converged = min(pool_, key=rank)
    notes = [] if survivors else ["no candidate cleared the boundary rule"]
    return _result(spec, params, series, bounds, objective, bool(survivors), len(starts), seed, converged, notes)


def fit_m0_prime(series: DiscountedSeries, bounds: SearchBounds | None = None,
                 n_starts: int = DEFAULT_N_STARTS, seed: int = 0, extra_seeds=(), workers: int = 1) -> FitResult:
    """M0 calibrated on the log-price misfit; cost and RMS are still reported on R(t)."""
    return fit(ModelSpec.M0PRIME, series, bounds, n_starts, seed, extra_seeds, workers, log_cost=True)


NESTED_PARENTS = {
    ModelSpec.M1: (ModelSpec.M0,),
    ModelSpec.M2: (ModelSpec.M0,),
    ModelSpec.M3: (ModelSpec.M0, ModelSpec.M1, ModelSpec.M2),
}

#: Interior fractions of a search interval tried for parameters a parent model fixes.
EXPANSION_QUANTILES = (0.25, 0.5, 0.75)


def nested_seeds(spec: ModelSpec, parent: LpplParams, parent_spec: ModelSpec, bounds: SearchBounds) -> list[dict]:
    """Starting points for ``spec`` derived from the optimum of a nested sub-model.

    The parent optimum itself usually sits on the boundary of the larger
    model's search box (p1 = 0 or gamma = 1), where the projected
    Levenberg-Marquardt step stalls. So besides the parent point, the
    parameters the parent held fixed are also set to interior quartiles of
    their intervals.
    """
    base = parent.as_dict()
    grids = {}
    if spec.has_p1 and not parent_spec.has_p1:
        lo, hi = bounds.p1
        grids["p1"] = [lo + q * (hi - lo) for q in EXPANSION_QUANTILES]
    if spec.has_gamma and not parent_spec.has_gamma:
        lo, hi = bounds.gamma
        grids["gamma"] = [lo + q * (hi - lo) for q in EXPANSION_QUANTILES]
    seeds = [base]
    for values in itertools.product(*grids.values()):
        seeds.append({**base, **dict(zip(grids, values))})
    return seeds


def fit_family(series: DiscountedSeries, specs=(ModelSpec.M0, ModelSpec.M1, ModelSpec.M2, ModelSpec.M3),
               bounds: SearchBounds | None = None, n_starts: int = DEFAULT_N_STARTS, seed: int = 0,
               workers: int = 1, extra_seeds: dict | None = None) -> dict[ModelSpec, FitResult]:
    """Fit several specs on one window, seeding each with the optima of its nested sub-models.

    Sub-models needed for seeding are fitted even when not requested; only the
    requested specs are returned.
    """
    bounds = bounds or SearchBounds.for_series(series)
    specs = [ModelSpec(s) for s in specs]
    needed = set(specs)
    for spec in specs:
        needed.update(NESTED_PARENTS.get(spec, ()))
    out: dict[ModelSpec, FitResult] = {}
    for spec in sorted(needed, key=lambda s: (s.n_free, s.value)):
        seeds = [x for p in NESTED_PARENTS.get(spec, ())
                 for x in nested_seeds(spec, out[p].params, p, bounds)]
        seeds += list((extra_seeds or {}).get(spec, ()))
        out[spec] = fit(spec, series, bounds, n_starts, seed, seeds, workers)
    return {s: out[s] for s in specs}
