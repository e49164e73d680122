"""Two-directional residual-reshuffling bootstrap for a nested model pair.

Under each null the generating model's fitted curve is multiplied by
``1 + R`` where ``R`` is a permutation of its own fitted residuals, both models
are refitted, and the cost difference ``d = cost_l - cost_h`` is collected.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..calibration import DEFAULT_N_STARTS, FitError, FitResult, fit_family
from ..lppl import ModelSpec, model_price
from ..timeseries import DiscountedSeries
from .wilks import NESTED_PAIRS, NotNested

log = logging.getLogger(__name__)

MAX_REDRAWS = 3
NULL_L, NULL_H = 0, 1


def permute_residuals(residuals, block_len: int, rng: np.random.Generator) -> np.ndarray:
    """Shuffle whole contiguous blocks of ``block_len`` values.

    A trailing partial block stays in place, so the multiset of values is
    always preserved. ``block_len=1`` is a plain day-wise permutation.
    """
    r = np.asarray(residuals, dtype=float)
    if block_len < 1:
        raise ValueError("block_len must be >= 1")
    n_blocks = len(r) // block_len
    head = r[:n_blocks * block_len].reshape(n_blocks, block_len)
    return np.concatenate([head[rng.permutation(n_blocks)].ravel(), r[n_blocks * block_len:]])


@dataclass(frozen=True)
class BootstrapResult:
    spec_l: ModelSpec
    spec_h: ModelSpec
    n_reps: int
    block_len: int
    d_fit: float
    d_samples_l: tuple[float, ...]
    d_samples_h: tuple[float, ...]
    p_l_true: float
    p_h_true: float
    seed: int
    n_starts: int
    n_failed_l: int = 0
    n_failed_h: int = 0
    n_redraws: int = 0

    @property
    def d_samples(self) -> tuple[float, ...]:
        """Cost differences under the smaller-model-true null."""
        return self.d_samples_l

    def as_dict(self) -> dict:
        return {
            "pair": [self.spec_l.value, self.spec_h.value],
            "n_reps": self.n_reps,
            "block_len": self.block_len,
            "d_fit": self.d_fit,
            "p_l_true": self.p_l_true,
            "p_h_true": self.p_h_true,
            "seed": self.seed,
            "n_starts": self.n_starts,
            "n_failed_l": self.n_failed_l,
            "n_failed_h": self.n_failed_h,
            "n_redraws": self.n_redraws,
            "d_samples_l": list(self.d_samples_l),
            "d_samples_h": list(self.d_samples_h),
        }


def _fraction(samples, pred) -> float:
    return float(np.mean([pred(d) for d in samples])) if samples else float("nan")


def _replica(args):
    """One synthetic series and both refits; returns (d, redraws) or (None, redraws)."""
    gen_fit, spec_l, spec_h, series, block_len, seed, null, idx, n_starts = args
    rng = np.random.default_rng(np.random.SeedSequence([seed, null, idx]))
    curve = model_price(gen_fit.spec, gen_fit.params, series.t_index)
    resid = gen_fit.residuals.values
    for attempt in range(MAX_REDRAWS + 1):
        synth = series.with_values(curve * (1.0 + permute_residuals(resid, block_len, rng)))
        seeds = {spec_l: [gen_fit.params], spec_h: [gen_fit.params]}
        try:
            fits = fit_family(synth, (spec_l, spec_h), n_starts=n_starts,
                              seed=int(rng.integers(2 ** 31)), extra_seeds=seeds)
        except (FitError, ValueError) as exc:
            log.debug("replica %d/%d failed (%s); redrawing", null, idx, exc)
            continue
        return fits[spec_l].cost - fits[spec_h].cost, attempt
    return None, MAX_REDRAWS


def bootstrap_compare(spec_l: ModelSpec, spec_h: ModelSpec, series: DiscountedSeries, n_reps: int = 1000,
                      block_len: int = 25, seed: int = 0, n_starts: int = DEFAULT_N_STARTS, workers: int = 1,
                      fits: dict[ModelSpec, FitResult] | None = None) -> BootstrapResult:
    """Bootstrap p-values for the nested pair (``spec_l``, ``spec_h``).

    ``p_l_true`` is the share of replicas generated by ``spec_l`` whose cost
    difference exceeds the observed one; ``p_h_true`` the share of replicas
    generated by ``spec_h`` falling below it. Replicas refit with
    ``n_starts // 4`` taboo starts plus the generating parameters as seeds.
    A replica whose fit fails is redrawn up to three times and then counted in
    ``n_failed_*`` and left out of the fractions.
    """
    spec_l, spec_h = ModelSpec(spec_l), ModelSpec(spec_h)
    if (spec_l, spec_h) not in NESTED_PAIRS:
        raise NotNested(f"{spec_l.value} is not nested in {spec_h.value}")
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    if fits is None:
        fits = fit_family(series, (spec_l, spec_h), n_starts=n_starts, seed=seed)
    d_fit = fits[spec_l].cost - fits[spec_h].cost
    rep_starts = max(1, n_starts // 4)

    samples, failed, redraws = {}, {}, 0
    for null, gen_spec in ((NULL_L, spec_l), (NULL_H, spec_h)):
        tasks = [(fits[gen_spec], spec_l, spec_h, series, block_len, seed, null, i, rep_starts)
                 for i in range(n_reps)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                out = list(pool.map(_replica, tasks, chunksize=max(1, n_reps // (4 * workers))))
        else:
            out = [_replica(t) for t in tasks]
        samples[null] = tuple(float(d) for d, _ in out if d is not None)
        failed[null] = sum(d is None for d, _ in out)
        redraws += sum(r for _, r in out)

    return BootstrapResult(
        spec_l=spec_l, spec_h=spec_h, n_reps=n_reps, block_len=block_len, d_fit=float(d_fit),
        d_samples_l=samples[NULL_L], d_samples_h=samples[NULL_H],
        p_l_true=_fraction(samples[NULL_L], lambda d: d > d_fit),
        p_h_true=_fraction(samples[NULL_H], lambda d: d < d_fit),
        seed=seed, n_starts=n_starts, n_failed_l=failed[NULL_L], n_failed_h=failed[NULL_H],
        n_redraws=redraws)
