"""Experiment orchestration: per-repeat context creation, parallel
execution of the (repeat, grid-point) cells, histogram estimation, and
aggregation into advantage curves with closed-form overlays."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from . import estimator, models, theory
from .config import ConfigError, ExperimentConfig
from .results import AdvantageEstimate, CurveResult, VarianceCheckRow
from .rng import derive_stream

# stream path tags; trial streams are keyed by (repeat, grid index, arm)
# so results are independent of worker count and schedule
_PATH_CONTEXT = 0
_PATH_TRIALS = 1


@dataclass(frozen=True)
class _CellResult:
    repeat: int
    p_idx: int
    advantage: float
    var0: float
    var1: float
    theory_adv: float  # nan when no closed form applies
    theory_var0: float
    theory_var1: float


def _cell_theory(cfg: ExperimentConfig, ctx, p: int) -> tuple[float, float, float]:
    """Closed-form advantage and variances at the repeat's realized query
    point; only the Gaussian-data linear model has them."""
    if not isinstance(ctx, models.GaussianLinearContext):
        return math.nan, math.nan, math.nan
    q = float(np.sum(ctx.x0[:p] ** 2))
    r = q + float(np.sum(ctx.x0[p:] ** 2))
    if cfg.ridge_lambda > 0:
        vp = theory.ridge_variances(cfg.n, p, cfg.D, cfg.sigma, cfg.ridge_lambda, q, r)
        s0, s1 = vp.sigma0_sq, vp.sigma1_sq
    else:
        if p <= cfg.n + 1:
            return math.nan, math.nan, math.nan
        inp = theory.TheoryInputs(cfg.n, p, cfg.D, cfg.sigma, q, r)
        s0 = theory.nonmember_variance(inp)
        s1 = theory.member_variance(inp)
    return theory.advantage_point(s0, s1), s0, s1


def _run_cell(cfg: ExperimentConfig, repeat: int, p_idx: int) -> _CellResult:
    # one BLAS thread keeps results bit-identical across worker counts
    with threadpool_limits(limits=1):
        ctx = models.make_context(cfg, derive_stream(cfg.seed, (_PATH_CONTEXT, repeat)))
        p = cfg.p_grid[p_idx]
        arms = []
        for m in (0, 1):
            stream = derive_stream(cfg.seed, (_PATH_TRIALS, repeat, p_idx, m))
            arms.append(
                models.sample_trials(ctx, p, m, cfg.ridge_lambda, cfg.trials_per_arm, stream)
            )
        pair = estimator.build_histogram_pair(arms[0], arms[1], cfg.bins)
        adv = estimator.histogram_advantage(pair)
        var0 = float(np.var(arms[0], ddof=1)) if cfg.trials_per_arm > 1 else 0.0
        var1 = float(np.var(arms[1], ddof=1)) if cfg.trials_per_arm > 1 else 0.0
        theory_adv, th0, th1 = _cell_theory(cfg, ctx, p)
        return _CellResult(repeat, p_idx, adv, var0, var1, theory_adv, th0, th1)


def _run_cells(cfg: ExperimentConfig, workers: int | None) -> list[_CellResult]:
    tasks = [(r, pi) for r in range(cfg.repeats) for pi in range(len(cfg.p_grid))]
    if workers is None:
        workers = os.cpu_count() or 1
    workers = max(1, min(int(workers), len(tasks)))
    if workers == 1:
        return [_run_cell(cfg, r, pi) for r, pi in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_cell, cfg, r, pi) for r, pi in tasks]
        return [f.result() for f in futures]


def run_curve(cfg: ExperimentConfig, workers: int | None = None) -> CurveResult:
    """Estimate the advantage curve over the configured parameter grid.

    Each repeat draws a fresh query context; each grid point collects
    ``trials_per_arm`` outputs per membership arm, estimates the advantage
    from the histogram pair, and the per-point mean and standard error are
    taken over repeats. Deterministic given the seed, for any worker count.
    """
    start = time.perf_counter()
    cells = _run_cells(cfg, workers)
    by_key = {(c.repeat, c.p_idx): c for c in cells}
    empirical = []
    overlay = []
    for pi in range(len(cfg.p_grid)):
        advs = [by_key[(r, pi)].advantage for r in range(cfg.repeats)]
        empirical.append(AdvantageEstimate.from_values(advs))
        theory_advs = [by_key[(r, pi)].theory_adv for r in range(cfg.repeats)]
        overlay.append(float(np.mean(theory_advs)))
    has_overlay = cfg.model_kind == "gaussian_linear" and not any(
        math.isnan(v) for v in overlay
    )
    return CurveResult(
        grid=cfg.p_grid,
        gammas=cfg.gammas,
        empirical=tuple(empirical),
        theory_overlay=tuple(overlay) if has_overlay else None,
        wall_time=time.perf_counter() - start,
        ridge_lambda=cfg.ridge_lambda,
    )


def run_ridge_curve(
    cfg: ExperimentConfig, lambda_grid: Sequence[float], workers: int | None = None
) -> list[CurveResult]:
    """One advantage curve per ridge penalty.

    Trial streams depend only on (seed, repeat, grid index, arm), so the
    same randomness is reused across penalties and curve differences
    reflect the penalty alone.
    """
    lams = [float(v) for v in lambda_grid]
    if not lams or any(v <= 0 for v in lams):
        raise ConfigError(f"ridge lambda grid must be positive, got {lambda_grid}")
    return [run_curve(cfg.replace(ridge_lambda=lam), workers) for lam in lams]


def run_variance_check(
    cfg: ExperimentConfig, workers: int | None = None
) -> list[VarianceCheckRow]:
    """Sample variance of each conditional arm against its closed form,
    per grid point (Gaussian-data linear model only)."""
    if cfg.model_kind != "gaussian_linear":
        raise ConfigError("variance check applies to the gaussian_linear model only")
    cells = _run_cells(cfg, workers)
    by_key = {(c.repeat, c.p_idx): c for c in cells}
    rows = []
    for pi, p in enumerate(cfg.p_grid):
        per = [by_key[(r, pi)] for r in range(cfg.repeats)]
        gamma = p / cfg.n
        rows.append(
            VarianceCheckRow(
                gamma=gamma,
                arm=0,
                var_emp=float(np.mean([c.var0 for c in per])),
                var_theory=float(np.mean([c.theory_var0 for c in per])),
            )
        )
        rows.append(
            VarianceCheckRow(
                gamma=gamma,
                arm=1,
                var_emp=float(np.mean([c.var1 for c in per])),
                var_theory=float(np.mean([c.theory_var1 for c in per])),
            )
        )
    return rows
