"""The four generative processes: Gaussian-data linear regression, the
latent-space covariate model, noise-free cosine time-series regression,
and random ReLU features.

Each model produces one scalar prediction for a fixed query point per
trial, conditioned on the membership bit: for m=1 the first training row
is replaced by the query point and its label by the query label before
fitting (row exchangeability makes the replaced index irrelevant).

``sample_trial`` is the literal reference protocol (explicit matrices,
one fit per call); ``sample_trials`` is the vectorized sampler used by
the experiment runner, which draws the same joint distribution in chunks
and replaces the never-observed trailing-coordinate products by their
exact conditional laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import linalg
from .config import ExperimentConfig
from .rng import RngStream

# target elements per vectorized chunk (about 50 MB of float64)
_CHUNK_ELEMS = 6_000_000


@dataclass(frozen=True)
class TrialOutput:
    """One model output together with the membership bit it was drawn under."""

    y_hat: float
    m: int

    def __post_init__(self):
        if not math.isfinite(self.y_hat):
            raise ValueError(f"trial output must be finite, got {self.y_hat}")
        if self.m not in (0, 1):
            raise ValueError(f"membership bit must be 0 or 1, got {self.m}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class GaussianLinearContext:
    kind = "gaussian_linear"
    n: int
    D: int
    sigma: float
    x0: np.ndarray

    @property
    def p_max(self) -> int:
        return self.D

    def query_vector(self, p: int) -> np.ndarray:
        _check_p(p, self.p_max)
        return self.x0[:p]


@dataclass(frozen=True)
class LatentSpaceContext:
    kind = "latent_space"
    n: int
    d: int
    sigma: float
    w: np.ndarray  # (p_max, d) fixed covariate directions
    z0: np.ndarray  # (d,) latent features of the query point
    u0: np.ndarray  # (p_max,) covariate noise of the query point
    x0: np.ndarray  # (p_max,) observed query covariates w @ z0 + u0

    @property
    def p_max(self) -> int:
        return self.w.shape[0]

    def query_vector(self, p: int) -> np.ndarray:
        _check_p(p, self.p_max)
        return self.x0[:p]


@dataclass(frozen=True)
class TimeSeriesContext:
    kind = "time_series"
    n: int
    D: int
    w: np.ndarray  # (D, D) cosine design
    t0: int  # queried time index (0-based row of w)
    x0: np.ndarray  # row t0 of w

    @property
    def p_max(self) -> int:
        return self.D

    def query_vector(self, p: int) -> np.ndarray:
        _check_p(p, self.p_max)
        return self.x0[:p]


@dataclass(frozen=True)
class ReluFeaturesContext:
    kind = "relu_features"
    n: int
    D: int
    sigma: float
    raw_directions: np.ndarray  # (D, p_max) Gaussian; rows normalized per p
    z0: np.ndarray  # (D,) latent query point

    @property
    def p_max(self) -> int:
        return self.raw_directions.shape[1]

    def direction_matrix(self, p: int) -> np.ndarray:
        """Rows iid uniform on the unit sphere in R^p, coupled across p.

        Truncating a Gaussian row to its first p coordinates and
        renormalizing is an exact sphere sample, so every p shares the
        same underlying randomness.
        """
        _check_p(p, self.p_max)
        block = self.raw_directions[:, :p]
        norms = np.linalg.norm(block, axis=1, keepdims=True)
        return block / norms

    def query_vector(self, p: int) -> np.ndarray:
        return np.maximum(self.direction_matrix(p).T @ self.z0, 0.0)


QueryContext = Union[
    GaussianLinearContext, LatentSpaceContext, TimeSeriesContext, ReluFeaturesContext
]


def _check_p(p: int, p_max: int) -> None:
    if not 1 <= p <= p_max:
        raise ValueError(f"p must be in [1, {p_max}], got {p}")


def make_context(config: ExperimentConfig, stream: RngStream) -> QueryContext:
    """Draw the per-repeat fixed quantities for the configured model."""
    n, D, sigma = config.n, config.D, config.sigma
    p_max = max(config.p_grid)
    if config.model_kind == "gaussian_linear":
        return GaussianLinearContext(n=n, D=D, sigma=sigma, x0=_frozen(stream.standard_normal(D)))
    if config.model_kind == "latent_space":
        d = config.d
        w = stream.standard_normal((p_max, d))
        z0 = stream.standard_normal(d)
        u0 = stream.standard_normal(p_max)
        return LatentSpaceContext(
            n=n, d=d, sigma=sigma,
            w=_frozen(w), z0=_frozen(z0), u0=_frozen(u0), x0=_frozen(w @ z0 + u0),
        )
    if config.model_kind == "time_series":
        if n >= D:
            raise ValueError(
                f"time_series draws n training indices without replacement from the "
                f"{D - 1} non-query indices; need n < D, got n={n}, D={D}"
            )
        w = linalg.dct_design_matrix(D)
        t0 = int(stream.integers(0, D))
        return TimeSeriesContext(n=n, D=D, w=_frozen(w), t0=t0, x0=_frozen(w[t0].copy()))
    if config.model_kind == "relu_features":
        raw = stream.standard_normal((D, p_max))
        z0 = stream.standard_normal(D)
        return ReluFeaturesContext(n=n, D=D, sigma=sigma, raw_directions=_frozen(raw), z0=_frozen(z0))
    raise ValueError(f"unknown model kind {config.model_kind!r}")


def label_for_query(ctx: QueryContext, beta: np.ndarray, stream: RngStream) -> float:
    """Label of the query point under the model's rule for coefficients beta.

    Gaussian-linear: x0 . beta plus label noise; time-series: the exact
    signal value at the queried index (noise-free); latent-space and ReLU:
    the latent point z0 . beta plus label noise.
    """
    if isinstance(ctx, GaussianLinearContext):
        y0 = float(ctx.x0 @ beta)
        return y0 + ctx.sigma * float(stream.standard_normal()) if ctx.sigma > 0 else y0
    if isinstance(ctx, TimeSeriesContext):
        return float(ctx.x0 @ beta)
    if isinstance(ctx, LatentSpaceContext):
        y0 = float(ctx.z0 @ beta)
        return y0 + ctx.sigma * float(stream.standard_normal()) if ctx.sigma > 0 else y0
    if isinstance(ctx, ReluFeaturesContext):
        y0 = float(ctx.z0 @ beta)
        return y0 + ctx.sigma * float(stream.standard_normal()) if ctx.sigma > 0 else y0
    raise TypeError(f"unknown context type {type(ctx)!r}")


def sample_trial(
    ctx: QueryContext, p: int, m: int, ridge_lambda: float, stream: RngStream
) -> TrialOutput:
    """Run one trial with explicit design matrices and a single fit.

    This is the reference protocol; the vectorized ``sample_trials`` is
    cross-checked against it statistically.
    """
    if m not in (0, 1):
        raise ValueError(f"membership bit must be 0 or 1, got {m}")
    if ridge_lambda < 0:
        raise ValueError(f"ridge lambda must be >= 0, got {ridge_lambda}")
    Xp, y, beta = _draw_dataset(ctx, p, stream)
    if m == 1:
        y0 = label_for_query(ctx, beta, stream)
        Xp[0] = ctx.query_vector(p)
        y[0] = y0
    if ridge_lambda > 0:
        beta_hat = linalg.ridge_solve(Xp, y, ctx.n * ridge_lambda)
    else:
        beta_hat = linalg.min_norm_lstsq(Xp, y).beta_hat
    return TrialOutput(y_hat=float(ctx.query_vector(p) @ beta_hat), m=m)


def _draw_dataset(ctx: QueryContext, p: int, stream: RngStream):
    """Fresh (design submatrix, labels, coefficients) for one trial."""
    _check_p(p, ctx.p_max)
    n = ctx.n
    if isinstance(ctx, GaussianLinearContext):
        X = stream.standard_normal((n, ctx.D))
        beta = stream.standard_normal(ctx.D) / math.sqrt(ctx.D)
        y = X @ beta
        if ctx.sigma > 0:
            y = y + ctx.sigma * stream.standard_normal(n)
        return X[:, :p].copy(), y, beta
    if isinstance(ctx, LatentSpaceContext):
        z = stream.standard_normal((n, ctx.d))
        u = stream.standard_normal((n, p))
        beta = stream.standard_normal(ctx.d) / math.sqrt(ctx.d)
        X = z @ ctx.w[:p].T + u
        y = z @ beta
        if ctx.sigma > 0:
            y = y + ctx.sigma * stream.standard_normal(n)
        return X, y, beta
    if isinstance(ctx, TimeSeriesContext):
        beta = stream.standard_normal(ctx.D) / math.sqrt(ctx.D)
        allowed = np.delete(np.arange(ctx.D), ctx.t0)
        idx = stream.choice(allowed, size=n, replace=False)
        X = ctx.w[idx]
        y = X @ beta
        return X[:, :p].copy(), y, beta
    if isinstance(ctx, ReluFeaturesContext):
        V = ctx.direction_matrix(p)
        Z = stream.standard_normal((n, ctx.D))
        beta = stream.standard_normal(ctx.D) / math.sqrt(ctx.D)
        y = Z @ beta
        if ctx.sigma > 0:
            y = y + ctx.sigma * stream.standard_normal(n)
        return np.maximum(Z @ V, 0.0), y, beta
    raise TypeError(f"unknown context type {type(ctx)!r}")


def sample_trials(
    ctx: QueryContext, p: int, m: int, ridge_lambda: float, count: int, stream: RngStream
) -> np.ndarray:
    """Vectorized trial outputs: ``count`` draws of the model output for
    the given membership arm, identical in distribution to repeated
    ``sample_trial`` calls."""
    if m not in (0, 1):
        raise ValueError(f"membership bit must be 0 or 1, got {m}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if ridge_lambda < 0:
        raise ValueError(f"ridge lambda must be >= 0, got {ridge_lambda}")
    _check_p(p, ctx.p_max)
    n_lambda = ctx.n * ridge_lambda
    if isinstance(ctx, GaussianLinearContext):
        return _gaussian_trials(ctx, p, m, n_lambda, count, stream)
    if isinstance(ctx, LatentSpaceContext):
        return _latent_trials(ctx, p, m, n_lambda, count, stream)
    if isinstance(ctx, TimeSeriesContext):
        return _time_series_trials(ctx, p, m, n_lambda, count, stream)
    if isinstance(ctx, ReluFeaturesContext):
        return _relu_trials(ctx, p, m, n_lambda, count, stream)
    raise TypeError(f"unknown context type {type(ctx)!r}")


def _chunk_size(width: int, count: int) -> int:
    return max(16, min(count, _CHUNK_ELEMS // max(width, 1)))


def _batch_outputs(Xp: np.ndarray, y: np.ndarray, x0p: np.ndarray, n_lambda: float) -> np.ndarray:
    """Predictions x0p . beta_hat for a batch of systems.

    Overparameterized systems go through the Gram dual form, square or
    underparameterized ones through the normal equations; a singular
    batch falls back to per-trial solves (SVD pseudoinverse as a last
    resort). With n_lambda = 0 the dual form is the minimum-norm
    interpolator, otherwise the exact ridge solution.
    """
    B, n, p = Xp.shape
    try:
        if p >= n:
            G = Xp @ Xp.transpose(0, 2, 1)
            if n_lambda > 0:
                G[:, np.arange(n), np.arange(n)] += n_lambda
            w = np.linalg.solve(G, y[..., None])[..., 0]
            v = Xp @ x0p
            return np.einsum("bn,bn->b", v, w)
        G = Xp.transpose(0, 2, 1) @ Xp
        if n_lambda > 0:
            G[:, np.arange(p), np.arange(p)] += n_lambda
        rhs = np.einsum("bnp,bn->bp", Xp, y)
        beta = np.linalg.solve(G, rhs[..., None])[..., 0]
        return beta @ x0p
    except np.linalg.LinAlgError:
        return np.array([_single_output(Xp[i], y[i], x0p, n_lambda) for i in range(B)])


def _single_output(X: np.ndarray, y: np.ndarray, x0p: np.ndarray, n_lambda: float) -> float:
    if n_lambda > 0:
        return float(x0p @ linalg.ridge_solve(X, y, n_lambda))
    return float(x0p @ linalg.min_norm_lstsq(X, y).beta_hat)


def _gaussian_trials(ctx, p, m, n_lambda, count, stream):
    n, D, sig = ctx.n, ctx.D, ctx.sigma
    x0p = ctx.x0[:p]
    tail_norm = float(np.linalg.norm(ctx.x0[p:]))
    sqrt_d = math.sqrt(D)
    out = np.empty(count)
    chunk = _chunk_size(n * p, count)
    filled = 0
    while filled < count:
        b = min(chunk, count - filled)
        beta_p = stream.standard_normal((b, p)) / sqrt_d
        if p < D:
            # the trailing D-p coefficients are never used directly: only
            # their component along the query tail (a) and the residual
            # norm enter the trial, so draw those exactly
            a = stream.standard_normal(b) / sqrt_d
            resid_sq = stream.chisquare(D - p - 1, b) / D if D - p - 1 > 0 else 0.0
            beta_tail_norm = np.sqrt(a * a + resid_sq)
        else:
            a = np.zeros(b)
            beta_tail_norm = np.zeros(b)
        Xp = stream.standard_normal((b, n, p))
        y = np.einsum("bnp,bp->bn", Xp, beta_p)
        if p < D:
            # rows' trailing-coordinate label contributions are iid
            # N(0, ||beta_tail||^2) given the coefficients
            y += beta_tail_norm[:, None] * stream.standard_normal((b, n))
        if sig > 0:
            y += sig * stream.standard_normal((b, n))
        if m == 1:
            y0 = beta_p @ x0p + tail_norm * a
            if sig > 0:
                y0 = y0 + sig * stream.standard_normal(b)
            Xp[:, 0, :] = x0p
            y[:, 0] = y0
        out[filled : filled + b] = _batch_outputs(Xp, y, x0p, n_lambda)
        filled += b
    return out


def _latent_trials(ctx, p, m, n_lambda, count, stream):
    n, d, sig = ctx.n, ctx.d, ctx.sigma
    x0p = ctx.x0[:p]
    wp_t = ctx.w[:p].T  # (d, p)
    sqrt_d = math.sqrt(d)
    out = np.empty(count)
    chunk = _chunk_size(n * p, count)
    filled = 0
    while filled < count:
        b = min(chunk, count - filled)
        z = stream.standard_normal((b, n, d))
        u = stream.standard_normal((b, n, p))
        beta = stream.standard_normal((b, d)) / sqrt_d
        X = z @ wp_t + u
        y = np.einsum("bnd,bd->bn", z, beta)
        if sig > 0:
            y += sig * stream.standard_normal((b, n))
        if m == 1:
            y0 = beta @ ctx.z0
            if sig > 0:
                y0 = y0 + sig * stream.standard_normal(b)
            X[:, 0, :] = x0p
            y[:, 0] = y0
        out[filled : filled + b] = _batch_outputs(X, y, x0p, n_lambda)
        filled += b
    return out


def _time_series_trials(ctx, p, m, n_lambda, count, stream):
    n, D = ctx.n, ctx.D
    x0p = ctx.x0[:p]
    wp = ctx.w[:, :p]
    allowed = np.delete(np.arange(D), ctx.t0)
    sqrt_d = math.sqrt(D)
    out = np.empty(count)
    chunk = _chunk_size(n * p + 2 * D, count)
    filled = 0
    while filled < count:
        b = min(chunk, count - filled)
        beta = stream.standard_normal((b, D)) / sqrt_d
        signal = beta @ ctx.w.T  # (b, D): full noise-free series per trial
        # uniform n-subset of the allowed indices via random sort keys
        keys = stream.random((b, D - 1))
        order = np.argpartition(keys, n - 1, axis=1)[:, :n]
        idx = allowed[order]
        if m == 1:
            idx[:, 0] = ctx.t0
        Xp = wp[idx]
        y = np.take_along_axis(signal, idx, axis=1)
        out[filled : filled + b] = _batch_outputs(Xp, y, x0p, n_lambda)
        filled += b
    return out


def _relu_trials(ctx, p, m, n_lambda, count, stream):
    n, D, sig = ctx.n, ctx.D, ctx.sigma
    V = ctx.direction_matrix(p)
    x0p = ctx.query_vector(p)
    sqrt_d = math.sqrt(D)
    out = np.empty(count)
    chunk = _chunk_size(n * D + n * p, count)
    filled = 0
    while filled < count:
        b = min(chunk, count - filled)
        Z = stream.standard_normal((b, n, D))
        beta = stream.standard_normal((b, D)) / sqrt_d
        X = np.maximum(Z.reshape(b * n, D) @ V, 0.0).reshape(b, n, p)
        y = np.einsum("bnd,bd->bn", Z, beta)
        if sig > 0:
            y += sig * stream.standard_normal((b, n))
        if m == 1:
            y0 = beta @ ctx.z0
            if sig > 0:
                y0 = y0 + sig * stream.standard_normal(b)
            X[:, 0, :] = x0p
            y[:, 0] = y0
        out[filled : filled + b] = _batch_outputs(X, y, x0p, n_lambda)
        filled += b
    return out
