"""Closed-form membership-inference quantities for linear regression on
Gaussian data: conditional output variances of the minimum-norm
interpolator and its ridge-regularized variant (via the Marchenko-Pastur
Stieltjes transform), the optimal likelihood-ratio threshold, the
resulting advantage, generalization error, and privacy-utility trade-off
curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import normal_cdf
from .results import AdvantageEstimate, TradeoffPoint
from .rng import RngStream


@dataclass(frozen=True)
class TheoryInputs:
    """Problem sizes plus the two query norms the closed forms depend on.

    ``norm_x0p_sq`` is the squared norm of the first p coordinates of the
    query point; ``norm_x0_sq`` of all D coordinates.
    """

    n: int
    p: int
    D: int
    sigma: float
    norm_x0p_sq: float
    norm_x0_sq: float

    def __post_init__(self):
        if self.norm_x0p_sq < 0 or self.norm_x0_sq < 0:
            raise ValueError("query norms must be nonnegative")
        if self.norm_x0p_sq > self.norm_x0_sq:
            raise ValueError(
                f"prefix norm {self.norm_x0p_sq} exceeds full norm {self.norm_x0_sq}"
            )
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not 1 <= self.p <= self.D:
            raise ValueError(f"need 1 <= p <= D, got p={self.p}, D={self.D}")


@dataclass(frozen=True)
class VariancePair:
    """Conditional output variances for a fixed query point: the m=0
    (non-member) arm and the m=1 (member) arm."""

    sigma0_sq: float
    sigma1_sq: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma0_sq) and math.isfinite(self.sigma1_sq)):
            raise ValueError("variances must be finite")
        if self.sigma0_sq < 0 or self.sigma1_sq < 0:
            raise ValueError("variances must be nonnegative")


@dataclass(frozen=True)
class StieltjesValue:
    """Marchenko-Pastur Stieltjes transform g evaluated at -lambda, with
    its derivative, for aspect ratio gamma = p/n."""

    g: float
    g_prime: float
    gamma: float
    lam: float

    def scaled_residual(self) -> float:
        """Residual of the defining quadratic, scaled by its term sizes.

        g satisfies gamma*lam*g^2 + (1-gamma+lam)*g - 1 = 0; the raw
        residual is normalized by the magnitude of the three terms so the
        check stays meaningful when g is large (small lam).
        """
        b = 1.0 - self.gamma + self.lam
        t = self.gamma * self.lam * self.g * self.g
        resid = t + b * self.g - 1.0
        scale = t + abs(b) * self.g + 1.0
        return abs(resid) / scale


def concentration_inputs(n: int, p: int, D: int, sigma: float) -> TheoryInputs:
    """Inputs with the query norms replaced by their expectations p and D."""
    return TheoryInputs(n=n, p=p, D=D, sigma=sigma, norm_x0p_sq=float(p), norm_x0_sq=float(D))


def nonmember_variance(inp: TheoryInputs) -> float:
    """Asymptotic variance of the model output when the query point is not
    in the training set (minimum-norm interpolation, p > n+1)."""
    n, p, D = inp.n, inp.p, inp.D
    if p <= n + 1:
        raise ValueError(f"non-member variance has a pole at p = n+1; got p={p}, n={n}")
    return (n / p) * (1.0 / D + (1.0 + inp.sigma**2 - p / D) / (p - n - 1)) * inp.norm_x0p_sq


def member_variance(inp: TheoryInputs) -> float:
    """Variance of the model output when the query point was memorized:
    sigma^2 + ||x0||^2 / D, independent of p."""
    return inp.sigma**2 + inp.norm_x0_sq / inp.D


def lrt_threshold(sigma0_sq: float, sigma1_sq: float) -> float:
    """Point where two zero-mean Gaussian densities with these variances
    are equal; the optimal test thresholds the squared output against it.
    Symmetric in its arguments."""
    _check_variances(sigma0_sq, sigma1_sq)
    if sigma0_sq == sigma1_sq:
        raise ValueError("equal variances: threshold undefined (advantage is 0)")
    lo, hi = sorted((sigma0_sq, sigma1_sq))
    delta = (hi - lo) / lo
    # alpha^2 = lo*hi*log(hi/lo)/(hi-lo) = hi*log1p(delta)/delta, stable as hi -> lo
    return math.sqrt(hi * math.log1p(delta) / delta)


def advantage_point(sigma0_sq: float, sigma1_sq: float) -> float:
    """Membership advantage of the optimal test between two zero-mean
    Gaussians: 2*(Phi(alpha/s_small) - Phi(alpha/s_large)). Returns 0 for
    equal variances; symmetric in its arguments."""
    _check_variances(sigma0_sq, sigma1_sq)
    if sigma0_sq == sigma1_sq:
        return 0.0
    lo, hi = sorted((sigma0_sq, sigma1_sq))
    alpha = lrt_threshold(lo, hi)
    adv = 2.0 * (normal_cdf(alpha / math.sqrt(lo)) - normal_cdf(alpha / math.sqrt(hi)))
    return min(max(adv, 0.0), 1.0)


def _check_variances(sigma0_sq: float, sigma1_sq: float) -> None:
    for v in (sigma0_sq, sigma1_sq):
        if not math.isfinite(v) or v <= 0:
            raise ValueError(f"variances must be positive and finite, got {v}")


def min_norm_advantage_limit(gamma: float, sigma: float) -> float:
    """Advantage in the strict n, p, D -> infinity limit with p/n -> gamma
    and p/D -> 0: variances (1+sigma^2)/(gamma-1) vs 1+sigma^2. Exactly 0
    at gamma = 2."""
    if gamma <= 1:
        raise ValueError(f"limit advantage requires gamma > 1, got {gamma}")
    s1 = 1.0 + sigma**2
    s0 = s1 / (gamma - 1.0)
    return advantage_point(s0, s1)


def query_norm_table(
    stream: RngStream, p_grid: Sequence[int], D: int, count: int
) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Coupled (||x0_p||^2, ||x0||^2) samples for ``count`` iid N(0, I_D)
    queries, shared across every p in the grid.

    Only the two norms enter the closed forms, so they are drawn directly
    as chi-square variates; prefix increments between consecutive p values
    are independent chi-squares, which reproduces the joint law of the
    norms of a single query vector evaluated at each p.
    """
    ps = sorted(set(int(p) for p in p_grid))
    if not ps or ps[0] < 1 or ps[-1] > D:
        raise ValueError(f"p grid must lie in [1, D={D}], got {p_grid}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    q = np.zeros(count)
    prev = 0
    prefix = {}
    for p in ps:
        q = q + stream.chisquare(p - prev, count) if p > prev else q
        prefix[p] = q
        prev = p
    total = q + (stream.chisquare(D - prev, count) if D > prev else 0.0)
    return {p: (prefix[p], total) for p in ps}


def min_norm_advantage(
    n: int, p: int, D: int, sigma: float, num_x0: int, stream: RngStream
) -> AdvantageEstimate:
    """Advantage averaged over ``num_x0`` sampled query points."""
    table = query_norm_table(stream, [p], D, num_x0)
    qs, rs = table[p]
    vals = [
        advantage_point(
            nonmember_variance(TheoryInputs(n, p, D, sigma, q, r)),
            member_variance(TheoryInputs(n, p, D, sigma, q, r)),
        )
        for q, r in zip(qs, rs)
    ]
    return AdvantageEstimate.from_values(vals)


def min_norm_advantage_concentration(n: int, p: int, D: int, sigma: float) -> float:
    """Deterministic fast path: query norms replaced by their expectations."""
    inp = concentration_inputs(n, p, D, sigma)
    return advantage_point(nonmember_variance(inp), member_variance(inp))


def min_norm_advantage_curve(
    n: int,
    D: int,
    sigma: float,
    p_grid: Sequence[int],
    num_x0: int = 0,
    stream: RngStream | None = None,
) -> list[AdvantageEstimate]:
    """Advantage at each p in the grid.

    With num_x0 = 0, the concentration fast path; otherwise a Monte Carlo
    average over num_x0 queries whose norms are coupled across the grid
    (the same queries evaluated at every p).
    """
    ps = [int(p) for p in p_grid]
    if num_x0 == 0:
        return [
            AdvantageEstimate.from_values([min_norm_advantage_concentration(n, p, D, sigma)])
            for p in ps
        ]
    table = query_norm_table(stream, ps, D, num_x0)
    out = []
    for p in ps:
        qs, rs = table[p]
        vals = [
            advantage_point(
                nonmember_variance(TheoryInputs(n, p, D, sigma, q, r)),
                member_variance(TheoryInputs(n, p, D, sigma, q, r)),
            )
            for q, r in zip(qs, rs)
        ]
        out.append(AdvantageEstimate.from_values(vals))
    return out


def ridge_advantage_curve(
    n: int,
    D: int,
    sigma: float,
    p_grid: Sequence[int],
    lam: float,
    num_x0: int = 0,
    stream: RngStream | None = None,
) -> list[AdvantageEstimate]:
    """Ridge advantage at each p in the grid; sampling as in
    min_norm_advantage_curve."""
    ps = [int(p) for p in p_grid]
    if num_x0 == 0:
        return [
            AdvantageEstimate.from_values([ridge_advantage_concentration(n, p, D, sigma, lam)])
            for p in ps
        ]
    table = query_norm_table(stream, ps, D, num_x0)
    out = []
    for p in ps:
        qs, rs = table[p]
        vals = []
        for q, r in zip(qs, rs):
            vp = ridge_variances(n, p, D, sigma, lam, q, r)
            vals.append(advantage_point(vp.sigma0_sq, vp.sigma1_sq))
        out.append(AdvantageEstimate.from_values(vals))
    return out


def mp_stieltjes(gamma: float, lam: float) -> StieltjesValue:
    """g(-lambda) for the Marchenko-Pastur law with ratio gamma, plus its
    derivative g'(-lambda) from implicit differentiation of the defining
    quadratic. Requires gamma > 0 and lambda > 0."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if lam <= 0:
        raise ValueError(f"lambda must be > 0, got {lam}; use the min-norm forms at 0")
    b = 1.0 - gamma + lam
    s = math.sqrt(b * b + 4.0 * gamma * lam)
    # two algebraically equal root forms; pick the one without cancellation
    g = 2.0 / (b + s) if b >= 0 else (s - b) / (2.0 * gamma * lam)
    g_prime = (g + gamma * g * g) / (b + 2.0 * gamma * lam * g)
    return StieltjesValue(g=g, g_prime=g_prime, gamma=gamma, lam=lam)


def ridge_variances(
    n: int,
    p: int,
    D: int,
    sigma: float,
    lam: float,
    norm_x0p_sq: float,
    norm_x0_sq: float,
) -> VariancePair:
    """Asymptotic conditional output variances of the ridge estimator with
    penalty n*lambda, for a query with the given prefix/full norms."""
    inp = TheoryInputs(n, p, D, sigma, norm_x0p_sq, norm_x0_sq)
    if lam <= 0:
        raise ValueError(f"ridge variances need lambda > 0, got {lam}")
    gamma = p / n
    st = mp_stieltjes(gamma, lam)
    g, gp = st.g, st.g_prime
    noise = sigma**2 + 1.0 - p / D
    q = norm_x0p_sq / p
    tail_sq = norm_x0_sq - norm_x0p_sq

    # the bracketed factors are limits of squared norms; heavy penalties
    # drive them to 0 like 1/lambda^2 and rounding can cross below it
    shrink = max(1.0 - 2.0 * lam * g + lam * lam * gp, 0.0)
    s0 = gp * gamma / (1.0 + g * gamma) ** 2 * noise * q
    s0 += shrink * norm_x0p_sq / D

    t1 = (lam * lam / ((lam + gamma * g) * (lam + gamma * q * g))) ** 2 * gamma * gp * q * noise
    t2 = (gamma * g * q / (1.0 + gamma * g * q)) ** 2 * (sigma**2 + tail_sq / D)
    denom = 1.0 + gamma * q * g
    shrink1 = max(1.0 - 2.0 * lam * g / denom + lam * lam * gp / denom**2, 0.0)
    t3 = shrink1 * norm_x0p_sq / D
    return VariancePair(sigma0_sq=s0, sigma1_sq=t1 + t2 + t3)


def ridge_advantage(
    n: int, p: int, D: int, sigma: float, lam: float, num_x0: int, stream: RngStream
) -> AdvantageEstimate:
    """Ridge advantage averaged over ``num_x0`` sampled query points."""
    table = query_norm_table(stream, [p], D, num_x0)
    qs, rs = table[p]
    vals = []
    for q, r in zip(qs, rs):
        vp = ridge_variances(n, p, D, sigma, lam, q, r)
        vals.append(advantage_point(vp.sigma0_sq, vp.sigma1_sq))
    return AdvantageEstimate.from_values(vals)


def ridge_advantage_concentration(n: int, p: int, D: int, sigma: float, lam: float) -> float:
    """Ridge advantage with query norms at their expectations."""
    vp = ridge_variances(n, p, D, sigma, lam, float(p), float(D))
    return advantage_point(vp.sigma0_sq, vp.sigma1_sq)


def generalization_error(n: int, p: int, D: int, sigma: float) -> float:
    """Expected squared prediction error of the minimum-norm interpolator
    on a fresh Gaussian query (p > n+1)."""
    if p <= n + 1:
        raise ValueError(f"generalization error has a pole at p = n+1; got p={p}, n={n}")
    if not 1 <= p <= D:
        raise ValueError(f"need 1 <= p <= D, got p={p}, D={D}")
    return 1.0 + sigma**2 + n * ((1.0 + sigma**2 - p / D) / (p - n - 1) - 1.0 / D)


def feature_reduction_curve(
    n: int,
    D: int,
    sigma: float,
    p_grid: Sequence[int],
    num_x0: int = 0,
    stream: RngStream | None = None,
) -> list[TradeoffPoint]:
    """Privacy-utility trade-off traced by shrinking the parameter count.

    With num_x0 = 0 the advantage uses the concentration fast path;
    otherwise it is averaged over num_x0 sampled queries (shared across
    the grid).
    """
    ps = [int(p) for p in p_grid]
    for p in ps:
        if not n + 1 < p <= D:
            raise ValueError(f"every p must satisfy n+1 < p <= D, got p={p}")
    table = query_norm_table(stream, ps, D, num_x0) if num_x0 > 0 else None
    out = []
    for p in ps:
        gen = generalization_error(n, p, D, sigma)
        if table is None:
            adv = min_norm_advantage_concentration(n, p, D, sigma)
        else:
            qs, rs = table[p]
            adv = float(
                np.mean(
                    [
                        advantage_point(
                            nonmember_variance(TheoryInputs(n, p, D, sigma, q, r)),
                            member_variance(TheoryInputs(n, p, D, sigma, q, r)),
                        )
                        for q, r in zip(qs, rs)
                    ]
                )
            )
        out.append(TradeoffPoint(gen_error=gen, advantage=adv, knob=float(p)))
    return out


def noise_addition_curve(
    n: int,
    D: int,
    sigma: float,
    noise_var_grid: Sequence[float],
    num_x0: int = 0,
    stream: RngStream | None = None,
) -> list[TradeoffPoint]:
    """Privacy-utility trade-off traced by adding variance-``v`` Gaussian
    noise to non-member outputs of the full-feature (p = D) model.

    Each grid value is the added noise variance; it inflates the m=0 arm
    variance and adds directly to the generalization error.
    """
    if not D > n + 1:
        raise ValueError(f"need D > n+1, got D={D}, n={n}")
    base_gen = generalization_error(n, D, D, sigma)
    if num_x0 > 0:
        qs, rs = query_norm_table(stream, [D], D, num_x0)[D]
    out = []
    for v in noise_var_grid:
        v = float(v)
        if v < 0:
            raise ValueError(f"added noise variance must be >= 0, got {v}")
        if num_x0 > 0:
            vals = []
            for q, r in zip(qs, rs):
                inp = TheoryInputs(n, D, D, sigma, q, r)
                vals.append(advantage_point(nonmember_variance(inp) + v, member_variance(inp)))
            adv = float(np.mean(vals))
        else:
            inp = concentration_inputs(n, D, D, sigma)
            adv = advantage_point(nonmember_variance(inp) + v, member_variance(inp))
        out.append(TradeoffPoint(gen_error=base_gen + v, advantage=adv, knob=v))
    return out
