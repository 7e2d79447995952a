"""Histogram-based posterior estimation and the explicit optimal
adversaries (squared-output threshold test and histogram rule)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import theory

# Below this many samples per arm the histogram advantage is noticeably
# biased toward 0; emit a warning rather than refuse.
SAMPLE_FLOOR = 10_000


class UndersampledHistogramWarning(UserWarning):
    """Histogram built from fewer samples than the calibrated floor."""


@dataclass(frozen=True)
class PosteriorHistogram:
    """Discretized PMF of model outputs over [lo, hi] with equal-width bins."""

    lo: float
    hi: float
    pmf: np.ndarray

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"need hi > lo, got [{self.lo}, {self.hi}]")
        if (self.pmf < 0).any():
            raise ValueError("histogram masses must be nonnegative")
        if abs(float(self.pmf.sum()) - 1.0) > 1e-12:
            raise ValueError(f"histogram masses must sum to 1, got {self.pmf.sum()}")


@dataclass(frozen=True)
class HistogramPair:
    """The two conditional histograms on a shared range and bin grid."""

    h0: PosteriorHistogram
    h1: PosteriorHistogram

    def __post_init__(self):
        if (
            self.h0.lo != self.h1.lo
            or self.h0.hi != self.h1.hi
            or len(self.h0.pmf) != len(self.h1.pmf)
        ):
            raise ValueError("histogram pair must share range and bin count")


def build_histogram_pair(samples0, samples1, bins: int) -> HistogramPair:
    """Bin both sample sets over the shared [min, max] of their union.

    Bins are half-open with the last bin closed (numpy convention); a
    degenerate range (all samples equal) is widened symmetrically so the
    PMFs stay well defined.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    s0 = np.asarray(samples0, dtype=np.float64)
    s1 = np.asarray(samples1, dtype=np.float64)
    if s0.size == 0 or s1.size == 0:
        raise ValueError("both sample sets must be nonempty")
    if not (np.isfinite(s0).all() and np.isfinite(s1).all()):
        raise ValueError("non-finite sample values")
    if min(s0.size, s1.size) < SAMPLE_FLOOR:
        warnings.warn(
            f"histogram built from {min(s0.size, s1.size)} samples per arm; advantage "
            f"estimates are biased toward 0 below {SAMPLE_FLOOR}",
            UndersampledHistogramWarning,
            stacklevel=2,
        )
    lo = float(min(s0.min(), s1.min()))
    hi = float(max(s0.max(), s1.max()))
    if hi <= lo:
        eps = max(1e-12, 1e-9 * abs(lo))
        lo, hi = lo - eps, lo + eps
    edges = np.linspace(lo, hi, bins + 1)
    h0 = np.histogram(s0, edges)[0] / s0.size
    h1 = np.histogram(s1, edges)[0] / s1.size
    return HistogramPair(
        h0=PosteriorHistogram(lo=lo, hi=hi, pmf=h0),
        h1=PosteriorHistogram(lo=lo, hi=hi, pmf=h1),
    )


def histogram_advantage(pair: HistogramPair) -> float:
    """Advantage of the histogram-optimal rule: the summed positive
    differences h1 - h0, which equals the total-variation distance
    between the two PMFs."""
    diff = pair.h1.pmf - pair.h0.pmf
    return float(min(max(diff[diff > 0].sum(), 0.0), 1.0))


def threshold_adversary(sigma0_sq: float, sigma1_sq: float, y_hat: float) -> int:
    """Optimal membership decision for one model output.

    Predicts member (1) when the squared output falls on the side of the
    density-equality threshold belonging to the member distribution: the
    far tail when the member variance is larger, the center when it is
    smaller.
    """
    alpha = theory.lrt_threshold(sigma0_sq, sigma1_sq)
    if sigma1_sq > sigma0_sq:
        return int(y_hat * y_hat > alpha * alpha)
    return int(y_hat * y_hat < alpha * alpha)


def advantage_from_threshold(sigma0_sq: float, sigma1_sq: float) -> float:
    """Closed-form advantage of the threshold rule (re-export for
    estimator-side comparisons)."""
    return theory.advantage_point(sigma0_sq, sigma1_sq)
