"""Membership-inference advantage of overparameterized linear regression
on Gaussian data: closed forms, Monte Carlo verification with
histogram-based optimal adversaries, and privacy-utility trade-offs."""

from .config import ConfigError, ExperimentConfig, MODEL_KINDS
from .estimator import (
    HistogramPair,
    PosteriorHistogram,
    build_histogram_pair,
    histogram_advantage,
)
from .models import QueryContext, TrialOutput, make_context, sample_trial, sample_trials
from .results import AdvantageEstimate, CurveResult, TradeoffPoint, VarianceCheckRow
from .rng import RngStream, derive_stream, standard_normal
from .runner import run_curve, run_ridge_curve, run_variance_check
from .theory import (
    StieltjesValue,
    TheoryInputs,
    VariancePair,
    advantage_point,
    generalization_error,
    lrt_threshold,
    member_variance,
    min_norm_advantage,
    min_norm_advantage_concentration,
    mp_stieltjes,
    nonmember_variance,
    ridge_variances,
)

__version__ = "0.1.0"

__all__ = [
    "AdvantageEstimate",
    "ConfigError",
    "CurveResult",
    "ExperimentConfig",
    "HistogramPair",
    "MODEL_KINDS",
    "PosteriorHistogram",
    "QueryContext",
    "RngStream",
    "StieltjesValue",
    "TheoryInputs",
    "TradeoffPoint",
    "TrialOutput",
    "VariancePair",
    "VarianceCheckRow",
    "advantage_point",
    "build_histogram_pair",
    "derive_stream",
    "generalization_error",
    "histogram_advantage",
    "lrt_threshold",
    "make_context",
    "member_variance",
    "min_norm_advantage",
    "min_norm_advantage_concentration",
    "mp_stieltjes",
    "nonmember_variance",
    "ridge_variances",
    "run_curve",
    "run_ridge_curve",
    "run_variance_check",
    "sample_trial",
    "sample_trials",
    "standard_normal",
    "__version__",
]
