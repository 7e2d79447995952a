"""Result records shared by the theory and simulation layers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class AdvantageEstimate:
    """Per-query advantage values with their mean and standard error."""

    per_x0: tuple[float, ...]
    mean: float
    stderr: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "AdvantageEstimate":
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("need at least one advantage value")
        k = len(vals)
        mean = math.fsum(vals) / k
        if k > 1:
            var = math.fsum((v - mean) ** 2 for v in vals) / (k - 1)
            stderr = math.sqrt(var / k)
        else:
            stderr = 0.0
        return cls(per_x0=vals, mean=mean, stderr=stderr)


@dataclass(frozen=True)
class TradeoffPoint:
    """One (generalization error, membership advantage) pair.

    ``knob`` is the quantity that was varied to reach the point: the
    parameter count p for feature reduction, the added output-noise
    variance for noise addition.
    """

    gen_error: float
    advantage: float
    knob: float


@dataclass(frozen=True)
class CurveResult:
    """Empirical advantage curve over a parameter grid, with optional
    closed-form overlay (Gaussian-data linear model only)."""

    grid: tuple[int, ...]
    gammas: tuple[float, ...]
    empirical: tuple[AdvantageEstimate, ...]
    theory_overlay: tuple[float, ...] | None
    wall_time: float
    ridge_lambda: float = 0.0


@dataclass(frozen=True)
class VarianceCheckRow:
    """Sample variance of one conditional arm against its closed form."""

    gamma: float
    arm: int
    var_emp: float
    var_theory: float
