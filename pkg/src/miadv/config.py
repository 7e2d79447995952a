"""Experiment configuration: validation and JSON (de)serialization."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

MODEL_KINDS = ("gaussian_linear", "latent_space", "time_series", "relu_features")


class ConfigError(ValueError):
    """Raised when an experiment configuration violates an invariant."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one membership-inference experiment.

    ``p_grid`` holds the parameter counts swept by the experiment; the
    equivalent overparameterization ratios are ``gammas`` (= p/n). For the
    latent-space model ``d`` is the latent dimension and must not exceed
    any p in the grid.
    """

    model_kind: str
    n: int
    D: int
    p_grid: tuple[int, ...]
    sigma: float = 1.0
    ridge_lambda: float = 0.0
    noise_bar: float = 0.0
    d: int = 0
    trials_per_arm: int = 20_000
    bins: int = 150
    repeats: int = 10
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p_grid", tuple(int(p) for p in self.p_grid))
        if self.model_kind not in MODEL_KINDS:
            raise ConfigError(
                f"unknown model kind {self.model_kind!r}; expected one of {MODEL_KINDS}"
            )
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.D < 1:
            raise ConfigError(f"D must be >= 1, got {self.D}")
        if not self.p_grid:
            raise ConfigError("p_grid must not be empty")
        for p in self.p_grid:
            if not 1 <= p <= self.D:
                raise ConfigError(f"every p must satisfy 1 <= p <= D={self.D}, got p={p}")
        if self.sigma < 0:
            raise ConfigError(f"sigma must be >= 0, got {self.sigma}")
        if self.ridge_lambda < 0:
            raise ConfigError(f"ridge lambda must be >= 0, got {self.ridge_lambda}")
        if self.noise_bar < 0:
            raise ConfigError(f"noise_bar must be >= 0, got {self.noise_bar}")
        if self.trials_per_arm < 1:
            raise ConfigError(f"trials_per_arm must be >= 1, got {self.trials_per_arm}")
        if self.bins < 2:
            raise ConfigError(f"bins must be >= 2, got {self.bins}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if not 0 <= self.seed <= 2**64 - 1:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.model_kind == "latent_space":
            if self.d < 1:
                raise ConfigError("latent_space requires a latent dimension d >= 1")
            if self.d > min(self.p_grid):
                raise ConfigError(
                    f"latent_space requires d <= p for every p in the grid; "
                    f"d={self.d} exceeds p={min(self.p_grid)}"
                )

    @property
    def gammas(self) -> tuple[float, ...]:
        return tuple(p / self.n for p in self.p_grid)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["p_grid"] = list(self.p_grid)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)} - {"gamma_grid"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "gamma_grid" in data:
            if "p_grid" in data:
                raise ConfigError("give either p_grid or gamma_grid, not both")
            n = int(data.get("n", 0))
            if n < 1:
                raise ConfigError("gamma_grid requires n to be set")
            data["p_grid"] = [round(g * n) for g in data.pop("gamma_grid")]
        return cls(**data)

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a key/value object")
        return cls.from_dict(data)
