"""Scale presets for the simulation commands.

``desk`` finishes in minutes per command on a small multicore machine;
``paper`` reproduces the publication-scale runs and takes hours; ``smoke``
exists for fast end-to-end checks and CI.
"""

from __future__ import annotations

from .config import ConfigError, ExperimentConfig

PROFILE_NAMES = ("desk", "paper", "smoke")

# per-profile, per-model base settings; flags and config files override
_PRESETS = {
    "desk": {
        "gaussian_linear": dict(n=50, D=1000, p_grid=(75, 100, 200, 400, 800),
                                sigma=1.0, trials_per_arm=20_000, repeats=10, bins=150),
        "latent_space": dict(n=50, D=800, d=10, p_grid=(55, 100, 200, 400, 800),
                             sigma=1.0, trials_per_arm=10_000, repeats=10, bins=150),
        "time_series": dict(n=64, D=512, p_grid=(70, 128, 256, 512),
                            sigma=0.0, trials_per_arm=10_000, repeats=10, bins=150),
        "relu_features": dict(n=50, D=1000, p_grid=(55, 100, 200, 400, 800),
                              sigma=1.0, trials_per_arm=10_000, repeats=10, bins=150),
        "ridge": dict(n=50, D=1000, p_grid=(500,),
                      sigma=1.0, trials_per_arm=20_000, repeats=10, bins=150),
        "variance": dict(n=100, D=5000, p_grid=(200, 1000, 5000),
                         sigma=1.0, trials_per_arm=20_000, repeats=1, bins=150),
    },
    "paper": {
        "gaussian_linear": dict(n=100, D=3000, p_grid=(110, 150, 200, 300, 500, 800, 1200, 2000, 3000),
                                sigma=1.0, trials_per_arm=100_000, repeats=20, bins=150),
        "latent_space": dict(n=200, D=3200, d=20, p_grid=(220, 400, 800, 1600, 3200),
                             sigma=1.0, trials_per_arm=100_000, repeats=20, bins=150),
        "time_series": dict(n=128, D=1024, p_grid=(140, 256, 512, 1024),
                            sigma=0.0, trials_per_arm=100_000, repeats=20, bins=150),
        "relu_features": dict(n=100, D=5000, p_grid=(110, 200, 400, 800, 1600),
                              sigma=1.0, trials_per_arm=100_000, repeats=20, bins=150),
        "ridge": dict(n=100, D=3000, p_grid=(200, 500, 1000, 2000),
                      sigma=1.0, trials_per_arm=50_000, repeats=20, bins=150),
        "variance": dict(n=400, D=20_000, p_grid=(800, 4000, 20_000),
                         sigma=1.0, trials_per_arm=20_000, repeats=1, bins=150),
    },
    "smoke": {
        "gaussian_linear": dict(n=20, D=200, p_grid=(30, 40, 80),
                                sigma=1.0, trials_per_arm=400, repeats=2, bins=40),
        "latent_space": dict(n=20, D=160, d=4, p_grid=(24, 80, 160),
                             sigma=1.0, trials_per_arm=400, repeats=2, bins=40),
        "time_series": dict(n=24, D=128, p_grid=(28, 64, 128),
                            sigma=0.0, trials_per_arm=400, repeats=2, bins=40),
        "relu_features": dict(n=20, D=100, p_grid=(24, 48, 96),
                              sigma=1.0, trials_per_arm=400, repeats=2, bins=40),
        "ridge": dict(n=20, D=200, p_grid=(60,),
                      sigma=1.0, trials_per_arm=400, repeats=2, bins=40),
        "variance": dict(n=20, D=400, p_grid=(40, 100, 400),
                         sigma=1.0, trials_per_arm=2000, repeats=1, bins=40),
    },
}

_LAMBDA_GRIDS = {
    "desk": (1e-3, 1e-2, 1e-1, 1.0),
    "paper": (1e-3, 1e-2, 1e-1, 1.0),
    "smoke": (1e-2, 1.0),
}


def default_config(model_kind: str, profile: str = "desk", seed: int = 0,
                   preset: str | None = None) -> ExperimentConfig:
    """Base configuration for a model at the given scale.

    ``preset`` selects a non-model table entry ("ridge", "variance");
    those run the gaussian_linear model with their own grids.
    """
    if profile not in _PRESETS:
        raise ConfigError(f"unknown profile {profile!r}; expected one of {PROFILE_NAMES}")
    table = _PRESETS[profile]
    key = preset or model_kind
    if key not in table:
        raise ConfigError(f"no preset {key!r} in profile {profile!r}")
    return ExperimentConfig(model_kind=model_kind, seed=seed, **table[key])


def default_lambda_grid(profile: str = "desk") -> tuple[float, ...]:
    if profile not in _LAMBDA_GRIDS:
        raise ConfigError(f"unknown profile {profile!r}; expected one of {PROFILE_NAMES}")
    return _LAMBDA_GRIDS[profile]
