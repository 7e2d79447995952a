"""Configuration validation and serialization round trips."""

import dataclasses

import pytest

from miadv.config import ConfigError, ExperimentConfig


def _base(**kw):
    defaults = dict(model_kind="gaussian_linear", n=50, D=1000, p_grid=(75, 100))
    defaults.update(kw)
    return ExperimentConfig(**defaults)


class TestValidation:
    def test_valid_config(self):
        cfg = _base()
        assert cfg.gammas == (1.5, 2.0)

    @pytest.mark.parametrize(
        "changes, message",
        [
            (dict(model_kind="linear"), "unknown model kind"),
            (dict(n=0), "n must be >= 1"),
            (dict(D=0), "D must be >= 1"),
            (dict(p_grid=()), "p_grid must not be empty"),
            (dict(p_grid=(0,)), "1 <= p <= D"),
            (dict(p_grid=(2000,)), "1 <= p <= D"),
            (dict(sigma=-0.5), "sigma must be >= 0"),
            (dict(ridge_lambda=-1.0), "ridge lambda must be >= 0"),
            (dict(noise_bar=-1.0), "noise_bar must be >= 0"),
            (dict(trials_per_arm=0), "trials_per_arm must be >= 1"),
            (dict(bins=1), "bins must be >= 2"),
            (dict(repeats=0), "repeats must be >= 1"),
            (dict(seed=-3), "seed must be"),
        ],
    )
    def test_each_invariant_rejected_distinctly(self, changes, message):
        with pytest.raises(ConfigError, match=message):
            _base(**changes)

    def test_latent_requires_d(self):
        with pytest.raises(ConfigError, match="latent dimension"):
            _base(model_kind="latent_space", d=0)

    def test_latent_d_bounded_by_smallest_p(self):
        with pytest.raises(ConfigError, match="d <= p"):
            _base(model_kind="latent_space", d=80, p_grid=(75, 100))
        cfg = _base(model_kind="latent_space", d=10)
        assert cfg.d == 10


class TestSerialization:
    def test_json_round_trip_is_identity(self, tmp_path):
        cfg = _base(model_kind="latent_space", d=7, sigma=0.25, ridge_lambda=0.01,
                    trials_per_arm=123, bins=17, repeats=3, seed=99)
        path = tmp_path / "config.json"
        cfg.to_json(path)
        assert ExperimentConfig.from_json(path) == cfg

    def test_gamma_grid_resolves_to_p(self):
        cfg = ExperimentConfig.from_dict(
            dict(model_kind="gaussian_linear", n=50, D=1000, gamma_grid=[1.5, 2, 4])
        )
        assert cfg.p_grid == (75, 100, 200)

    def test_both_grids_rejected(self):
        with pytest.raises(ConfigError, match="not both"):
            ExperimentConfig.from_dict(
                dict(model_kind="gaussian_linear", n=50, D=1000,
                     p_grid=[75], gamma_grid=[1.5])
            )

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            ExperimentConfig.from_dict(
                dict(model_kind="gaussian_linear", n=50, D=1000, p_grid=[75], trails=1)
            )

    def test_malformed_file_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="malformed"):
            ExperimentConfig.from_json(path)

    def test_replace_revalidates(self):
        cfg = _base()
        with pytest.raises(ConfigError):
            cfg.replace(bins=0)

    def test_frozen(self):
        with pytest.raises(dataclasses.FrozenInstanceError):
            _base().n = 3
