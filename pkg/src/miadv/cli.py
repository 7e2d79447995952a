"""Command-line entry point.

Each subcommand writes ``<out>/<subcommand>.csv`` and renders
``<out>/<subcommand>.svg`` from that CSV. Curve CSVs share the schema
``grid,gamma,mean_adv,stderr_adv,theory_adv,gen_error`` (unused columns
empty); the variance check writes ``grid,gamma,arm,var_emp,var_theory``.
Exit status: 0 on success, 2 on configuration errors, 1 on runtime
failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import plots, profiles, runner, theory
from .config import ConfigError, ExperimentConfig
from .csvio import ADVANTAGE_HEADER, VARIANCE_HEADER, write_rows
from .rng import derive_stream

OUT_DIR_ENV = "MIADV_OUT_DIR"

# stream path tag for theory-side query sampling (experiment cells use 0/1)
_PATH_THEORY = 10

_DEFAULT_THEORY_N = 1000
_DEFAULT_THEORY_D = 10_000_000
_DEFAULT_GAMMA_GRID = (
    1.1, 1.2, 1.35, 1.5, 1.7, 2.0, 2.5, 3.0, 4.0, 5.0,
    7.0, 10.0, 14.0, 20.0, 30.0, 50.0, 70.0, 100.0,
)
_DEFAULT_RIDGE_GAMMAS = (2.0, 10.0, 50.0)

_SIM_KINDS = {
    "sim-linear": "gaussian_linear",
    "sim-latent": "latent_space",
    "sim-timeseries": "time_series",
    "sim-relu": "relu_features",
}

_FIGURE_COMMANDS = (
    "theory-advantage", "theory-ridge", "theory-tradeoff", "variance-check",
    "sim-linear", "sim-ridge", "sim-latent", "sim-timeseries", "sim-relu",
)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one value")
    return vals


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(round(v)) for v in _float_list(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="miadv",
        description=(
            "Membership-inference advantage of overparameterized linear regression: "
            "closed forms and Monte Carlo verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None,
                        help=f"output directory (default ${OUT_DIR_ENV} or ./miadv-out)")
    common.add_argument("--seed", type=int, default=None, help="master seed (default 0)")

    theory_common = argparse.ArgumentParser(add_help=False, parents=[common])
    theory_common.add_argument("--n", type=int, default=None,
                               help=f"training-set size (default {_DEFAULT_THEORY_N})")
    theory_common.add_argument("--D", type=int, default=None,
                               help=f"data dimension (default {_DEFAULT_THEORY_D})")
    theory_common.add_argument("--sigma", type=float, default=1.0, help="label-noise std dev")
    theory_common.add_argument("--num-x0", type=int, default=100,
                               help="sampled query points for the Monte Carlo expectation")
    theory_common.add_argument("--concentration", action="store_true",
                               help="replace query norms by their expectations "
                                    "(with neither --n nor --D given, theory-advantage "
                                    "evaluates the strict large-size limit)")

    p = sub.add_parser("theory-advantage", parents=[theory_common],
                       help="closed-form advantage vs overparameterization ratio")
    p.add_argument("--gamma", type=_float_list, default=_DEFAULT_GAMMA_GRID,
                   dest="gamma_grid", help="comma-separated p/n ratios")

    p = sub.add_parser("theory-ridge", parents=[theory_common],
                       help="closed-form ridge advantage over a penalty grid")
    p.add_argument("--gamma", type=_float_list, default=_DEFAULT_RIDGE_GAMMAS,
                   dest="gamma_grid", help="comma-separated p/n ratios")
    p.add_argument("--lambda", type=_float_list, default=profiles.default_lambda_grid("desk"),
                   dest="lambda_grid", help="comma-separated ridge penalties (> 0)")

    p = sub.add_parser("theory-tradeoff", parents=[common],
                       help="feature-reduction vs noise-addition trade-off curves")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--D", type=int, default=3000)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--points", type=int, default=20, help="grid points per curve")
    p.add_argument("--num-x0", type=int, default=0,
                   help="query samples for the expectation (0 = concentration path)")

    sim_common = argparse.ArgumentParser(add_help=False, parents=[common])
    sim_common.add_argument("--profile", choices=profiles.PROFILE_NAMES, default="desk")
    sim_common.add_argument("--config", default=None, help="JSON config file")
    sim_common.add_argument("--workers", type=int, default=None,
                            help="worker processes (default: cpu count)")
    sim_common.add_argument("--n", type=int, default=None)
    sim_common.add_argument("--D", type=int, default=None)
    sim_common.add_argument("--d", type=int, default=None, help="latent dimension")
    sim_common.add_argument("--sigma", type=float, default=None)
    sim_common.add_argument("--trials", type=int, default=None, help="trials per arm")
    sim_common.add_argument("--repeats", type=int, default=None)
    sim_common.add_argument("--bins", type=int, default=None)
    sim_common.add_argument("--gamma-grid", type=_float_list, default=None)
    sim_common.add_argument("--p-grid", type=_int_list, default=None)

    sub.add_parser("sim-linear", parents=[sim_common],
                   help="simulated advantage for Gaussian-data linear regression")
    p = sub.add_parser("sim-ridge", parents=[sim_common],
                       help="simulated advantage for ridge-regularized regression")
    p.add_argument("--lambda", type=_float_list, default=None, dest="lambda_grid",
                   help="comma-separated ridge penalties (> 0)")
    sub.add_parser("sim-latent", parents=[sim_common],
                   help="simulated advantage for the latent-space model")
    sub.add_parser("sim-timeseries", parents=[sim_common],
                   help="simulated advantage for noise-free time-series regression")
    sub.add_parser("sim-relu", parents=[sim_common],
                   help="simulated advantage for random ReLU features")
    sub.add_parser("variance-check", parents=[sim_common],
                   help="per-arm output variances against their closed forms")

    p = sub.add_parser("figures", parents=[common],
                       help="run every command and write all CSV/SVG outputs")
    p.add_argument("--profile", choices=profiles.PROFILE_NAMES, default="desk")
    p.add_argument("--workers", type=int, default=None)

    return parser


def _out_dir(args) -> Path:
    out = args.out or os.environ.get(OUT_DIR_ENV) or "miadv-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable")
    return path


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


def _build_sim_config(args, model_kind: str, preset: str | None = None) -> ExperimentConfig:
    data = profiles.default_config(model_kind, args.profile, preset=preset).to_dict()
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {args.config}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config file {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError(f"config file {args.config} must hold a key/value object")
        file_cfg["model_kind"] = model_kind
        if "gamma_grid" in file_cfg and "p_grid" not in file_cfg:
            data.pop("p_grid", None)
        data.update(file_cfg)
    flag_overrides = {
        "n": args.n, "D": args.D, "d": args.d, "sigma": args.sigma,
        "trials_per_arm": args.trials, "bins": args.bins, "repeats": args.repeats,
        "seed": args.seed,
    }
    data.update({k: v for k, v in flag_overrides.items() if v is not None})
    if args.p_grid is not None and args.gamma_grid is not None:
        raise ConfigError("give either --p-grid or --gamma-grid, not both")
    if args.p_grid is not None:
        data["p_grid"] = list(args.p_grid)
        data.pop("gamma_grid", None)
    elif args.gamma_grid is not None:
        data["gamma_grid"] = list(args.gamma_grid)
        data.pop("p_grid", None)
    return ExperimentConfig.from_dict(data)


def _write_and_render(name: str, out: Path, header, rows, renderer, title: str) -> None:
    csv_path = out / f"{name}.csv"
    write_rows(csv_path, header, rows)
    renderer(csv_path, out / f"{name}.svg", title)
    print(f"wrote {csv_path} and {csv_path.with_suffix('.svg')}")


def _cmd_theory_advantage(args) -> None:
    out = _out_dir(args)
    sigma = args.sigma
    limit_mode = args.concentration and args.n is None and args.D is None
    rows = []
    if limit_mode:
        for g in args.gamma_grid:
            adv = theory.min_norm_advantage_limit(g, sigma)
            rows.append((None, g, adv, 0.0, adv, None))
    else:
        n = args.n if args.n is not None else _DEFAULT_THEORY_N
        D = args.D if args.D is not None else _DEFAULT_THEORY_D
        p_grid = [round(g * n) for g in args.gamma_grid]
        conc = [theory.min_norm_advantage_concentration(n, p, D, sigma) for p in p_grid]
        if args.concentration:
            ests = [theory.AdvantageEstimate.from_values([c]) for c in conc]
        else:
            stream = derive_stream(_seed(args), (_PATH_THEORY,))
            ests = theory.min_norm_advantage_curve(n, D, sigma, p_grid, args.num_x0, stream)
        for p, est, c in zip(p_grid, ests, conc):
            rows.append((p, p / n, est.mean, est.stderr, c, None))
    _write_and_render(
        "theory-advantage", out, ADVANTAGE_HEADER, rows, plots.render_advantage_curve,
        "Closed-form membership advantage, minimum-norm interpolation",
    )


def _cmd_theory_ridge(args) -> None:
    out = _out_dir(args)
    n = args.n if args.n is not None else _DEFAULT_THEORY_N
    D = args.D if args.D is not None else _DEFAULT_THEORY_D
    sigma = args.sigma
    if any(lam <= 0 for lam in args.lambda_grid):
        raise ConfigError(f"ridge penalties must be > 0, got {args.lambda_grid}")
    p_grid = [round(g * n) for g in args.gamma_grid]
    stream = derive_stream(_seed(args), (_PATH_THEORY,))
    rows = []
    for lam in args.lambda_grid:
        conc = [theory.ridge_advantage_concentration(n, p, D, sigma, lam) for p in p_grid]
        if args.concentration:
            ests = [theory.AdvantageEstimate.from_values([c]) for c in conc]
        else:
            ests = theory.ridge_advantage_curve(n, D, sigma, p_grid, lam, args.num_x0, stream)
        for p, est, c in zip(p_grid, ests, conc):
            rows.append((lam, p / n, est.mean, est.stderr, c, None))
    _write_and_render(
        "theory-ridge", out, ADVANTAGE_HEADER, rows, plots.render_ridge_curves,
        "Closed-form membership advantage under ridge regularization",
    )


def _cmd_theory_tradeoff(args) -> None:
    out = _out_dir(args)
    n, D, sigma = args.n, args.D, args.sigma
    if not D > n + 1:
        raise ConfigError(f"need D > n+1, got n={n}, D={D}")
    lo = max(n + 2, round(1.4 * n))
    p_grid = sorted(set(int(p) for p in np.geomspace(lo, D, args.points)))
    stream = derive_stream(_seed(args), (_PATH_THEORY,)) if args.num_x0 > 0 else None
    fr = theory.feature_reduction_curve(n, D, sigma, p_grid, args.num_x0, stream)
    base_gen = theory.generalization_error(n, D, D, sigma)
    noise_grid = [pt.gen_error - base_gen for pt in fr]
    stream = derive_stream(_seed(args), (_PATH_THEORY, 1)) if args.num_x0 > 0 else None
    na = theory.noise_addition_curve(n, D, sigma, noise_grid, args.num_x0, stream)
    rows = [(pt.knob, pt.knob / n, pt.advantage, None, None, pt.gen_error) for pt in fr]
    rows += [(pt.knob, None, pt.advantage, None, None, pt.gen_error) for pt in na]
    _write_and_render(
        "theory-tradeoff", out, ADVANTAGE_HEADER, rows, plots.render_tradeoff,
        "Privacy-utility trade-off: feature reduction vs output noise",
    )


def _curve_rows(result, grid_value=None):
    rows = []
    overlay = result.theory_overlay or [None] * len(result.grid)
    for p, gamma, est, th in zip(result.grid, result.gammas, result.empirical, overlay):
        rows.append((grid_value if grid_value is not None else p, gamma,
                     est.mean, est.stderr, th, None))
    return rows


def _cmd_sim(args, command: str) -> None:
    out = _out_dir(args)
    kind = _SIM_KINDS[command]
    cfg = _build_sim_config(args, kind)
    result = runner.run_curve(cfg, workers=args.workers)
    titles = {
        "sim-linear": "Gaussian-data linear regression: simulated advantage",
        "sim-latent": "Latent-space model: simulated advantage",
        "sim-timeseries": "Time-series regression: simulated advantage",
        "sim-relu": "Random ReLU features: simulated advantage",
    }
    _write_and_render(command, out, ADVANTAGE_HEADER, _curve_rows(result),
                      plots.render_advantage_curve, titles[command])


def _cmd_sim_ridge(args) -> None:
    out = _out_dir(args)
    cfg = _build_sim_config(args, "gaussian_linear", preset="ridge")
    lambda_grid = args.lambda_grid or profiles.default_lambda_grid(args.profile)
    results = runner.run_ridge_curve(cfg, lambda_grid, workers=args.workers)
    rows = []
    for lam, result in zip(lambda_grid, results):
        rows += _curve_rows(result, grid_value=lam)
    _write_and_render("sim-ridge", out, ADVANTAGE_HEADER, rows, plots.render_ridge_curves,
                      "Ridge regression: simulated advantage per penalty")


def _cmd_variance_check(args) -> None:
    out = _out_dir(args)
    cfg = _build_sim_config(args, "gaussian_linear", preset="variance")
    rows_data = runner.run_variance_check(cfg, workers=args.workers)
    rows = [
        (round(r.gamma * cfg.n), r.gamma, r.arm, r.var_emp, r.var_theory) for r in rows_data
    ]
    _write_and_render("variance-check", out, VARIANCE_HEADER, rows,
                      plots.render_variance_check,
                      "Conditional output variances: simulation vs closed form")


def _cmd_figures(args) -> None:
    out = _out_dir(args)
    parser = build_parser()
    base = ["--out", str(out)]
    if args.seed is not None:
        base += ["--seed", str(args.seed)]
    for command in _FIGURE_COMMANDS:
        argv = [command] + base
        if command.startswith("sim") or command == "variance-check":
            argv += ["--profile", args.profile]
            if args.workers is not None:
                argv += ["--workers", str(args.workers)]
        _dispatch(parser.parse_args(argv))


def _dispatch(args) -> None:
    command = args.command
    if command == "theory-advantage":
        _cmd_theory_advantage(args)
    elif command == "theory-ridge":
        _cmd_theory_ridge(args)
    elif command == "theory-tradeoff":
        _cmd_theory_tradeoff(args)
    elif command in _SIM_KINDS:
        _cmd_sim(args, command)
    elif command == "sim-ridge":
        _cmd_sim_ridge(args)
    elif command == "variance-check":
        _cmd_variance_check(args)
    elif command == "figures":
        _cmd_figures(args)
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown command {command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - one-line diagnostic per contract
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
