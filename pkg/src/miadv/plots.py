"""Static SVG rendering of the CSV outputs.

Every renderer reads a CSV written by the CLI and draws exactly its
content; nothing is recomputed, so plots and data cannot disagree.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .csvio import read_rows  # noqa: E402

# fixed styling and hashsalt keep the SVG output deterministic
matplotlib.rcParams.update(
    {
        "svg.hashsalt": "miadv",
        "figure.figsize": (6.0, 4.0),
        "figure.dpi": 100,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "savefig.bbox": "tight",
    }
)

_ARM_LABELS = {0: "non-member (m=0)", 1: "member (m=1)"}


def _save(fig, svg_path):
    Path(svg_path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(svg_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_advantage_curve(csv_path, svg_path, title: str) -> None:
    """Mean advantage vs overparameterization ratio, with standard-error
    band and closed-form overlay when present."""
    _, rows = read_rows(csv_path)
    x = [r["gamma"] for r in rows]
    mean = [r["mean_adv"] for r in rows]
    err = [r["stderr_adv"] or 0.0 for r in rows]
    fig, ax = plt.subplots()
    ax.errorbar(x, mean, yerr=err, fmt="o-", capsize=3, label="empirical (histogram rule)")
    if any(r["theory_adv"] is not None for r in rows):
        ax.plot(x, [r["theory_adv"] for r in rows], "k--", label="closed form")
    ax.set_xscale("log")
    ax.set_xlabel("overparameterization ratio p/n")
    ax.set_ylabel("membership advantage")
    ax.set_title(title)
    ax.legend()
    _save(fig, svg_path)


def render_ridge_curves(csv_path, svg_path, title: str) -> None:
    """One advantage-vs-ratio curve per ridge penalty (grid column)."""
    _, rows = read_rows(csv_path)
    lams = sorted({r["grid"] for r in rows})
    fig, ax = plt.subplots()
    for lam in lams:
        sub = [r for r in rows if r["grid"] == lam]
        sub.sort(key=lambda r: r["gamma"])
        x = [r["gamma"] for r in sub]
        line = ax.errorbar(
            x,
            [r["mean_adv"] for r in sub],
            yerr=[r["stderr_adv"] or 0.0 for r in sub],
            fmt="o-",
            capsize=3,
            label=f"lambda={lam:g}",
        )
        if any(r["theory_adv"] is not None for r in sub):
            ax.plot(
                x,
                [r["theory_adv"] for r in sub],
                "--",
                color=line.lines[0].get_color(),
                alpha=0.7,
            )
    ax.set_xscale("log")
    ax.set_xlabel("overparameterization ratio p/n")
    ax.set_ylabel("membership advantage")
    ax.set_title(title)
    ax.legend()
    _save(fig, svg_path)


def render_tradeoff(csv_path, svg_path, title: str) -> None:
    """Advantage vs generalization error for the two mitigation knobs.

    Feature-reduction rows carry a gamma value; noise-addition rows leave
    it empty (the knob there is the added output-noise variance).
    """
    _, rows = read_rows(csv_path)
    fr = [r for r in rows if r["gamma"] is not None]
    na = [r for r in rows if r["gamma"] is None]
    fig, ax = plt.subplots()
    fr.sort(key=lambda r: r["gen_error"])
    na.sort(key=lambda r: r["gen_error"])
    ax.plot([r["gen_error"] for r in fr], [r["mean_adv"] for r in fr], "o-",
            label="feature reduction (vary p)")
    ax.plot([r["gen_error"] for r in na], [r["mean_adv"] for r in na], "s--",
            label="noise addition (vary added variance)")
    ax.set_xlabel("generalization error")
    ax.set_ylabel("membership advantage")
    ax.set_title(title)
    ax.legend()
    _save(fig, svg_path)


def render_variance_check(csv_path, svg_path, title: str) -> None:
    """Per-arm sample variances against their closed forms."""
    _, rows = read_rows(csv_path)
    fig, ax = plt.subplots()
    for arm in (0, 1):
        sub = [r for r in rows if r["arm"] == arm]
        sub.sort(key=lambda r: r["gamma"])
        x = [r["gamma"] for r in sub]
        line, = ax.plot(x, [r["var_emp"] for r in sub], "o", label=f"empirical, {_ARM_LABELS[arm]}")
        ax.plot(x, [r["var_theory"] for r in sub], "--", color=line.get_color(),
                label=f"closed form, {_ARM_LABELS[arm]}")
    ax.set_xscale("log")
    ax.set_xlabel("overparameterization ratio p/n")
    ax.set_ylabel("output variance")
    ax.set_title(title)
    ax.legend()
    _save(fig, svg_path)
