"""Render experiment tables to figure files next to the delimited output."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "figure.figsize": (10.0, 4.0),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


def _grouped(rows, keys):
    groups = defaultdict(list)
    for row in rows:
        groups[tuple(row[k] for k in keys)].append(row)
    return groups


def _layer_series(rows, group_field: str, group_value: str):
    """Median bias / distance / bound per layer for one method or regime."""
    per_layer = _grouped(
        [r for r in rows if r[group_field] == group_value], ("layer",)
    )
    layers = sorted(k[0] for k in per_layer)
    med_bias, med_dist, med_bound = [], [], []
    for layer in layers:
        group = per_layer[(layer,)]
        med_bias.append(np.median([r["bias"] for r in group if r["pauli"].strip("I") != ""]))
        scalar = {(r["seed"]): r for r in group}
        med_dist.append(np.median([r["p_distance"] for r in scalar.values()]))
        med_bound.append(np.median([r["bound_value"] for r in scalar.values()]))
    return layers, med_bias, med_dist, med_bound


def _bias_panels(rows, groups, group_field, title, path):
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, len(groups), sharey=True, squeeze=False)
        for ax, value in zip(axes[0], groups):
            layers, bias, dist, bound = _layer_series(rows, group_field, value)
            ax.plot(layers, bias, "o-", ms=3, label="median bias")
            ax.plot(layers, dist, "--", label="distance to identity")
            ax.plot(layers, bound, ":", label="bound")
            ax.set_title(value)
            ax.set_xlabel("layers")
            ax.set_yscale("log")
        axes[0][0].set_ylabel("bias")
        axes[0][0].legend(fontsize=8)
        fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_fig3(rows: list[dict], path: str | Path) -> None:
    methods = sorted({r["method"] for r in rows})
    _bias_panels(rows, methods, "method", "noisy cancellation bias", path)


def plot_fig4(rows: list[dict], path: str | Path) -> None:
    regimes = sorted({r["regime"] for r in rows})
    _bias_panels(rows, regimes, "regime", "inaccurate error model bias", path)


def plot_invertibility(rows: list[dict], path: str | Path) -> None:
    per_shots = _grouped(rows, ("shots",))
    shots = sorted(k[0] for k in per_shots)
    pass_rate = [np.mean([r["passes"] for r in per_shots[(s,)]]) for s in shots]
    bounds = [
        np.median([r["failure_bound"] for r in per_shots[(s,)] if r["failure_bound"] is not None])
        for s in shots
    ]
    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2)
        ax1.plot(shots, pass_rate, "o-")
        ax1.set_xscale("log")
        ax1.set_xlabel("shots")
        ax1.set_ylabel("criterion pass rate")
        ax1.set_ylim(-0.05, 1.05)
        ax2.plot(shots, bounds, "s-")
        ax2.set_xscale("log")
        ax2.set_yscale("log")
        ax2.set_xlabel("shots")
        ax2.set_ylabel("singular-map probability bound")
        fig.suptitle("finite-shot invertibility")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
