"""Figure rendering for experiment output."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiment import GroupCurve

GROUP_STYLE = {
    "random": ("black", "randomized sequence"),
    "agnostic": ("tab:red", "bandit, difficulty-agnostic"),
    "full": ("tab:blue", "bandit, difficulty-aware"),
}


def render_curves(curves: Mapping[str, GroupCurve], path: str | Path) -> Path:
    """Three-curve mastery progression figure with stderr bands."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for group, curve in curves.items():
        color, label = GROUP_STYLE.get(group, ("gray", group))
        xs = range(len(curve.mean))
        ax.plot(xs, curve.mean, color=color, label=label, linewidth=1.6)
        lo = [m - e for m, e in zip(curve.mean, curve.stderr)]
        hi = [m + e for m, e in zip(curve.mean, curve.stderr)]
        ax.fill_between(xs, lo, hi, color=color, alpha=0.15, linewidth=0)
    ax.set_xlabel("question index")
    ax.set_ylabel("mean estimated mastery")
    ax.set_ylim(0.0, 1.0)
    ax.legend(loc="lower right", frameon=False)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    # Finished students hold their final value, so late indices average
    # completed trajectories.
    ax.set_title("Averaged mastery progression (students hold final value after finishing)",
                 fontsize=9)
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
