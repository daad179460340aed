"""Static step-response figures written next to the response CSV."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .sim import ResponseRecord  # noqa: E402


def plot_response(rec: ResponseRecord, path, title: str | None = None) -> None:
    """Three panels: all nodes with both reduced outputs, then group a, then group b."""
    fig, axes = plt.subplots(1, 3, figsize=(13, 3.6), sharey=True)
    t = rec.times
    colors = ("tab:blue", "tab:orange")
    names = ("a", "b")

    ax = axes[0]
    for g in (0, 1):
        idx = np.flatnonzero(rec.labels == g)
        ax.plot(t, rec.full_outputs[:, idx], color=colors[g], lw=0.6, alpha=0.5)
        ax.plot(t, rec.reduced_outputs[:, g], color="k", lw=1.4, ls="--" if g else "-")
    ax.set_title("all nodes")
    ax.set_ylabel("output")

    for g, ax in zip((0, 1), axes[1:]):
        idx = np.flatnonzero(rec.labels == g)
        ax.plot(t, rec.full_outputs[:, idx], color=colors[g], lw=0.6, alpha=0.5)
        ax.plot(t, rec.group_means[:, g], color=colors[g], lw=1.6, label="group mean")
        ax.plot(t, rec.reduced_outputs[:, g], color="k", lw=1.4, ls="--", label="reduced")
        ax.set_title(f"group {names[g]} (rms to mean {rec.rms_to_mean[g]:.2e})")
        ax.legend(loc="best", fontsize=8)

    for ax in axes:
        ax.set_xlabel("t [s]")
        ax.grid(alpha=0.3)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)
