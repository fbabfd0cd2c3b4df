"""Static SVG line plot of mean objective against iteration."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Sequence

import numpy as np


def write_svg(path, curves: Dict[str, Sequence], title: str = "") -> None:
    """Plot ``{label: records}`` on a log-y axis and save a standalone SVG.

    Non-positive objective values cannot be drawn on a log axis and are dropped.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, records in curves.items():
        it = np.array([r.iteration for r in records], dtype=float)
        y = np.array([r.mean_objective for r in records], dtype=float)
        keep = y > 0
        ax.plot(it[keep], y[keep], label=label, linewidth=1.2)
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean objective")
    if title:
        ax.set_title(title)
    if curves:
        ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), format="svg", metadata={"Date": None})
    plt.close(fig)
