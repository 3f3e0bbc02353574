"""
Trace Plots
-----------
Two-panel SVG figures: the tracked metric against iterations and against
cumulative transmitted bits. SVG output is made deterministic (fixed hash
salt, no date metadata) so identical traces give identical files.
"""

import logging
import os
import tempfile
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams.update(
    {
        "font.family": "DejaVu Sans",
        "axes.unicode_minus": False,
        "svg.hashsalt": "rcpp",
        "svg.fonttype": "path",
    }
)
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger(__name__)

METRIC_LABELS = {
    "residual": "f(x̄) - f*",
    "grad_norm": "‖∇f(x̄)‖",
}


def metric_for_mode(mode: str) -> str:
    return "residual" if mode == "convex_residual" else "grad_norm"


def _positive(values: pd.Series) -> np.ndarray:
    v = values.to_numpy(dtype=np.float64)
    return np.where(v > 0, v, np.nan)


def _save_svg(fig, path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".svg.tmp")
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg", metadata={"Date": None})
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.remove(tmp)


def plot_traces(traces: Mapping[str, pd.DataFrame], metric: str, path: str, title: str = "") -> None:
    """One line per labelled trace on both panels; labels are drawn in sorted order."""
    if metric not in METRIC_LABELS:
        raise ValueError(f"Unknown metric '{metric}'")
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    for label in sorted(traces):
        df = traces[label]
        y = _positive(df[metric])
        axes[0].plot(df["k"].to_numpy(), y, label=label)
        axes[1].plot(df["bits"].to_numpy(), y, label=label)
    axes[0].set_xlabel("Iteration k")
    axes[1].set_xlabel("Cumulative bits")
    for ax in axes:
        ax.set_yscale("log")
        ax.set_ylabel(METRIC_LABELS[metric])
        ax.grid(True, alpha=0.3)
    axes[-1].legend(loc="best", fontsize=8)
    if title:
        fig.suptitle(title)
    _save_svg(fig, path)
    logger.info(f"Wrote plot {path}")
