"""Static figures: flux networks, energy spread and GRC against gamma."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from .graph import Network  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 3.4

STYLE = {
    "font.family": "serif",
    "font.size": 8,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.markersize": 4,
    "lines.linewidth": 1,
    "svg.hashsalt": "transtree",
}
# fixed metadata keeps SVG output byte-stable
SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, path: Path) -> None:
    path = Path(path)
    kw = {"metadata": SVG_METADATA} if path.suffix == ".svg" else {"dpi": 200}
    fig.savefig(path, bbox_inches="tight", **kw)
    plt.close(fig)


def plot_flux_network(net: Network, q: np.ndarray, path: Path, zero_tol: float = 0.0, title: str = "") -> None:
    """Draw edges with nonzero flux at their coordinates, width ~ sqrt(|Q|)."""
    if net.coordinates is None:
        raise ValueError("network has no coordinates to draw")
    q = np.abs(np.asarray(q, dtype=float))
    keep = q > zero_tol
    xy = net.coordinates
    segs = np.stack([xy[net.edges[keep, 0]], xy[net.edges[keep, 1]]], axis=1)
    widths = 4.0 * np.sqrt(q[keep] / q.max()) if keep.any() else []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(fig_width, fig_width * 0.7))
        ax.add_collection(LineCollection(segs, linewidths=widths, colors="k", capstyle="round"))
        ax.scatter(xy[:, 0], xy[:, 1], s=1.5, c="0.6", zorder=0)
        src = np.flatnonzero(net.sources > 0)
        ax.scatter(xy[src, 0], xy[src, 1], s=12, c="tab:red", zorder=3)
        ax.set_aspect("equal")
        ax.autoscale_view()
        ax.set_axis_off()
        if title:
            ax.set_title(title)
        _save(fig, path)


def plot_energy_stats(gammas, best, worst, std, path: Path) -> None:
    """Min (star) and max (dot) final energies per gamma, and their spread."""
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(2 * fig_width, fig_width * golden_mean))
        ax1.plot(gammas, best, "*", label="min")
        ax1.plot(gammas, worst, "o", label="max")
        ax1.set_xlabel(r"$\gamma$")
        ax1.set_ylabel("energy")
        ax1.set_yscale("log")
        ax1.legend(frameon=False)
        ax2.plot(gammas, std, "o-")
        ax2.set_xlabel(r"$\gamma$")
        ax2.set_ylabel("std. dev. of energy")
        fig.tight_layout()
        _save(fig, path)


def plot_grc(gammas, grc_best, grc_std, path: Path) -> None:
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(2 * fig_width, fig_width * golden_mean))
        ax1.plot(gammas, grc_best, "o-")
        ax1.set_xlabel(r"$\gamma$")
        ax1.set_ylabel("GRC of best network")
        ax2.plot(gammas, grc_std, "o-")
        ax2.set_xlabel(r"$\gamma$")
        ax2.set_ylabel("std. dev. of GRC")
        fig.tight_layout()
        _save(fig, path)
