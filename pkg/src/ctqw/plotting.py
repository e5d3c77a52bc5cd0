"""Figure rendering for simulation tables and localization scans.

Figures are written straight to files (Agg backend), sized for quick visual
inspection next to the delimited output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_simulation", "plot_scan"]


def plot_simulation(times, probabilities, start: int, path: str) -> None:
    """Probability curves over time for one start vertex.

    ``probabilities`` has shape (len(times), n); column y-1 is the
    probability of finding the walker at vertex y.
    """
    times = np.asarray(times, dtype=float)
    probabilities = np.asarray(probabilities, dtype=float)
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    n = probabilities.shape[1]
    for y in range(1, n + 1):
        if y == start:
            continue
        ax.plot(times, probabilities[:, y - 1], color="0.75", lw=0.7, zorder=1)
    ax.plot(times, probabilities[:, start - 1], color="tab:blue", lw=1.8,
            zorder=2, label=f"return to vertex {start}")
    ax.set_xlabel("time")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"walk probabilities from vertex {start} (n={n})")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_scan(rows, path: str) -> None:
    """Escape probability 1 - P against time per size, plus the size trend.

    ``rows`` is a sequence of ScanRow-like records with size, t,
    return_probability and bound fields.
    """
    by_size: dict[int, list] = {}
    for row in rows:
        by_size.setdefault(int(row.size), []).append(row)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.5, 4.2))
    floor = 1e-18
    sizes = sorted(by_size)
    for size in sizes:
        entries = by_size[size]
        ts = [r.t for r in entries]
        escape = [max(1.0 - r.return_probability, floor) for r in entries]
        ax1.semilogy(ts, escape, lw=1.0, label=f"size {size}")
    ax1.set_xlabel("time")
    ax1.set_ylabel("1 - return probability")
    ax1.set_title("escape probability over time")
    ax1.legend(loc="best", fontsize=8)

    worst = [max(max(1.0 - r.return_probability for r in by_size[s]), floor) for s in sizes]
    bounds = [by_size[s][0].bound for s in sizes]
    ax2.loglog(sizes, worst, "o-", label="max 1 - P")
    ax2.loglog(sizes, bounds, "s--", label="bound")
    ax2.set_xlabel("size")
    ax2.set_ylabel("1 - return probability")
    ax2.set_title("localization trend")
    ax2.legend(loc="best", fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
