"""Figure rendering for evaluation reports, ratings summaries, and loss logs."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_metric_graphs(pair_values: dict, path) -> Path:
    """Node-and-edge panels, one per metric, with values written on the edges.

    pair_values: {metric: {(set_a, set_b): value}}.
    """
    metrics = list(pair_values)
    fig, axes = plt.subplots(1, len(metrics), figsize=(4.2 * len(metrics), 4.2))
    if len(metrics) == 1:
        axes = [axes]
    for ax, metric in zip(axes, metrics):
        pairs = pair_values[metric]
        names = sorted({n for pair in pairs for n in pair})
        angles = np.linspace(0, 2 * np.pi, len(names), endpoint=False) + np.pi / 2
        pos = {n: (np.cos(a), np.sin(a)) for n, a in zip(names, angles)}
        for (a, b), value in pairs.items():
            xa, ya = pos[a]
            xb, yb = pos[b]
            ax.plot([xa, xb], [ya, yb], color="0.6", lw=1, zorder=1)
            ax.annotate(
                f"{value:.3g}", ((xa + xb) / 2, (ya + yb) / 2),
                fontsize=8, ha="center", va="center",
                bbox=dict(boxstyle="round,pad=0.15", fc="white", ec="0.8"),
            )
        for n, (x, y) in pos.items():
            ax.scatter([x], [y], s=600, zorder=2, color="tab:blue")
            ax.annotate(n, (x, y), color="white", ha="center", va="center", fontsize=8)
        ax.set_title(metric.upper())
        ax.set_xlim(-1.5, 1.5)
        ax.set_ylim(-1.5, 1.5)
        ax.axis("off")
    return _save(fig, path)


def plot_pca(coords: dict, explained: np.ndarray, path) -> Path:
    """2-D scatter of projected embeddings, one color per source set."""
    fig, ax = plt.subplots(figsize=(6, 5))
    for name, pts in coords.items():
        ax.scatter(pts[:, 0], pts[:, 1], s=12, alpha=0.6, label=name)
    ax.set_xlabel(f"PC1 ({explained[0] * 100:.1f}% var)")
    ax.set_ylabel(f"PC2 ({explained[1] * 100:.1f}% var)" if len(explained) > 1 else "PC2")
    ax.legend(fontsize=8)
    ax.set_title("PCA of audio embeddings")
    return _save(fig, path)


def plot_rating_boxplot(stats: dict, path) -> Path:
    """Boxplot of realism ratings per condition from precomputed statistics."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    conditions = list(stats)
    boxes = [
        {
            "label": c,
            "med": s.median,
            "q1": s.q1,
            "q3": s.q3,
            "whislo": s.whisker_lo,
            "whishi": s.whisker_hi,
            "fliers": s.outliers,
        }
        for c, s in stats.items()
    ]
    ax.bxp(boxes, showfliers=True)
    ax.set_ylabel("realism rating")
    ax.set_ylim(-0.05, 1.05)
    ax.set_xticklabels(conditions, rotation=30)
    ax.grid(axis="y", alpha=0.3)
    return _save(fig, path)


def plot_loss_curves(log: dict, path) -> Path:
    """Loss-log curves: totals plus whichever components are non-trivial."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    steps = log["step"]
    for name in ("L_G", "L_D", "gp", "fm"):
        values = log.get(name)
        if values is None or not np.any(values):
            continue
        ax.plot(steps, values, label=name, lw=1)
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)
