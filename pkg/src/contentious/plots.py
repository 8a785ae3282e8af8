"""Static SVG views of experiment reports and feature distributions."""
from __future__ import annotations

import os
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}, "bbox_inches": "tight"}


def _save(fig, path: str) -> None:
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def plot_accuracy_matrix(matrix: dict, path: str) -> None:
    """Grouped bars: one group per feature mode, one bar per algorithm."""
    algorithms = list(matrix)
    modes = list(next(iter(matrix.values())))
    x = np.arange(len(modes))
    width = 0.8 / max(len(algorithms), 1)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for i, algorithm in enumerate(algorithms):
        means = [matrix[algorithm][m]["mean"] for m in modes]
        ax.bar(x + i * width, means, width, label=algorithm)
    ax.set_xticks(x + width * (len(algorithms) - 1) / 2)
    ax.set_xticklabels(modes)
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("held-out accuracy")
    ax.set_title("Accuracy by algorithm and feature mode")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_early_detection(early: dict, path: str) -> None:
    """Accuracy vs horizon, one line per feature mode."""
    horizons = sorted(early, key=int)
    if not horizons:
        return
    modes = list(early[horizons[0]])
    hours = [int(h) / 3600 for h in horizons]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for mode in modes:
        ax.plot(hours, [early[h][mode]["mean"] for h in horizons],
                marker="o", label=mode)
    ax.set_xlabel("horizon (hours)")
    ax.set_ylabel("held-out accuracy")
    ax.set_title("Early detection")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_importance(values: dict, path: str, title: str) -> None:
    names = sorted(values, key=lambda k: -values[k])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(range(len(names)), [values[n] for n in names])
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right")
    ax.set_ylabel("importance")
    ax.set_title(title)
    _save(fig, path)


def plot_ks(by_label: list[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    names = [row["feature"] for row in by_label]
    ax.bar(range(len(names)), [row["statistic"] for row in by_label])
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right")
    ax.set_ylabel("KS statistic")
    ax.set_title("Class separation per feature (KS)")
    _save(fig, path)


def plot_distributions(X: np.ndarray, y: np.ndarray,
                       feature_names: Sequence[str], path: str,
                       features: Optional[Sequence[str]] = None) -> None:
    """Per-class box plots for the chosen features (default: all)."""
    chosen = list(features) if features else list(feature_names)
    index = {name: j for j, name in enumerate(feature_names)}
    fig, axes = plt.subplots(1, len(chosen), figsize=(2.2 * len(chosen), 4.0),
                             squeeze=False)
    for ax, name in zip(axes[0], chosen):
        j = index[name]
        ax.boxplot([X[y == 0, j], X[y == 1, j]], tick_labels=["neutral", "controversial"])
        ax.set_title(name)
        ax.tick_params(axis="x", rotation=30)
    fig.suptitle("Feature distributions by class")
    _save(fig, path)


def plot_report(report, out_dir: str) -> list[str]:
    """All plots derivable from a report; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    path = os.path.join(out_dir, "accuracy.svg")
    plot_accuracy_matrix(report.matrix, path)
    written.append(path)
    if report.early_detection:
        path = os.path.join(out_dir, "early_detection.svg")
        plot_early_detection(report.early_detection, path)
        written.append(path)
    for method, block in sorted(report.importance.items()):
        path = os.path.join(out_dir, f"importance_{method}.svg")
        plot_importance(block["mean_values"], path, f"{method} importance")
        written.append(path)
    if report.ks.get("by_label"):
        path = os.path.join(out_dir, "ks_by_label.svg")
        plot_ks(report.ks["by_label"], path)
        written.append(path)
    return written
