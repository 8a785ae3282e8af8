"""Histogram binning for gradient-boosted training.

Columns with few distinct values get midpoint edges between neighbours;
wide columns get quantile edges.  Bin index b satisfies
edges[b-1] < x <= edges[b], so the split "bin <= t" is exactly
"x <= edges[t]" and raw-value thresholds stay faithful at predict time.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def compute_bin_edges(values: np.ndarray, max_bins: int) -> np.ndarray:
    """Edges (ascending, possibly empty) for one feature column."""
    if max_bins < 2:
        raise ValueError("max_bins must be at least 2")
    distinct = np.unique(values)
    if distinct.size <= 1:
        return np.empty(0, dtype=np.float64)
    if distinct.size <= max_bins:
        return ((distinct[:-1] + distinct[1:]) / 2.0).astype(np.float64)
    quantiles = np.quantile(values, np.arange(1, max_bins) / max_bins)
    return np.unique(quantiles).astype(np.float64)


def bin_column(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.searchsorted(edges, values, side="left").astype(np.int32)


@dataclass(frozen=True)
class BinnedMatrix:
    """Per-column integer bins plus the raw-value edges that made them."""

    bins: np.ndarray                 # (n_rows, n_features) int32
    edges: tuple[np.ndarray, ...]    # raw-value thresholds per feature
    n_bins: tuple[int, ...]          # bins per feature = len(edges) + 1

    @property
    def n_features(self) -> int:
        return int(self.bins.shape[1])


def bin_matrix(X: np.ndarray, max_bins: int) -> BinnedMatrix:
    edges = tuple(compute_bin_edges(X[:, j], max_bins) for j in range(X.shape[1]))
    cols = [bin_column(X[:, j], edges[j]) for j in range(X.shape[1])]
    bins = np.column_stack(cols) if cols else np.empty((X.shape[0], 0), dtype=np.int32)
    return BinnedMatrix(bins=bins, edges=edges, n_bins=tuple(e.size + 1 for e in edges))
