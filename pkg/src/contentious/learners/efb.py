"""Exclusive feature bundling over binned columns.

Bin 0 is a column's default bucket (for the non-negative cascade features it
is the raw-zero bucket).  Two features conflict on a sample when both sit
outside bin 0 there.  Features are greedily packed, in descending order of
total conflict weight, into the first bundle whose conflicted-sample set
would stay within the budget; each feature gets a cumulative offset of
(n_bins - 1) inside its bundle so every non-default bin keeps a unique slot
in the merged column.  With a zero budget only mutually exclusive features
share a bundle and the merge loses nothing; with a budget of at least the
sample count everything collapses into one bundle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Bundle:
    """One merged column: original feature indices and their bin offsets."""

    features: tuple[int, ...]
    offsets: tuple[int, ...]
    feature_bins: tuple[int, ...]

    @property
    def n_bins(self) -> int:
        return 1 + sum(nb - 1 for nb in self.feature_bins)


def singleton_bundles(n_bins: Sequence[int]) -> list[Bundle]:
    """One bundle per feature: the merged column equals the original."""
    return [Bundle(features=(j,), offsets=(0,), feature_bins=(int(nb),))
            for j, nb in enumerate(n_bins)]


def efb_bundle(bins: np.ndarray, n_bins: Sequence[int], max_conflict: int) -> list[Bundle]:
    """Greedy bundling with at most max_conflict conflicted samples per bundle."""
    if max_conflict < 0:
        raise ValueError("max_conflict must be non-negative")
    n_features = bins.shape[1]
    if n_features == 0:
        return []
    nonzero = bins != 0

    weights = np.zeros((n_features, n_features), dtype=np.int64)
    for i in range(n_features):
        for j in range(i + 1, n_features):
            w = int(np.count_nonzero(nonzero[:, i] & nonzero[:, j]))
            weights[i, j] = weights[j, i] = w
    degree = weights.sum(axis=1)
    order = sorted(range(n_features), key=lambda f: (-int(degree[f]), f))

    members: list[list[int]] = []
    unions: list[np.ndarray] = []
    conflicted: list[np.ndarray] = []
    for f in order:
        placed = False
        for b in range(len(members)):
            would_conflict = conflicted[b] | (nonzero[:, f] & unions[b])
            if int(would_conflict.sum()) <= max_conflict:
                members[b].append(f)
                conflicted[b] = would_conflict
                unions[b] = unions[b] | nonzero[:, f]
                placed = True
                break
        if not placed:
            members.append([f])
            unions.append(nonzero[:, f].copy())
            conflicted.append(np.zeros(bins.shape[0], dtype=bool))

    bundles = []
    for group in members:
        offsets, acc = [], 0
        for f in group:
            offsets.append(acc)
            acc += int(n_bins[f]) - 1
        bundles.append(Bundle(features=tuple(group), offsets=tuple(offsets),
                              feature_bins=tuple(int(n_bins[f]) for f in group)))
    return bundles


def merge_column(bins: np.ndarray, bundle: Bundle) -> np.ndarray:
    """Merged int column; on conflicted samples later members win."""
    merged = np.zeros(bins.shape[0], dtype=np.int32)
    for f, off in zip(bundle.features, bundle.offsets):
        nz = bins[:, f] != 0
        merged[nz] = bins[nz, f] + off
    return merged


def demux_column(merged: np.ndarray, bundle: Bundle, feature: int) -> np.ndarray:
    """Recover one member's bins from the merged column (exact when unconflicted)."""
    pos = bundle.features.index(feature)
    off = bundle.offsets[pos]
    nb = bundle.feature_bins[pos]
    inside = (merged > off) & (merged <= off + nb - 1)
    return np.where(inside, merged - off, 0).astype(np.int32)
