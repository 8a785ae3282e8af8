"""Two-sample KS tests and feature-importance measures."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .learners import Dataset, GbdtModel, Model, predict


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n_a: int
    n_b: int


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> KsResult:
    """Kolmogorov-Smirnov D over pooled evaluation points, asymptotic p-value.

    D is the supremum of |ECDF_a - ECDF_b| with right-continuous ECDFs; the
    p-value is the Kolmogorov survival function at sqrt(n_a*n_b/(n_a+n_b))*D.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    sa = np.sort(a)
    sb = np.sort(b)
    points = np.concatenate([sa, sb])
    cdf_a = np.searchsorted(sa, points, side="right") / sa.size
    cdf_b = np.searchsorted(sb, points, side="right") / sb.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    ne = sa.size * sb.size / (sa.size + sb.size)
    p = float(special.kolmogorov(np.sqrt(ne) * d))
    return KsResult(statistic=d, p_value=min(max(p, 0.0), 1.0), n_a=int(sa.size), n_b=int(sb.size))


def ks_by_label(data: Dataset) -> list[tuple[str, KsResult]]:
    """Per-feature KS between the class-0 and class-1 rows."""
    rows = []
    mask = data.y == 1
    if not mask.any() or mask.all():
        raise ValueError("KS by label needs rows from both classes")
    for j, name in enumerate(data.feature_names):
        rows.append((name, ks_two_sample(data.X[~mask, j], data.X[mask, j])))
    return rows


def ks_grid(groups: dict[str, np.ndarray],
            feature_names: tuple[str, ...]) -> list[tuple[str, str, str, KsResult]]:
    """KS for every feature over every pair of row groups (e.g. topics).

    Rows are (group_a, group_b, feature, result) with group names in sorted
    order, so the grid layout is stable.
    """
    names = sorted(groups)
    rows = []
    for i, ga in enumerate(names):
        for gb in names[i + 1:]:
            for j, feat in enumerate(feature_names):
                rows.append((ga, gb, feat, ks_two_sample(groups[ga][:, j], groups[gb][:, j])))
    return rows


@dataclass(frozen=True)
class ImportanceReport:
    feature_names: tuple[str, ...]
    values: tuple[float, ...]
    method: str

    def ranking(self) -> list[tuple[str, float]]:
        """Features sorted by importance, descending; ties keep column order."""
        order = sorted(range(len(self.values)), key=lambda j: (-self.values[j], j))
        return [(self.feature_names[j], self.values[j]) for j in order]


def permutation_importance(model: Model, data: Dataset, seed: int = 0,
                           repeats: int = 10) -> ImportanceReport:
    """Mean held-out accuracy drop when one column is shuffled.

    Each (feature, repeat) pair gets its own stream keyed on
    (seed, feature, repeat), so adding repeats never perturbs earlier draws.
    Constant columns score exactly 0.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    model.check_manifest(data.feature_names)
    base_labels, _ = predict(model, data)
    base = float((base_labels == data.y).mean())
    n = len(data)
    values = []
    for j in range(data.n_features):
        drops = []
        for r in range(repeats):
            rng = np.random.default_rng([seed, j, r])
            Xp = data.X.copy()
            Xp[:, j] = Xp[rng.permutation(n), j]
            labels, _ = predict(model, Xp)
            drops.append(base - float((labels == data.y).mean()))
        values.append(float(np.mean(drops)))
    return ImportanceReport(feature_names=data.feature_names,
                            values=tuple(values), method="permutation")


def gain_importance(model: Model) -> ImportanceReport:
    """Normalised total split gain per feature; tree ensembles only."""
    if not isinstance(model.impl, GbdtModel):
        raise ValueError(
            f"gain importance requires a boosted-tree model, got {model.algorithm.value}")
    values = model.impl.gain_importance()
    return ImportanceReport(feature_names=model.feature_names,
                            values=tuple(float(v) for v in values), method="gain")
