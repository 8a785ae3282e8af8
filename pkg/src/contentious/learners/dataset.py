"""Labeled feature matrices for training and evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ..features import FeatureVector


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    """Dense rows with binary labels and named feature columns."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    post_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.X.ndim != 2:
            raise DatasetError("X must be 2-D")
        if self.X.shape[1] != len(self.feature_names):
            raise DatasetError("X width does not match feature_names")
        if self.X.shape[0] != self.y.shape[0] or len(self.post_ids) != self.y.shape[0]:
            raise DatasetError("row count mismatch between X, y, post_ids")
        if np.isnan(self.X).any():
            raise DatasetError("NaN feature values after imputation")
        labels = set(np.unique(self.y).tolist())
        if not labels <= {0, 1}:
            raise DatasetError(f"labels must be binary 0/1, got {sorted(labels)}")

    def __len__(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.X.shape[1])

    @classmethod
    def from_vectors(cls, vectors: Iterable[FeatureVector],
                     feature_names: Optional[Sequence[str]] = None) -> "Dataset":
        """Stack feature vectors; the first vector's mask names the columns."""
        vectors = list(vectors)
        if not vectors:
            raise DatasetError("no feature vectors")
        names = tuple(feature_names if feature_names is not None else vectors[0].active)
        rows, labels, ids = [], [], []
        for vec in vectors:
            if vec.label is None:
                raise DatasetError(f"post {vec.post_id!r} has no label")
            rows.append(vec.as_array(names))
            labels.append(int(vec.label))
            ids.append(vec.post_id)
        return cls(
            X=np.vstack(rows),
            y=np.asarray(labels, dtype=np.int64),
            feature_names=names,
            post_ids=tuple(ids),
        )

    def take(self, indices: np.ndarray) -> "Dataset":
        return Dataset(
            X=self.X[indices],
            y=self.y[indices],
            feature_names=self.feature_names,
            post_ids=tuple(self.post_ids[i] for i in indices),
        )

    def split_stratified(self, train_fraction: float, seed: int) -> tuple["Dataset", "Dataset"]:
        """Seeded stratified split by label; both classes must reach both sides."""
        if not 0.0 < train_fraction < 1.0:
            raise DatasetError("train_fraction must be in (0, 1)")
        rng = np.random.default_rng(seed)
        train_idx: list[int] = []
        test_idx: list[int] = []
        for cls_value in (0, 1):
            members = np.flatnonzero(self.y == cls_value)
            if members.size == 0:
                continue
            members = members[rng.permutation(members.size)]
            cut = int(round(train_fraction * members.size))
            train_idx.extend(members[:cut].tolist())
            test_idx.extend(members[cut:].tolist())
        train = self.take(np.array(sorted(train_idx), dtype=np.int64))
        test = self.take(np.array(sorted(test_idx), dtype=np.int64))
        for side, name in ((train, "train"), (test, "test")):
            present = set(np.unique(side.y).tolist())
            if present != {0, 1}:
                raise DatasetError(
                    f"{name} split lost a class (labels present: {sorted(present)}); "
                    "adjust train_fraction or the split seed"
                )
        return train, test
