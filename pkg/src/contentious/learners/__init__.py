"""Classifier zoo behind one train/predict/save/load interface.

Every fitted model carries a manifest naming the feature columns it was
trained on (plus the feature-extraction conventions); prediction refuses
inputs whose columns do not match, listing what is missing or extra.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .baselines import CartModel, KnnModel, LogisticModel
from .binning import BinnedMatrix, bin_column, bin_matrix, compute_bin_edges
from .dataset import Dataset, DatasetError
from .efb import Bundle, demux_column, efb_bundle, merge_column, singleton_bundles
from .gbdt import GbdtConfig, GbdtModel, GbdtTree, train_gbdt
from .goss import goss_sample


class Algorithm(Enum):
    LOGREG = "logreg"
    KNN = "knn"
    DTREE = "dtree"
    GBDT = "gbdt"
    GBDT_GOSS_EFB = "gbdt_goss_efb"


class ManifestError(ValueError):
    pass


@dataclass
class Model:
    algorithm: Algorithm
    manifest: dict
    impl: Any

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(self.manifest["features"])

    @property
    def train_loss(self) -> Optional[list[float]]:
        return self.impl.train_loss if isinstance(self.impl, GbdtModel) else None

    def check_manifest(self, feature_names: tuple[str, ...]) -> None:
        expected = self.feature_names
        if tuple(feature_names) == expected:
            return
        missing = [f for f in expected if f not in feature_names]
        extra = [f for f in feature_names if f not in expected]
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if extra:
            parts.append(f"extra {extra}")
        if not parts:
            parts.append(f"order differs: expected {list(expected)}, got {list(feature_names)}")
        raise ManifestError("feature columns do not match the model manifest: " + "; ".join(parts))


def _make_impl(algorithm: Algorithm, params: Optional[dict]) -> Any:
    params = dict(params or {})
    if algorithm is Algorithm.LOGREG:
        return LogisticModel(**params)
    if algorithm is Algorithm.KNN:
        return KnnModel(**params)
    if algorithm is Algorithm.DTREE:
        return CartModel(**params)
    raise ValueError(f"no such baseline: {algorithm}")


def train(algorithm: Algorithm, data: Dataset, params: Optional[dict] = None,
          manifest_extra: Optional[dict] = None) -> Model:
    """Fit one algorithm on a dataset; params override per-algorithm defaults."""
    manifest = {"features": list(data.feature_names)}
    manifest.update(manifest_extra or {})
    if algorithm in (Algorithm.GBDT, Algorithm.GBDT_GOSS_EFB):
        config = GbdtConfig(**(params or {}))
        fancy = algorithm is Algorithm.GBDT_GOSS_EFB
        impl = train_gbdt(data.X, data.y, config, use_goss=fancy, use_efb=fancy)
    else:
        impl = _make_impl(algorithm, params).fit(data.X, data.y)
    return Model(algorithm=algorithm, manifest=manifest, impl=impl)


def predict(model: Model, data: Union[Dataset, np.ndarray],
            feature_names: Optional[tuple[str, ...]] = None) -> tuple[np.ndarray, np.ndarray]:
    """(labels, scores) for rows; named inputs are checked against the manifest."""
    if isinstance(data, Dataset):
        model.check_manifest(data.feature_names)
        X = data.X
    else:
        if feature_names is not None:
            model.check_manifest(tuple(feature_names))
        X = np.asarray(data, dtype=np.float64)
        if X.shape[1] != len(model.feature_names):
            raise ManifestError(
                f"expected {len(model.feature_names)} feature columns, got {X.shape[1]}")
    scores = model.impl.predict_score(X)
    labels = (scores >= 0.5).astype(np.int64)
    return labels, scores


def accuracy(model: Model, data: Dataset) -> float:
    labels, _ = predict(model, data)
    return float((labels == data.y).mean())


def save_model(model: Model, path: Union[str, Path]) -> None:
    payload = {
        "algorithm": model.algorithm.value,
        "manifest": model.manifest,
        "params": model.impl.to_dict(),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_model(path: Union[str, Path]) -> Model:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    algorithm = Algorithm(payload["algorithm"])
    params = payload["params"]
    if algorithm in (Algorithm.GBDT, Algorithm.GBDT_GOSS_EFB):
        impl: Any = GbdtModel.from_dict(params)
    elif algorithm is Algorithm.LOGREG:
        impl = LogisticModel.from_dict(params)
    elif algorithm is Algorithm.KNN:
        impl = KnnModel.from_dict(params)
    else:
        impl = CartModel.from_dict(params)
    return Model(algorithm=algorithm, manifest=payload["manifest"], impl=impl)


__all__ = [
    "Algorithm", "Bundle", "BinnedMatrix", "CartModel", "Dataset", "DatasetError",
    "GbdtConfig", "GbdtModel", "GbdtTree", "KnnModel", "LogisticModel", "ManifestError",
    "Model", "accuracy", "bin_column", "bin_matrix", "compute_bin_edges", "demux_column",
    "efb_bundle", "goss_sample", "load_model", "merge_column", "predict", "save_model",
    "singleton_bundles", "train", "train_gbdt",
]
