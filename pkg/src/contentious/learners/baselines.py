"""Reference classifiers: logistic regression, k-nearest-neighbour, CART.

All three are deterministic by construction — fixed iteration counts, stable
sorts, and explicit tie-breaks — so repeated runs on the same split agree
bitwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(mean=mean, scale=scale)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(mean=np.asarray(d["mean"], dtype=np.float64),
                   scale=np.asarray(d["scale"], dtype=np.float64))


@dataclass
class LogisticModel:
    """L2-regularised logistic regression fitted by Newton iterations."""

    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bias: float = 0.0
    standardizer: Optional[Standardizer] = None
    max_iter: int = 50
    ridge: float = 1e-6
    tol: float = 1e-10

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LogisticModel":
        classes = np.unique(y)
        if classes.size < 2:
            raise ValueError(
                f"logistic regression needs both classes in training data, got {classes.tolist()}")
        self.standardizer = Standardizer.fit(X)
        Z = self.standardizer.transform(X)
        n, k = Z.shape
        A = np.hstack([Z, np.ones((n, 1))])
        beta = np.zeros(k + 1)
        reg = np.full(k + 1, self.ridge)
        reg[-1] = 0.0  # bias stays unpenalised
        for _ in range(self.max_iter):
            p = _sigmoid(A @ beta)
            grad = A.T @ (p - y) / n + reg * beta
            s = np.clip(p * (1.0 - p), 1e-12, None)
            hess = (A.T * s) @ A / n + np.diag(reg)
            step = np.linalg.solve(hess, grad)
            beta -= step
            if float(np.max(np.abs(step))) < self.tol:
                break
        self.weights = beta[:-1]
        self.bias = float(beta[-1])
        return self

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        Z = self.standardizer.transform(X)
        return _sigmoid(Z @ self.weights + self.bias)

    def predict_label(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": self.bias,
                "standardizer": self.standardizer.to_dict(),
                "max_iter": self.max_iter, "ridge": self.ridge, "tol": self.tol}

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        m = cls(max_iter=int(d["max_iter"]), ridge=float(d["ridge"]), tol=float(d["tol"]))
        m.weights = np.asarray(d["weights"], dtype=np.float64)
        m.bias = float(d["bias"])
        m.standardizer = Standardizer.from_dict(d["standardizer"])
        return m


@dataclass
class KnnModel:
    """k-nearest-neighbour vote on z-scored features, Euclidean metric.

    Distance ties resolve toward the lower training-row index (stable sort),
    so predictions never depend on dict or argsort internals.
    """

    k: int = 5
    X: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    y: np.ndarray = field(default_factory=lambda: np.zeros(0))
    standardizer: Optional[Standardizer] = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnModel":
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.k > X.shape[0]:
            raise ValueError(f"k={self.k} exceeds training size {X.shape[0]}")
        self.standardizer = Standardizer.fit(X)
        self.X = self.standardizer.transform(X)
        self.y = np.asarray(y, dtype=np.int64)
        return self

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        Z = self.standardizer.transform(X)
        scores = np.empty(Z.shape[0], dtype=np.float64)
        for i in range(Z.shape[0]):
            dist = np.sqrt(((self.X - Z[i]) ** 2).sum(axis=1))
            order = np.argsort(dist, kind="stable")[: self.k]
            scores[i] = float(self.y[order].mean())
        return scores

    def predict_label(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {"k": self.k, "X": self.X.tolist(), "y": self.y.tolist(),
                "standardizer": self.standardizer.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "KnnModel":
        m = cls(k=int(d["k"]))
        m.X = np.asarray(d["X"], dtype=np.float64)
        m.y = np.asarray(d["y"], dtype=np.int64)
        m.standardizer = Standardizer.from_dict(d["standardizer"])
        return m


@dataclass
class CartModel:
    """Binary CART with gini impurity and exact midpoint thresholds.

    Equal-gain candidates resolve to the lowest feature index, then the
    lowest threshold.  Leaf score is the class-1 fraction.
    """

    max_depth: int = 10
    min_samples_leaf: int = 1
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    score: list[float] = field(default_factory=list)

    def _add(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.score.append(0.0)
        return len(self.feature) - 1

    @staticmethod
    def _gini(y: np.ndarray) -> float:
        if y.size == 0:
            return 0.0
        p = float(y.mean())
        return 2.0 * p * (1.0 - p)

    def _best_split(self, X: np.ndarray, y: np.ndarray) -> Optional[tuple[int, float, float]]:
        n = y.size
        parent = self._gini(y)
        if parent == 0.0 or n < 2 * self.min_samples_leaf:
            return None
        best: Optional[tuple[int, float, float]] = None  # (gain, feature, threshold)
        for f in range(X.shape[1]):
            col = X[:, f]
            order = np.argsort(col, kind="stable")
            sx = col[order]
            sy = y[order]
            ones_left = np.cumsum(sy)
            total_ones = int(ones_left[-1])
            for cut in range(1, n):
                if sx[cut] == sx[cut - 1]:
                    continue
                if cut < self.min_samples_leaf or n - cut < self.min_samples_leaf:
                    continue
                nl, nr = cut, n - cut
                pl = float(ones_left[cut - 1]) / nl
                pr = float(total_ones - ones_left[cut - 1]) / nr
                child = (nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr)) / n
                gain = parent - child
                if gain <= 1e-12:
                    continue
                thr = (float(sx[cut - 1]) + float(sx[cut])) / 2.0
                cand = (gain, f, thr)
                if best is None or gain > best[0] or (
                        gain == best[0] and (f, thr) < (best[1], best[2])):
                    best = cand
        return best

    def _build(self, X: np.ndarray, y: np.ndarray, depth: int) -> int:
        node = self._add()
        self.score[node] = float(y.mean()) if y.size else 0.0
        if depth >= self.max_depth:
            return node
        found = self._best_split(X, y)
        if found is None:
            return node
        _, f, thr = found
        mask = X[:, f] <= thr
        self.feature[node] = f
        self.threshold[node] = thr
        self.left[node] = self._build(X[mask], y[mask], depth + 1)
        self.right[node] = self._build(X[~mask], y[~mask], depth + 1)
        return node

    def fit(self, X: np.ndarray, y: np.ndarray) -> "CartModel":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.shape[0] == 0:
            raise ValueError("cannot fit a tree on an empty dataset")
        self._build(X, y, 0)
        return self

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.float64)
        for i in range(X.shape[0]):
            node = 0
            while self.feature[node] >= 0:
                node = self.left[node] if X[i, self.feature[node]] <= self.threshold[node] \
                    else self.right[node]
            out[i] = self.score[node]
        return out

    def predict_label(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {"max_depth": self.max_depth, "min_samples_leaf": self.min_samples_leaf,
                "feature": self.feature, "threshold": self.threshold,
                "left": self.left, "right": self.right, "score": self.score}

    @classmethod
    def from_dict(cls, d: dict) -> "CartModel":
        m = cls(max_depth=int(d["max_depth"]), min_samples_leaf=int(d["min_samples_leaf"]))
        m.feature = [int(v) for v in d["feature"]]
        m.threshold = [float(v) for v in d["threshold"]]
        m.left = [int(v) for v in d["left"]]
        m.right = [int(v) for v in d["right"]]
        m.score = [float(v) for v in d["score"]]
        return m
