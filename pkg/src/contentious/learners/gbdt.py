"""Histogram gradient boosting with logistic loss.

Trees grow leaf-wise: a max-heap keyed on split gain picks the next leaf to
expand until max_leaves.  Candidate splits come from per-node histograms of
gradient/hessian sums over binned feature values; the chosen threshold is
stored as the raw edge value so inference traverses on raw features.

Both sampling (GOSS) and bundling (EFB) are optional and share this code
path: plain training is GOSS with every index at weight one and EFB with
singleton bundles, which keeps the degenerate configurations bitwise
identical to the plain model.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .binning import BinnedMatrix, bin_matrix
from .efb import Bundle, demux_column, efb_bundle, merge_column, singleton_bundles
from .goss import goss_sample

_MIN_GAIN = 1e-12
_PRIOR_EPS = 1e-12


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class GbdtConfig:
    num_trees: int = 100
    learning_rate: float = 0.1
    max_leaves: int = 8
    histogram_bins: int = 32
    min_samples_leaf: int = 20
    goss_a: float = 0.2
    goss_b: float = 0.1
    efb_max_conflict: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_trees < 1:
            raise ValueError("num_trees must be positive")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.max_leaves < 2:
            raise ValueError("max_leaves must be at least 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be positive")


@dataclass
class GbdtTree:
    """Flat node arrays; feature == -1 marks a leaf."""

    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)
    gain: list[float] = field(default_factory=list)
    n_samples: list[int] = field(default_factory=list)

    def add_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        self.gain.append(0.0)
        self.n_samples.append(0)
        return len(self.feature) - 1

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        """Route rows by raw-value thresholds; returns per-row leaf values."""
        out = np.zeros(X.shape[0], dtype=np.float64)
        if self.n_nodes == 0:
            return out
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if rows.size == 0:
                continue
            if self.feature[node] < 0:
                out[rows] = self.value[node]
                continue
            goes_left = X[rows, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], rows[goes_left]))
            stack.append((self.right[node], rows[~goes_left]))
        return out

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
            "gain": self.gain,
            "n_samples": self.n_samples,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GbdtTree":
        return cls(
            feature=[int(v) for v in d["feature"]],
            threshold=[float(v) for v in d["threshold"]],
            left=[int(v) for v in d["left"]],
            right=[int(v) for v in d["right"]],
            value=[float(v) for v in d["value"]],
            gain=[float(v) for v in d["gain"]],
            n_samples=[int(v) for v in d["n_samples"]],
        )


@dataclass
class GbdtModel:
    config: GbdtConfig
    base_score: float
    trees: list[GbdtTree]
    train_loss: list[float]
    n_features: int
    use_goss: bool
    use_efb: bool

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        F = np.full(X.shape[0], self.base_score, dtype=np.float64)
        for tree in self.trees:
            F += tree.predict_raw(X)
        return F

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision_function(X))

    def predict_label(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def gain_importance(self) -> np.ndarray:
        """Per-feature total split gain, normalised to sum 1 (zeros if no splits)."""
        totals = np.zeros(self.n_features, dtype=np.float64)
        for tree in self.trees:
            for node in range(tree.n_nodes):
                if tree.feature[node] >= 0:
                    totals[tree.feature[node]] += tree.gain[node]
        s = totals.sum()
        return totals / s if s > 0 else totals

    def to_dict(self) -> dict:
        return {
            "config": {
                "num_trees": self.config.num_trees,
                "learning_rate": self.config.learning_rate,
                "max_leaves": self.config.max_leaves,
                "histogram_bins": self.config.histogram_bins,
                "min_samples_leaf": self.config.min_samples_leaf,
                "goss_a": self.config.goss_a,
                "goss_b": self.config.goss_b,
                "efb_max_conflict": self.config.efb_max_conflict,
                "seed": self.config.seed,
            },
            "base_score": self.base_score,
            "trees": [t.to_dict() for t in self.trees],
            "train_loss": self.train_loss,
            "n_features": self.n_features,
            "use_goss": self.use_goss,
            "use_efb": self.use_efb,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GbdtModel":
        return cls(
            config=GbdtConfig(**d["config"]),
            base_score=float(d["base_score"]),
            trees=[GbdtTree.from_dict(t) for t in d["trees"]],
            train_loss=[float(v) for v in d["train_loss"]],
            n_features=int(d["n_features"]),
            use_goss=bool(d["use_goss"]),
            use_efb=bool(d["use_efb"]),
        )


@dataclass(frozen=True)
class _SplitChoice:
    gain: float
    feature: int
    bin_t: int
    threshold_raw: float


class _Grower:
    """Builds one tree from gradients over pre-binned, pre-bundled columns."""

    def __init__(self, binned: BinnedMatrix, bundles: list[Bundle],
                 merged: list[np.ndarray], config: GbdtConfig) -> None:
        self.binned = binned
        self.bundles = bundles
        self.merged = merged
        self.config = config
        # demuxed view per original feature; exact when its bundle is conflict-free
        self.view = np.empty_like(binned.bins)
        for bundle, col in zip(bundles, merged):
            for f in bundle.features:
                self.view[:, f] = demux_column(col, bundle, f)

    def _best_split(self, rows: np.ndarray, gw: np.ndarray, hw: np.ndarray,
                    G: float, H: float) -> Optional[_SplitChoice]:
        msl = self.config.min_samples_leaf
        n_node = rows.size
        if n_node < 2 * msl or H <= 0.0:
            return None
        base = G * G / H
        best: Optional[_SplitChoice] = None
        for f in range(self.binned.n_features):
            nb = self.binned.n_bins[f]
            if nb < 2:
                continue
            fbins = self.view[rows, f]
            hist_g = np.bincount(fbins, weights=gw, minlength=nb)
            hist_h = np.bincount(fbins, weights=hw, minlength=nb)
            hist_n = np.bincount(fbins, minlength=nb)
            cg = np.cumsum(hist_g)
            ch = np.cumsum(hist_h)
            cn = np.cumsum(hist_n)
            for t in range(nb - 1):
                n_left = int(cn[t])
                if n_left < msl or n_node - n_left < msl:
                    continue
                HL = ch[t]
                HR = H - HL
                if HL <= 0.0 or HR <= 0.0:
                    continue
                GL = cg[t]
                GR = G - GL
                gain = GL * GL / HL + GR * GR / HR - base
                if gain <= _MIN_GAIN:
                    continue
                if best is None or gain > best.gain or (
                        gain == best.gain and (f, t) < (best.feature, best.bin_t)):
                    best = _SplitChoice(gain=float(gain), feature=f, bin_t=t,
                                        threshold_raw=float(self.binned.edges[f][t]))
        return best

    def grow(self, g: np.ndarray, h: np.ndarray, sel: np.ndarray,
             w: np.ndarray) -> GbdtTree:
        cfg = self.config
        tree = GbdtTree()
        root = tree.add_node()
        gw_all = g[sel] * w
        hw_all = h[sel] * w

        # node id -> (row positions into sel, G, H)
        rows0 = np.arange(sel.size)
        G0 = float(gw_all.sum())
        H0 = float(hw_all.sum())
        state: dict[int, tuple[np.ndarray, float, float]] = {root: (rows0, G0, H0)}
        tree.n_samples[root] = int(sel.size)

        heap: list[tuple[float, int, int]] = []
        tick = itertools.count()
        pending: dict[int, _SplitChoice] = {}
        first = self._best_split(sel[rows0], gw_all[rows0], hw_all[rows0], G0, H0)
        if first is not None:
            pending[root] = first
            heapq.heappush(heap, (-first.gain, next(tick), root))

        leaves = 1
        while heap and leaves < cfg.max_leaves:
            _, _, node = heapq.heappop(heap)
            choice = pending.pop(node)
            rows, G, H = state.pop(node)
            fbins = self.view[sel[rows], choice.feature]
            left_mask = fbins <= choice.bin_t

            left = tree.add_node()
            right = tree.add_node()
            tree.feature[node] = choice.feature
            tree.threshold[node] = choice.threshold_raw
            tree.left[node] = left
            tree.right[node] = right
            tree.gain[node] = choice.gain

            for child, mask in ((left, left_mask), (right, ~left_mask)):
                crows = rows[mask]
                cgw = gw_all[crows]
                chw = hw_all[crows]
                cG = float(cgw.sum())
                cH = float(chw.sum())
                state[child] = (crows, cG, cH)
                tree.n_samples[child] = int(crows.size)
                sub = self._best_split(sel[crows], cgw, chw, cG, cH)
                if sub is not None:
                    pending[child] = sub
                    heapq.heappush(heap, (-sub.gain, next(tick), child))
            leaves += 1

        no_split = tree.n_nodes == 1
        for node, (rows, G, H) in state.items():
            if no_split or H <= 0.0:
                tree.value[node] = 0.0
            else:
                tree.value[node] = -cfg.learning_rate * G / H
        return tree

    def apply_binned(self, tree: GbdtTree) -> np.ndarray:
        """Leaf values for all training rows, routed on the binned view."""
        n = self.binned.bins.shape[0]
        out = np.zeros(n, dtype=np.float64)
        if tree.n_nodes == 0:
            return out
        # bin_t is recoverable from the raw threshold: bin <= t  <=>  x <= edges[t]
        stack = [(0, np.arange(n))]
        while stack:
            node, rows = stack.pop()
            if rows.size == 0:
                continue
            f = tree.feature[node]
            if f < 0:
                out[rows] = tree.value[node]
                continue
            t = int(np.searchsorted(self.binned.edges[f], tree.threshold[node], side="left"))
            goes_left = self.view[rows, f] <= t
            stack.append((tree.left[node], rows[goes_left]))
            stack.append((tree.right[node], rows[~goes_left]))
        return out


def train_gbdt(X: np.ndarray, y: np.ndarray, config: GbdtConfig,
               use_goss: bool = False, use_efb: bool = False) -> GbdtModel:
    """Fit the boosted ensemble; single-class targets yield a prior-only model."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    if n == 0:
        raise ValueError("cannot train on an empty dataset")

    binned = bin_matrix(X, config.histogram_bins)
    if use_efb:
        bundles = efb_bundle(binned.bins, binned.n_bins, config.efb_max_conflict)
    else:
        bundles = singleton_bundles(binned.n_bins)
    merged = [merge_column(binned.bins, b) for b in bundles]
    grower = _Grower(binned, bundles, merged, config)

    prior = min(max(float(y.mean()), _PRIOR_EPS), 1.0 - _PRIOR_EPS)
    base = math.log(prior / (1.0 - prior))
    F = np.full(n, base, dtype=np.float64)
    rng = np.random.default_rng(config.seed)

    trees: list[GbdtTree] = []
    losses: list[float] = []
    for _ in range(config.num_trees):
        p = _sigmoid(F)
        g = p - y
        h = p * (1.0 - p)
        if use_goss:
            sel, w = goss_sample(g, config.goss_a, config.goss_b, rng)
        else:
            sel = np.arange(n, dtype=np.int64)
            w = np.ones(n, dtype=np.float64)
        tree = grower.grow(g, h, sel, w)
        F += grower.apply_binned(tree)
        losses.append(float(np.mean(np.logaddexp(0.0, F) - y * F)))
        trees.append(tree)

    return GbdtModel(config=config, base_score=base, trees=trees,
                     train_loss=losses, n_features=X.shape[1],
                     use_goss=use_goss, use_efb=use_efb)
