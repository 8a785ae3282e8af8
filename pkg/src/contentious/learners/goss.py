"""Gradient-based one-side sampling.

Keeps every sample in the top ceil(a*N) by |gradient| at weight 1 and a
uniform ceil(b*N)-subset of the rest at weight (1-a)/b, which restores the
small-gradient mass in expectation.  Returned indices are ascending so that
downstream weighted sums visit samples in the same order as unsampled
training; with a + b = 1 the result is all indices at weight 1.
"""
from __future__ import annotations

import math

import numpy as np


def goss_sample(gradients: np.ndarray, a: float, b: float,
                rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Select (indices, weights) for one boosting round.

    Ties in |gradient| break toward the lower sample index.  a = b = 0
    would keep nothing and is rejected.
    """
    gradients = np.asarray(gradients, dtype=np.float64)
    n = gradients.shape[0]
    if n == 0:
        raise ValueError("cannot sample from zero gradients")
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ValueError(f"sampling fractions must lie in [0, 1], got a={a} b={b}")
    if a + b > 1.0 + 1e-12:
        raise ValueError(f"a + b must not exceed 1, got {a + b}")
    if a == 0.0 and b == 0.0:
        raise ValueError("a = b = 0 keeps no samples")

    n_top = math.ceil(a * n)
    order = np.argsort(-np.abs(gradients), kind="stable")
    top = order[:n_top]
    rest = order[n_top:]

    n_small = min(math.ceil(b * n), rest.size)
    if b == 0.0:
        n_small = 0
    chosen = rng.choice(rest, size=n_small, replace=False) if n_small > 0 else \
        np.empty(0, dtype=np.int64)

    weights = np.zeros(n, dtype=np.float64)
    weights[top] = 1.0
    if n_small > 0:
        weights[chosen] = (1.0 - a) / b
    indices = np.sort(np.concatenate([top, chosen]).astype(np.int64))
    return indices, weights[indices]
