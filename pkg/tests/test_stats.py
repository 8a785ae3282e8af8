"""Distribution tests and feature-importance rankings."""
import numpy as np
import pytest

from contentious.learners import Algorithm, train
from contentious.learners.dataset import Dataset
from contentious.stats import (
    ImportanceReport, gain_importance, ks_by_label, ks_grid, ks_two_sample,
    permutation_importance,
)


def oracle_ks(a, b):
    """Brute-force sup over every pooled evaluation point."""
    pooled = np.concatenate([a, b])
    best = 0.0
    for x in pooled:
        fa = np.mean(a <= x)
        fb = np.mean(b <= x)
        best = max(best, abs(fa - fb))
    return best


def test_ks_identical_samples():
    res = ks_two_sample(np.array([1.0, 2.0, 3.0]), np.array([1.0, 2.0, 3.0]))
    assert res.statistic == 0.0
    assert res.p_value == 1.0


def test_ks_frozen_example():
    res = ks_two_sample(np.array([1.0, 2.0, 3.0]),
                        np.array([1.0, 2.0, 3.0, 1000.0]))
    assert res.statistic == 0.25


def test_ks_disjoint_supports():
    res = ks_two_sample(np.zeros(3), np.ones(3))
    assert res.statistic == 1.0
    assert res.p_value < 0.2


def test_ks_empty_sample_rejected():
    with pytest.raises(ValueError):
        ks_two_sample(np.array([]), np.array([1.0]))


def test_ks_oracle_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n1 = int(rng.integers(1, 60))
        n2 = int(rng.integers(1, 60))
        a = rng.normal(size=n1)
        b = rng.normal(loc=rng.uniform(-1, 1), size=n2)
        if rng.random() < 0.3:
            a = np.round(a)  # force ties across samples
            b = np.round(b)
        res = ks_two_sample(a, b)
        assert abs(res.statistic - oracle_ks(a, b)) <= 1e-12
        assert res.n_a == n1 and res.n_b == n2
        assert 0.0 <= res.p_value <= 1.0


def test_ks_symmetry_and_monotone_invariance():
    rng = np.random.default_rng(1)
    a = rng.normal(size=40)
    b = rng.normal(loc=0.4, size=35)
    d_ab = ks_two_sample(a, b).statistic
    d_ba = ks_two_sample(b, a).statistic
    assert d_ab == d_ba
    transform = lambda x: x ** 3 + 7
    d_t = ks_two_sample(transform(a), transform(b)).statistic
    assert d_t == d_ab


def _labeled_dataset(seed=0, n=60):
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], n // 2)
    X = np.column_stack([
        rng.normal(loc=y * 1.5, scale=1.0),   # informative
        rng.normal(size=n),                   # noise
    ])
    return Dataset(X, y.astype(np.int64), ("sig", "noise"),
                   tuple(f"r{i}" for i in range(n)))


def test_ks_by_label_flags_informative_feature():
    data = _labeled_dataset()
    results = dict(ks_by_label(data))
    assert results["sig"].p_value < 0.05
    assert results["sig"].statistic > results["noise"].statistic


def test_ks_by_label_single_class_rejected():
    X = np.zeros((4, 1))
    data = Dataset(X, np.zeros(4, dtype=np.int64), ("a",),
                   ("r0", "r1", "r2", "r3"))
    with pytest.raises(ValueError):
        ks_by_label(data)


def test_ks_grid_pairs_sorted():
    rng = np.random.default_rng(2)
    groups = {
        "beta": rng.normal(size=(10, 2)),
        "alpha": rng.normal(size=(12, 2)),
        "gamma": rng.normal(loc=2.0, size=(11, 2)),
    }
    rows = ks_grid(groups, ("x", "y"))
    pairs = {(g1, g2) for g1, g2, _, _ in rows}
    assert pairs == {("alpha", "beta"), ("alpha", "gamma"), ("beta", "gamma")}
    assert len(rows) == 6


# ---------------------------------------------------------------------------
# importance

def test_permutation_importance_constant_feature_zero():
    rng = np.random.default_rng(3)
    n = 80
    y = np.repeat([0, 1], n // 2).astype(np.int64)
    X = np.column_stack([rng.normal(loc=y * 2.0), np.full(n, 7.0)])
    data = Dataset(X, y, ("sig", "const"), tuple(f"r{i}" for i in range(n)))
    model = train(Algorithm.LOGREG, data)
    report = permutation_importance(model, data, seed=0, repeats=10)
    values = dict(zip(report.feature_names, report.values))
    assert values["const"] == 0.0
    assert values["sig"] > 0.1


def test_permutation_importance_label_copy_ranks_first():
    rng = np.random.default_rng(4)
    n = 100
    y = rng.integers(0, 2, size=n).astype(np.int64)
    X = np.column_stack([y.astype(float), rng.normal(size=n),
                         rng.normal(size=n)])
    data = Dataset(X, y, ("copy", "n1", "n2"),
                   tuple(f"r{i}" for i in range(n)))
    model = train(Algorithm.DTREE, data)
    report = permutation_importance(model, data, seed=1, repeats=10)
    assert report.ranking()[0][0] == "copy"


def test_permutation_importance_duplicated_column_dilution():
    rng = np.random.default_rng(5)
    n = 200
    y = np.repeat([0, 1], n // 2).astype(np.int64)
    signal = rng.normal(loc=y * 2.0)
    lone = Dataset(np.column_stack([signal, rng.normal(size=n)]),
                   y, ("sig", "noise"), tuple(f"r{i}" for i in range(n)))
    dup = Dataset(np.column_stack([signal, signal, rng.normal(size=n)]),
                  y, ("sig", "sig2", "noise"),
                  tuple(f"r{i}" for i in range(n)))
    lone_model = train(Algorithm.LOGREG, lone)
    dup_model = train(Algorithm.LOGREG, dup)
    lone_imp = permutation_importance(lone_model, lone, seed=2, repeats=10)
    dup_imp = permutation_importance(dup_model, dup, seed=2, repeats=10)
    lone_sig = dict(zip(lone_imp.feature_names, lone_imp.values))["sig"]
    dup_values = dict(zip(dup_imp.feature_names, dup_imp.values))
    assert dup_values["sig"] <= lone_sig + 1e-12
    assert dup_values["sig2"] <= lone_sig + 1e-12


def test_permutation_importance_validation_and_determinism():
    data = _labeled_dataset(seed=6)
    model = train(Algorithm.LOGREG, data)
    with pytest.raises(ValueError):
        permutation_importance(model, data, repeats=0)
    a = permutation_importance(model, data, seed=3, repeats=5)
    b = permutation_importance(model, data, seed=3, repeats=5)
    assert np.array_equal(a.values, b.values)


def test_gain_importance_single_split():
    raw = np.array([0.0, 0.0, 1.0, 1.0] * 10)
    y = raw.astype(np.int64)
    X = np.column_stack([raw, np.zeros_like(raw)])
    data = Dataset(X, y, ("live", "dead"), tuple(f"r{i}" for i in range(40)))
    model = train(Algorithm.GBDT, data,
                  {"num_trees": 1, "min_samples_leaf": 1, "seed": 0})
    report = gain_importance(model)
    values = dict(zip(report.feature_names, report.values))
    assert values["live"] == 1.0
    assert values["dead"] == 0.0


def test_gain_importance_constant_model_all_zero():
    X = np.random.default_rng(7).normal(size=(20, 2))
    y = np.ones(20, dtype=np.int64)
    data = Dataset(X, y, ("a", "b"), tuple(f"r{i}" for i in range(20)))
    model = train(Algorithm.GBDT, data, {"num_trees": 3, "seed": 0})
    report = gain_importance(model)
    assert np.all(np.asarray(report.values) == 0.0)


def test_gain_importance_sums_to_one():
    data = _labeled_dataset(seed=8, n=120)
    model = train(Algorithm.GBDT, data,
                  {"num_trees": 15, "min_samples_leaf": 3, "seed": 0})
    report = gain_importance(model)
    assert sum(report.values) == pytest.approx(1.0, abs=1e-12)


def test_gain_importance_rejects_non_tree_model():
    data = _labeled_dataset(seed=9)
    model = train(Algorithm.LOGREG, data)
    with pytest.raises(ValueError):
        gain_importance(model)


def test_ranking_orders_by_value_then_index():
    report = ImportanceReport(feature_names=("a", "b", "c"),
                              values=(0.1, 0.5, 0.1), method="permutation")
    assert [name for name, _ in report.ranking()] == ["b", "a", "c"]
