"""Experiment orchestration: splits, the algorithm x feature-mode accuracy
matrix, hot-comment ("one page") runs, early-detection horizons, importance
rankings, and KS tables, all seeded end to end.

Everything written to report.json is a pure function of (config, seeds), so
reruns are byte-identical; wall-clock timing goes to the log stream only.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .features import (
    DEMO_LEXICON,
    FEATURE_NAMES,
    FeatureConfig,
    FeatureMode,
    FeatureVector,
    Lexicon,
    MODE_FEATURES,
    ONE_PAGE_FEATURES,
    compute_feature_values,
    load_lexicon,
    mask_vector,
)
from .features.text import score_text
from .learners import Algorithm, Dataset, GbdtConfig, GbdtModel, Model, predict, train
from .stats import gain_importance, ks_by_label, ks_grid, permutation_importance
from .synth import SyntheticParams, synth_trees
from .threads import CommentTree, DataError, RepairPolicy, build_tree, load_trees


def time_slice(tree: CommentTree, horizon: int) -> CommentTree:
    """Tree restricted to comments within `horizon` seconds of the post.

    Rebuilding with the drop policy removes descendants whose parents fall
    outside the window (possible only under clock skew).
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    cutoff = tree.post.post_time + horizon
    kept = [tree.comments[cid] for cid in tree.comment_ids()
            if tree.comments[cid].comment_time <= cutoff]
    return build_tree(tree.post, kept, RepairPolicy.DROP)


@dataclass(frozen=True)
class OnePageView:
    """Hot comments, their direct replies, and the hot->reply link pairs."""

    hot: tuple[str, ...]
    retained: tuple[str, ...]
    links: tuple[tuple[str, str], ...]


def one_page_filter(tree: CommentTree, ratio: float) -> OnePageView:
    """Top ceil(ratio*n) comments by likes plus their direct replies.

    Like ties at the cutoff go to the lower comment_id.
    """
    if not 0.0 < ratio <= 1.0:
        raise ValueError("ratio must be in (0, 1]")
    ids = tree.comment_ids()
    if not ids:
        return OnePageView(hot=(), retained=(), links=())
    by_heat = sorted(ids, key=lambda cid: (-tree.comments[cid].likes, cid))
    hot = sorted(by_heat[: math.ceil(ratio * len(ids))])
    retained = set(hot)
    links = []
    for h in hot:
        for child in tree.children.get(h, ()):
            retained.add(child)
            links.append((h, child))
    return OnePageView(hot=tuple(hot), retained=tuple(sorted(retained)),
                       links=tuple(links))


def one_page_vector(tree: CommentTree, ratio: float,
                    lexicon: Lexicon = DEMO_LEXICON,
                    config: FeatureConfig = FeatureConfig()) -> FeatureVector:
    """The 9 one-page features over the retained subgraph.

    Global shape features (d, b, k, v) are unavailable on a single page and
    stay zeroed; reply intervals and gradients use the hot->reply links
    only; reply counts are visible-subgraph counts, so ratio 1.0 reproduces
    the full-tree gradients exactly.
    """
    view = one_page_filter(tree, ratio)
    values = {name: 0.0 for name in FEATURE_NAMES}

    def _score(text: str) -> float:
        s = score_text(text, lexicon)
        return abs(s) if config.absolute_sentiment else s

    if view.retained:
        kept = [tree.comments[cid] for cid in view.retained]
        retained_set = set(view.retained)
        values["n"] = float(len(kept))
        span = max(c.comment_time for c in kept) - tree.post.post_time
        values["c"] = len(kept) / max(span, 1)
        values["q"] = sum(c.likes for c in kept) / len(kept)
        values["s_c"] = sum(_score(c.text) for c in kept) / len(kept)
    values["s_p"] = _score(tree.post.text)
    if view.links:
        intervals = [max(tree.comments[c].comment_time - tree.comments[p].comment_time, 0)
                     for p, c in view.links]
        values["t_min"] = float(min(intervals))
        values["t_avg"] = sum(intervals) / len(intervals)

        def visible_replies(cid: str) -> int:
            return sum(1 for k in tree.children.get(cid, ()) if k in retained_set)

        values["p_a"] = sum(
            1 for p, c in view.links
            if tree.comments[p].likes < tree.comments[c].likes) / len(view.links)
        values["p_t"] = sum(
            1 for p, c in view.links
            if visible_replies(p) < visible_replies(c)) / len(view.links)
    return mask_vector(tree.post.post_id, tree.post.controversy_label,
                       values, ONE_PAGE_FEATURES)


_MODE_ORDER = (FeatureMode.STRUCTURE, FeatureMode.INTERACTION,
               FeatureMode.TEXT, FeatureMode.PSYCHOLOGY)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; hashable to a stable run id."""

    posts_path: Optional[str] = None
    comments_path: Optional[str] = None
    synthetic: Optional[SyntheticParams] = field(
        default_factory=lambda: SyntheticParams())
    train_fraction: float = 0.7
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    algorithms: tuple[Algorithm, ...] = (
        Algorithm.LOGREG, Algorithm.KNN, Algorithm.DTREE,
        Algorithm.GBDT, Algorithm.GBDT_GOSS_EFB)
    modes: tuple[FeatureMode, ...] = _MODE_ORDER
    one_page_ratios: tuple[float, ...] = (1.0, 0.2)
    time_horizons: tuple[int, ...] = (10800, 21600, 32400, 86400)
    lexicon_path: Optional[str] = None
    output_dir: str = "out"
    detail_algorithm: Algorithm = Algorithm.GBDT_GOSS_EFB
    importance_repeats: int = 10
    gbdt_params: dict = field(default_factory=dict)
    knn_k: int = 5
    make_plots: bool = False
    feature_config: FeatureConfig = field(default_factory=FeatureConfig)

    def __post_init__(self) -> None:
        has_files = self.posts_path is not None and self.comments_path is not None
        if not has_files and self.synthetic is None:
            raise ValueError("config needs either dataset paths or synthetic parameters")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not self.algorithms or not self.modes:
            raise ValueError("algorithms and modes must be non-empty")
        for r in self.one_page_ratios:
            if not 0.0 < r <= 1.0:
                raise ValueError(f"one-page ratio {r} outside (0, 1]")
        for a, b in zip(self.time_horizons, self.time_horizons[1:]):
            if b <= a:
                raise ValueError("time_horizons must be strictly increasing")
        if any(h <= 0 for h in self.time_horizons):
            raise ValueError("time_horizons must be positive")
        if self.importance_repeats < 1:
            raise ValueError("importance_repeats must be at least 1")

    def to_dict(self) -> dict:
        """Scientifically meaningful fields only; destination dirs excluded."""
        synth = None
        if self.synthetic is not None:
            synth = {
                "num_posts": self.synthetic.num_posts,
                "seed": self.synthetic.seed,
                "max_size": self.synthetic.max_size,
                "topics_per_class": self.synthetic.topics_per_class,
                "controversial": vars(self.synthetic.controversial).copy(),
                "neutral": vars(self.synthetic.neutral).copy(),
            }
        return {
            "posts_path": self.posts_path,
            "comments_path": self.comments_path,
            "synthetic": synth,
            "train_fraction": self.train_fraction,
            "seeds": list(self.seeds),
            "algorithms": [a.value for a in self.algorithms],
            "modes": [m.value for m in self.modes],
            "one_page_ratios": list(self.one_page_ratios),
            "time_horizons": list(self.time_horizons),
            "lexicon_path": self.lexicon_path,
            "detail_algorithm": self.detail_algorithm.value,
            "importance_repeats": self.importance_repeats,
            "gbdt_params": dict(sorted(self.gbdt_params.items())),
            "knn_k": self.knn_k,
            "include_root_links_in_reply_time":
                self.feature_config.include_root_links_in_reply_time,
            "absolute_sentiment": self.feature_config.absolute_sentiment,
        }

    def run_id(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:12]


def _class_params_from_dict(d: dict):
    from .synth import ClassParams
    return ClassParams(**d)


def config_from_toml(path: str) -> ExperimentConfig:
    """Load an experiment config; unknown keys are rejected by name."""
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"config {path} is not valid TOML: {exc}") from exc

    known = {"dataset", "synthetic", "split", "run", "gbdt", "features"}
    unknown = set(raw) - known
    if unknown:
        raise DataError(f"config {path}: unknown sections {sorted(unknown)}")
    known_keys = {
        "dataset": {"posts", "comments"},
        "split": {"train_fraction", "seeds"},
        "run": {"algorithms", "modes", "one_page_ratios", "one_page_ratio",
                "time_horizons", "lexicon", "output", "detail_algorithm",
                "importance_repeats", "knn_k", "plots"},
        "features": {"include_root_links_in_reply_time", "absolute_sentiment"},
    }
    for section, allowed in known_keys.items():
        extra = set(raw.get(section, {})) - allowed
        if extra:
            raise DataError(f"config {path}: unknown [{section}] keys {sorted(extra)}")

    kwargs: dict = {}
    dataset = raw.get("dataset", {})
    if dataset:
        kwargs["posts_path"] = dataset.get("posts")
        kwargs["comments_path"] = dataset.get("comments")
        kwargs["synthetic"] = None
    if "synthetic" in raw:
        syn = dict(raw["synthetic"])
        cls_kwargs = {}
        try:
            for side in ("controversial", "neutral"):
                if side in syn:
                    cls_kwargs[side] = _class_params_from_dict(syn.pop(side))
            kwargs["synthetic"] = SyntheticParams(**syn, **cls_kwargs)
        except (TypeError, ValueError) as exc:
            raise DataError(f"config {path}: [synthetic] {exc}") from exc
    try:
        split = raw.get("split", {})
        if "train_fraction" in split:
            kwargs["train_fraction"] = float(split["train_fraction"])
        if "seeds" in split:
            kwargs["seeds"] = tuple(int(s) for s in split["seeds"])
        run = raw.get("run", {})
        if "algorithms" in run:
            kwargs["algorithms"] = tuple(Algorithm(a) for a in run["algorithms"])
        if "modes" in run:
            kwargs["modes"] = tuple(FeatureMode(m) for m in run["modes"])
        if "one_page_ratios" in run:
            ratios = run["one_page_ratios"]
            kwargs["one_page_ratios"] = tuple(float(r) for r in (
                ratios if isinstance(ratios, list) else [ratios]))
        elif "one_page_ratio" in run:
            kwargs["one_page_ratios"] = (float(run["one_page_ratio"]),)
        if "time_horizons" in run:
            kwargs["time_horizons"] = tuple(int(h) for h in run["time_horizons"])
        if "lexicon" in run and run["lexicon"]:
            kwargs["lexicon_path"] = str(run["lexicon"])
        if "output" in run:
            kwargs["output_dir"] = str(run["output"])
        if "detail_algorithm" in run:
            kwargs["detail_algorithm"] = Algorithm(run["detail_algorithm"])
        if "importance_repeats" in run:
            kwargs["importance_repeats"] = int(run["importance_repeats"])
        if "knn_k" in run:
            kwargs["knn_k"] = int(run["knn_k"])
        if "plots" in run:
            kwargs["make_plots"] = bool(run["plots"])
        if "gbdt" in raw:
            kwargs["gbdt_params"] = dict(raw["gbdt"])
        feats = raw.get("features", {})
        kwargs["feature_config"] = FeatureConfig(
            include_root_links_in_reply_time=bool(
                feats.get("include_root_links_in_reply_time", True)),
            absolute_sentiment=bool(feats.get("absolute_sentiment", False)),
        )
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise DataError(f"config {path}: {exc}") from exc


@dataclass
class Report:
    """Everything run_experiment measured; JSON view excludes wall-clock."""

    run_id: str
    config: dict
    matrix: dict
    early_detection: dict
    one_page: dict
    importance: dict
    ks: dict
    runtime_seconds: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "config": self.config,
            "matrix": self.matrix,
            "early_detection": self.early_detection,
            "one_page": self.one_page,
            "importance": self.importance,
            "ks": self.ks,
        }


def _log(stream: Optional[TextIO], message: str) -> None:
    if stream is not None:
        print(message, file=stream, flush=True)


def _train_cell(algorithm: Algorithm, data: Dataset, seed: int,
                config: ExperimentConfig) -> Model:
    if algorithm in (Algorithm.GBDT, Algorithm.GBDT_GOSS_EFB):
        params = dict(config.gbdt_params)
        params["seed"] = seed
        return train(algorithm, data, params=params)
    if algorithm is Algorithm.KNN:
        return train(algorithm, data, params={"k": config.knn_k})
    return train(algorithm, data)


def _cell_accuracies(algorithm: Algorithm, data: Dataset,
                     config: ExperimentConfig) -> list[float]:
    accs = []
    for seed in config.seeds:
        train_set, test_set = data.split_stratified(config.train_fraction, seed)
        model = _train_cell(algorithm, train_set, seed, config)
        labels, _ = predict(model, test_set)
        accs.append(float((labels == test_set.y).mean()))
    return accs


def _mode_dataset(values_list: list[dict], trees: list[CommentTree],
                  active: Sequence[str]) -> Dataset:
    vectors = [
        mask_vector(tree.post.post_id, tree.post.controversy_label, values, active)
        for values, tree in zip(values_list, trees)
    ]
    return Dataset.from_vectors(vectors, feature_names=tuple(active))


def _accuracy_block(values_list: list[dict], trees: list[CommentTree],
                    algorithms: Sequence[Algorithm], modes: Sequence[FeatureMode],
                    config: ExperimentConfig) -> dict:
    block: dict = {}
    datasets = {mode: _mode_dataset(values_list, trees, MODE_FEATURES[mode])
                for mode in modes}
    for algorithm in algorithms:
        block[algorithm.value] = {}
        for mode in modes:
            accs = _cell_accuracies(algorithm, datasets[mode], config)
            block[algorithm.value][mode.value] = {
                "per_seed": accs,
                "mean": float(np.mean(accs)),
            }
    return block


def load_config_trees(config: ExperimentConfig) -> list[CommentTree]:
    if config.posts_path is not None and config.comments_path is not None:
        return load_trees(config.posts_path, config.comments_path)
    assert config.synthetic is not None
    return synth_trees(config.synthetic)


def run_experiment(config: ExperimentConfig,
                   log: Optional[TextIO] = sys.stderr) -> Report:
    started = time.monotonic()
    run_id = config.run_id()
    _log(log, f"run {run_id}: loading data")
    trees = load_config_trees(config)
    if not trees:
        raise DataError("no trees to evaluate")
    lexicon = (load_lexicon(config.lexicon_path)
               if config.lexicon_path else DEMO_LEXICON)

    values_list = [compute_feature_values(t, lexicon, config.feature_config)[0]
                   for t in trees]

    _log(log, f"run {run_id}: accuracy matrix "
              f"({len(config.algorithms)} algorithms x {len(config.modes)} modes)")
    matrix = _accuracy_block(values_list, trees, config.algorithms,
                             config.modes, config)

    early: dict = {}
    for horizon in config.time_horizons:
        _log(log, f"run {run_id}: early detection at {horizon} s")
        sliced = [time_slice(t, horizon) for t in trees]
        sliced_values = [compute_feature_values(t, lexicon, config.feature_config)[0]
                         for t in sliced]
        early[str(horizon)] = _accuracy_block(
            sliced_values, trees, [config.detail_algorithm], config.modes,
            config)[config.detail_algorithm.value]

    one_page: dict = {}
    for ratio in config.one_page_ratios:
        _log(log, f"run {run_id}: one-page ratio {ratio}")
        vectors = [one_page_vector(t, ratio, lexicon, config.feature_config)
                   for t in trees]
        data = Dataset.from_vectors(vectors, feature_names=ONE_PAGE_FEATURES)
        accs = _cell_accuracies(config.detail_algorithm, data, config)
        one_page[repr(float(ratio))] = {"per_seed": accs, "mean": float(np.mean(accs))}

    _log(log, f"run {run_id}: importance ({config.importance_repeats} repeats)")
    psych_data = _mode_dataset(values_list, trees, FEATURE_NAMES)
    perm_per_seed = []
    perm_values = []
    gain_values = []
    for seed in config.seeds:
        train_set, test_set = psych_data.split_stratified(config.train_fraction, seed)
        model = _train_cell(config.detail_algorithm, train_set, seed, config)
        perm = permutation_importance(model, test_set, seed=seed,
                                      repeats=config.importance_repeats)
        perm_per_seed.append(perm.ranking()[0][0])
        perm_values.append(perm.values)
        if isinstance(model.impl, GbdtModel):
            gain_values.append(gain_importance(model).values)
    importance = {
        "permutation": {
            "top_feature_per_seed": perm_per_seed,
            "mean_values": {
                name: float(np.mean([v[j] for v in perm_values]))
                for j, name in enumerate(FEATURE_NAMES)
            },
        },
    }
    if gain_values:
        importance["gain"] = {
            "mean_values": {
                name: float(np.mean([v[j] for v in gain_values]))
                for j, name in enumerate(FEATURE_NAMES)
            },
        }

    _log(log, f"run {run_id}: KS tables")
    ks_tables: dict = {"by_label": [], "by_topic_pair": []}
    for name, res in ks_by_label(psych_data):
        ks_tables["by_label"].append({
            "feature": name, "statistic": res.statistic, "p_value": res.p_value,
            "n_neutral": res.n_a, "n_controversial": res.n_b,
        })
    topics: dict[str, list[int]] = {}
    for i, tree in enumerate(trees):
        topics.setdefault(tree.post.topic, []).append(i)
    groups = {topic: psych_data.X[np.array(rows)] for topic, rows in topics.items()
              if len(rows) >= 2}
    if len(groups) >= 2:
        for ga, gb, feat, res in ks_grid(groups, FEATURE_NAMES):
            ks_tables["by_topic_pair"].append({
                "topic_a": ga, "topic_b": gb, "feature": feat,
                "statistic": res.statistic, "p_value": res.p_value,
            })

    report = Report(
        run_id=run_id,
        config=config.to_dict(),
        matrix=matrix,
        early_detection=early,
        one_page=one_page,
        importance=importance,
        ks=ks_tables,
        runtime_seconds=time.monotonic() - started,
    )
    _log(log, f"run {run_id}: finished in {report.runtime_seconds:.1f} s")
    return report


def write_report(report: Report, config: ExperimentConfig,
                 log: Optional[TextIO] = sys.stderr) -> str:
    """Write report.json + CSV views (+ plots when enabled); returns run dir."""
    run_dir = os.path.join(config.output_dir, report.run_id)
    os.makedirs(os.path.join(run_dir, "plots"), exist_ok=True)

    report_path = os.path.join(run_dir, "report.json")
    with open(report_path, "w", encoding="utf-8", newline="") as handle:
        json.dump(report.to_json_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")

    with open(os.path.join(run_dir, "matrix.csv"), "w", encoding="utf-8",
              newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        seed_cols = [f"accuracy_seed_{s}" for s in config.seeds]
        writer.writerow(["algorithm", "mode", "mean_accuracy"] + seed_cols)
        for algorithm in config.algorithms:
            for mode in config.modes:
                cell = report.matrix[algorithm.value][mode.value]
                writer.writerow([algorithm.value, mode.value, repr(cell["mean"])]
                                + [repr(v) for v in cell["per_seed"]])

    with open(os.path.join(run_dir, "importance.csv"), "w", encoding="utf-8",
              newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["method", "feature", "mean_score"])
        for method in sorted(report.importance):
            for name in FEATURE_NAMES:
                writer.writerow([method, name,
                                 repr(report.importance[method]["mean_values"][name])])

    with open(os.path.join(run_dir, "ks.csv"), "w", encoding="utf-8",
              newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["scope", "group_a", "group_b", "feature",
                         "statistic", "p_value"])
        for row in report.ks["by_label"]:
            writer.writerow(["label", "neutral", "controversial", row["feature"],
                             repr(row["statistic"]), repr(row["p_value"])])
        for row in report.ks["by_topic_pair"]:
            writer.writerow(["topic", row["topic_a"], row["topic_b"], row["feature"],
                             repr(row["statistic"]), repr(row["p_value"])])

    if config.make_plots:
        from .plots import plot_report
        plot_report(report, os.path.join(run_dir, "plots"))

    _log(log, f"run {report.run_id}: wrote {report_path}")
    return run_dir
