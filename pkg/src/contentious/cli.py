"""Command-line entry point.

Exit codes: 0 success, 1 usage error (unknown flags, bad invocations),
2 data error (unreadable/invalid inputs).  Machine-readable output goes to
stdout or files; progress and summaries go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from types import SimpleNamespace
from typing import Optional

import numpy as np

from .features import (
    DEMO_LEXICON,
    FEATURE_NAMES,
    FeatureMode,
    MODE_FEATURES,
    feature_vector,
    load_lexicon,
    read_feature_csv,
    write_feature_csv,
)
from .harness import (
    ExperimentConfig,
    config_from_toml,
    one_page_vector,
    run_experiment,
    time_slice,
    write_report,
)
from .learners import (
    Algorithm,
    Dataset,
    DatasetError,
    ManifestError,
    load_model,
    predict,
    save_model,
    train,
)
from .stats import gain_importance, ks_two_sample, permutation_importance
from .synth import SyntheticParams, generate_synthetic
from .threads import DataError, ParseReport, RepairPolicy, load_trees


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns exit codes."""

    def error(self, message: str):
        raise UsageError(message)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _repair(args) -> RepairPolicy:
    return RepairPolicy.REATTACH_ROOT if args.repair == "reattach-root" else RepairPolicy.DROP


def _load_corpus(args):
    report = ParseReport()
    trees = load_trees(args.posts, args.comments, repair_policy=_repair(args),
                       strict=getattr(args, "strict", False), report=report)
    _log(f"parsed {report.posts} posts, {report.comments} comments"
         f" (skipped {report.skipped_posts} posts, {report.skipped_comments} comments,"
         f" {report.orphan_comments} orphans)")
    return trees


def _lexicon(args):
    return load_lexicon(args.lexicon) if getattr(args, "lexicon", None) else DEMO_LEXICON


def cmd_ingest(args) -> int:
    trees = _load_corpus(args)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["post_id", "topic", "label", "comments", "depth", "dropped"])
    for tree in trees:
        label = "" if tree.post.controversy_label is None else int(tree.post.controversy_label)
        depth = max(tree.depth.values()) if tree.depth else 0
        writer.writerow([tree.post.post_id, tree.post.topic, label,
                         tree.size, depth, len(tree.dropped)])
    _log(f"built {len(trees)} trees")
    return 0


def cmd_features(args) -> int:
    trees = _load_corpus(args)
    lexicon = _lexicon(args)
    if args.horizon is not None:
        if args.horizon <= 0:
            raise UsageError("--horizon must be positive")
        trees = [time_slice(t, args.horizon) for t in trees]
    if args.one_page_ratio is not None:
        # one-page view fixes its own 9-feature mask; --mode does not apply
        vectors = [one_page_vector(t, args.one_page_ratio, lexicon) for t in trees]
    else:
        mode = FeatureMode(args.mode)
        vectors = [feature_vector(t, lexicon, mode) for t in trees]
    write_feature_csv(vectors, args.out)
    _log(f"wrote {len(vectors)} feature rows to {args.out}")
    return 0


def _dataset_from_csv(path: str, active) -> Dataset:
    vectors = read_feature_csv(path, active=active)
    return Dataset.from_vectors(vectors, feature_names=tuple(active))


def cmd_train(args) -> int:
    algorithm = Algorithm(args.algorithm)
    active = MODE_FEATURES[FeatureMode(args.mode)]
    data = _dataset_from_csv(args.features, active)
    params: dict = {}
    if algorithm is Algorithm.KNN and args.knn_k is not None:
        params["k"] = args.knn_k
    if algorithm in (Algorithm.GBDT, Algorithm.GBDT_GOSS_EFB):
        for flag, key in (("num_trees", "num_trees"), ("learning_rate", "learning_rate"),
                          ("max_leaves", "max_leaves"), ("bins", "histogram_bins"),
                          ("min_samples_leaf", "min_samples_leaf"),
                          ("goss_a", "goss_a"), ("goss_b", "goss_b"),
                          ("efb_k", "efb_max_conflict")):
            value = getattr(args, flag)
            if value is not None:
                params[key] = value
        params["seed"] = args.seed
    model = train(algorithm, data, params=params or None)
    save_model(model, args.out)
    _log(f"trained {algorithm.value} on {len(data)} rows; model saved to {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    data = _dataset_from_csv(args.features, model.feature_names)
    labels, scores = predict(model, data)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["post_id", "label", "predicted", "score"])
    for pid, y, yhat, s in zip(data.post_ids, data.y, labels, scores):
        writer.writerow([pid, int(y), int(yhat), repr(float(s))])
    acc = float((labels == data.y).mean())
    _log(f"accuracy {acc:.4f} on {len(data)} labelled rows")
    return 0


def cmd_importance(args) -> int:
    model = load_model(args.model)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["method", "feature", "score"])
    if args.method in ("permutation", "both"):
        data = _dataset_from_csv(args.features, model.feature_names)
        report = permutation_importance(model, data, seed=args.seed,
                                        repeats=args.repeats)
        for name, value in zip(report.feature_names, report.values):
            writer.writerow(["permutation", name, repr(value)])
    if args.method in ("gain", "both"):
        report = gain_importance(model)
        for name, value in zip(report.feature_names, report.values):
            writer.writerow(["gain", name, repr(value)])
    return 0


def cmd_ks(args) -> int:
    vectors = read_feature_csv(args.features)
    chosen = [args.feature] if args.feature else list(FEATURE_NAMES)
    for name in chosen:
        if name not in FEATURE_NAMES:
            raise UsageError(f"unknown feature {name!r}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["feature", "statistic", "p_value", "n_neutral", "n_controversial"])
    labelled = [v for v in vectors if v.label is not None]
    if not labelled:
        raise DataError(f"{args.features}: no labelled rows for KS by label")
    for name in chosen:
        a = np.array([v.values[name] for v in labelled if not v.label])
        b = np.array([v.values[name] for v in labelled if v.label])
        if a.size == 0 or b.size == 0:
            raise DataError(f"{args.features}: need rows from both classes")
        res = ks_two_sample(a, b)
        writer.writerow([name, repr(res.statistic), repr(res.p_value), res.n_a, res.n_b])
    return 0


def cmd_synth(args) -> int:
    from .synth import ClassParams

    base = SyntheticParams()
    controversial = ClassParams(**{**vars(base.controversial),
                                   "like_ascension": args.pi_controversial})
    neutral = ClassParams(**{**vars(base.neutral),
                             "like_ascension": args.pi_neutral})
    params = SyntheticParams(num_posts=args.num_posts, seed=args.seed,
                             controversial=controversial, neutral=neutral)
    posts_path, comments_path = generate_synthetic(params, args.out)
    print(posts_path)
    print(comments_path)
    _log(f"wrote synthetic corpus ({2 * params.num_posts} posts) to {args.out}")
    return 0


def cmd_experiment(args) -> int:
    config = config_from_toml(args.config)
    report = run_experiment(config)
    run_dir = write_report(report, config)
    print(run_dir)
    return 0


def cmd_plot(args) -> int:
    from .plots import plot_report

    try:
        with open(args.report, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise DataError(f"cannot read report {args.report}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"report {args.report} is not valid JSON: {exc}") from exc
    shim = SimpleNamespace(
        matrix=payload.get("matrix", {}),
        early_detection=payload.get("early_detection", {}),
        importance=payload.get("importance", {}),
        ks=payload.get("ks", {}),
    )
    for path in plot_report(shim, args.out):
        print(path)
    return 0


def _add_corpus_flags(p) -> None:
    p.add_argument("--posts", required=True, help="posts JSONL file")
    p.add_argument("--comments", required=True, help="comments JSONL file")
    p.add_argument("--repair", choices=["drop", "reattach-root"], default="drop",
                   help="broken-link repair policy (default: drop)")
    p.add_argument("--strict", action="store_true",
                   help="fail on the first malformed record instead of skipping")


def build_parser() -> _Parser:
    parser = _Parser(prog="contentious",
                     description="Controversy detection from comment cascades")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate a corpus and print per-tree stats")
    _add_corpus_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("features", help="compute feature vectors to CSV")
    _add_corpus_flags(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--mode", choices=[m.value for m in FeatureMode],
                   default=FeatureMode.PSYCHOLOGY.value,
                   help="cumulative feature mask (default: psychology)")
    p.add_argument("--lexicon", help="TSV valence lexicon (default: built-in demo)")
    p.add_argument("--one-page-ratio", type=float, dest="one_page_ratio",
                   help="hot-comment filter ratio in (0,1]; uses the 9-feature page mask")
    p.add_argument("--horizon", type=int,
                   help="keep only comments within this many seconds of the post")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train a classifier from a feature CSV")
    p.add_argument("--features", required=True, help="feature CSV from `features`")
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm],
                   required=True, help="classifier to fit")
    p.add_argument("--mode", choices=[m.value for m in FeatureMode],
                   default=FeatureMode.PSYCHOLOGY.value,
                   help="feature mask to train on (default: psychology)")
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--seed", type=int, default=0, help="training seed (default 0)")
    p.add_argument("--knn-k", type=int, dest="knn_k", help="neighbours for knn")
    p.add_argument("--num-trees", type=int, dest="num_trees", help="boosting rounds")
    p.add_argument("--learning-rate", type=float, dest="learning_rate",
                   help="boosting shrinkage")
    p.add_argument("--max-leaves", type=int, dest="max_leaves", help="leaves per tree")
    p.add_argument("--min-samples-leaf", type=int, dest="min_samples_leaf",
                   help="smallest sampled leaf a split may create; lower this"
                        " on small corpora or boosting never splits")
    p.add_argument("--bins", type=int, help="histogram bins per feature")
    p.add_argument("--goss-a", type=float, dest="goss_a",
                   help="top-gradient keep fraction")
    p.add_argument("--goss-b", type=float, dest="goss_b",
                   help="small-gradient sample fraction")
    p.add_argument("--efb-k", type=int, dest="efb_k",
                   help="max conflicts per feature bundle")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a feature CSV with a saved model")
    p.add_argument("--features", required=True, help="feature CSV with labels")
    p.add_argument("--model", required=True, help="model JSON from `train`")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("importance", help="feature importance of a saved model")
    p.add_argument("--features", required=True, help="held-out feature CSV")
    p.add_argument("--model", required=True, help="model JSON from `train`")
    p.add_argument("--method", choices=["permutation", "gain", "both"],
                   help="importance estimator (gain needs a boosted model)",
                   default="permutation")
    p.add_argument("--repeats", type=int, default=10,
                   help="shuffles per feature (default 10)")
    p.add_argument("--seed", type=int, default=0, help="shuffle seed (default 0)")
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("ks", help="two-sample KS test between the classes")
    p.add_argument("--features", required=True, help="feature CSV with labels")
    p.add_argument("--feature", help="restrict to one feature (default: all 13)")
    p.add_argument("--group-by", choices=["label"], default="label",
                   help="grouping for the two samples")
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("synth", help="generate a labelled synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--num-posts", type=int, dest="num_posts", default=200,
                   help="posts per class (default 200)")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--pi-controversial", type=float, dest="pi_controversial",
                   default=0.6, help="like-ascension probability, controversial class")
    p.add_argument("--pi-neutral", type=float, dest="pi_neutral", default=0.3,
                   help="like-ascension probability, neutral class")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("experiment",
                       help="run the full evaluation matrix from a TOML config")
    p.add_argument("--config", required=True, help="experiment TOML file")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="render SVG plots from a report.json")
    p.add_argument("--report", required=True, help="report.json from `experiment`")
    p.add_argument("--out", required=True, help="directory for the SVG files")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, DatasetError, ManifestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
