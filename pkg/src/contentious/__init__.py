"""Controversy detection for online discussion threads.

Pipeline: parse posts/comments JSONL into validated comment trees, extract
13 cascade features (structure, interaction, text, psychology), train
classifiers (including a from-scratch histogram GBDT with gradient-based
sampling and feature bundling), and reproduce the evaluation protocols:
algorithm x feature-mode accuracy matrix, hot-comment "one page" detection,
early detection from time prefixes, KS separation tests, and feature
importance rankings.
"""
from .features import (
    CSV_HEADER,
    DEMO_LEXICON,
    FEATURE_NAMES,
    FeatureConfig,
    FeatureMode,
    FeatureVector,
    MODE_FEATURES,
    ONE_PAGE_FEATURES,
    compute_feature_values,
    feature_vector,
    load_lexicon,
    read_feature_csv,
    write_feature_csv,
)
from .harness import (
    ExperimentConfig,
    OnePageView,
    Report,
    config_from_toml,
    one_page_filter,
    one_page_vector,
    run_experiment,
    time_slice,
    write_report,
)
from .learners import (
    Algorithm,
    Dataset,
    GbdtConfig,
    Model,
    accuracy,
    load_model,
    predict,
    save_model,
    train,
)
from .stats import (
    ImportanceReport,
    KsResult,
    gain_importance,
    ks_by_label,
    ks_grid,
    ks_two_sample,
    permutation_importance,
)
from .synth import ClassParams, SyntheticParams, generate_synthetic, synth_trees
from .threads import (
    Comment,
    CommentTree,
    DataError,
    ParseReport,
    Post,
    RepairPolicy,
    build_tree,
    load_trees,
    parse_dataset,
    tree_to_records,
)

__version__ = "0.1.0"
