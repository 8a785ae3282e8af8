"""Feature vectors for controversy detection.

Thirteen per-post features in four groups, in the fixed column order used
everywhere (CSV, datasets, model manifests):

    structure    n d b k v
    interaction  t_min t_avg c q
    text         s_c s_p
    psychology   p_a p_t

Feature modes are cumulative prefixes of that order: STRUCTURE uses the
first 5 features, INTERACTION 9, TEXT 11, PSYCHOLOGY all 13.  Masked
features are imputed as 0.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from ..threads import CommentTree, DataError
from .interaction import InteractionFeatures, interaction_features
from .psych import PsychFeatures, ascending_gradient, psych_features, tier_ascending_gradient
from .structural import StructuralFeatures, structural_features
from .text import DEMO_LEXICON, Lexicon, TextFeatures, load_lexicon, score_text, text_features

FEATURE_NAMES: tuple[str, ...] = (
    "n", "d", "b", "k", "v",
    "t_min", "t_avg", "c", "q",
    "s_c", "s_p",
    "p_a", "p_t",
)

CSV_HEADER: tuple[str, ...] = ("post_id", "label") + FEATURE_NAMES


class FeatureMode(Enum):
    STRUCTURE = "structure"
    INTERACTION = "interaction"
    TEXT = "text"
    PSYCHOLOGY = "psychology"


MODE_FEATURES: dict[FeatureMode, tuple[str, ...]] = {
    FeatureMode.STRUCTURE: FEATURE_NAMES[:5],
    FeatureMode.INTERACTION: FEATURE_NAMES[:9],
    FeatureMode.TEXT: FEATURE_NAMES[:11],
    FeatureMode.PSYCHOLOGY: FEATURE_NAMES,
}

# Reduced mask for hot-comment ("one page") analysis: the global tree shape
# is unknown there, so depth/breadth/avg-degree/virality are dropped and
# size is kept, leaving 9 of the 13 features.
ONE_PAGE_FEATURES: tuple[str, ...] = ("n",) + FEATURE_NAMES[5:]


@dataclass(frozen=True)
class FeatureConfig:
    """Switches for the documented convention choices.

    ``include_root_links_in_reply_time``: whether post->top-level links
    enter t_min/t_avg.  ``absolute_sentiment``: score text by magnitude
    instead of signed polarity.  Gradient features always exclude root
    links (the post has no like count).
    """

    include_root_links_in_reply_time: bool = True
    absolute_sentiment: bool = False

    def manifest(self, feature_names: Sequence[str]) -> dict:
        return {
            "features": list(feature_names),
            "include_root_links_in_reply_time": self.include_root_links_in_reply_time,
            "absolute_sentiment": self.absolute_sentiment,
            "gradient_links": "comment-to-comment only",
        }


@dataclass(frozen=True)
class FeatureVector:
    """The 13 named feature values for one post, plus the active-mode mask.

    ``values`` always holds all 13 entries; ``active`` lists the names a
    model may use.  Inactive entries are zeroed so a masked vector is also
    directly usable as a dense row.
    """

    post_id: str
    label: Optional[bool]
    values: dict[str, float]
    active: tuple[str, ...]

    def __post_init__(self) -> None:
        if set(self.values) != set(FEATURE_NAMES):
            raise ValueError("feature vector must carry exactly the 13 named features")

    def as_array(self, names: Optional[Sequence[str]] = None) -> np.ndarray:
        names = self.active if names is None else tuple(names)
        return np.array([self.values[name] for name in names], dtype=float)


def feature_vector(
    tree: CommentTree,
    lexicon: Lexicon = DEMO_LEXICON,
    mode: FeatureMode = FeatureMode.PSYCHOLOGY,
    config: FeatureConfig = FeatureConfig(),
) -> FeatureVector:
    """Compute all features of one tree and mask them per ``mode``."""
    values, _ = compute_feature_values(tree, lexicon, config)
    return mask_vector(tree.post.post_id, tree.post.controversy_label, values,
                       MODE_FEATURES[mode])


def mask_vector(
    post_id: str,
    label: Optional[bool],
    values: dict[str, float],
    active: Sequence[str],
) -> FeatureVector:
    """Zero every feature outside ``active`` and build the vector."""
    active = tuple(active)
    masked = {name: (values[name] if name in active else 0.0) for name in FEATURE_NAMES}
    return FeatureVector(post_id=post_id, label=label, values=masked, active=active)


def compute_feature_values(
    tree: CommentTree,
    lexicon: Lexicon = DEMO_LEXICON,
    config: FeatureConfig = FeatureConfig(),
) -> tuple[dict[str, float], dict[str, float]]:
    """All 13 raw feature values plus non-feature metadata.

    The metadata dict carries the thread time span, the gradient link
    count, and the number of clock-skew links clamped to zero.
    """
    s = structural_features(tree)
    i = interaction_features(tree, include_root_links=config.include_root_links_in_reply_time)
    t = text_features(tree, lexicon, absolute=config.absolute_sentiment)
    p = psych_features(tree)

    values = {
        "n": float(s.size),
        "d": float(s.depth),
        "b": float(s.breadth),
        "k": s.avg_degree,
        "v": s.virality,
        "t_min": i.t_min,
        "t_avg": i.t_avg,
        "c": i.density,
        "q": i.avg_ups,
        "s_c": t.comment_emotion,
        "s_p": t.post_emotion,
        "p_a": p.ascending_gradient,
        "p_t": p.tier_ascending_gradient,
    }
    meta = {
        "delta": i.delta,
        "link_count": float(p.link_count),
        "clamped_links": float(i.clamped_links),
    }
    return values, meta


def write_feature_csv(vectors: Iterable[FeatureVector], path: str) -> None:
    """Write the fixed 15-column feature matrix."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for vec in vectors:
            label = "" if vec.label is None else int(vec.label)
            writer.writerow([vec.post_id, label] + [repr(vec.values[n]) for n in FEATURE_NAMES])


def read_feature_csv(path: str, active: Optional[Sequence[str]] = None) -> list[FeatureVector]:
    """Read a feature matrix written by :func:`write_feature_csv`.

    ``active`` restricts the usable features (default: all 13); values
    outside the mask are zeroed, mirroring `mask_vector`.
    """
    active = tuple(FEATURE_NAMES if active is None else active)
    vectors = []
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise DataError(f"{path}: expected header {','.join(CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise DataError(f"{path}:{lineno}: expected {len(CSV_HEADER)} columns")
            label = None if row[1] == "" else bool(int(row[1]))
            values = {name: float(row[2 + i]) for i, name in enumerate(FEATURE_NAMES)}
            vectors.append(mask_vector(row[0], label, values, active))
    return vectors


__all__ = [
    "CSV_HEADER",
    "DEMO_LEXICON",
    "FEATURE_NAMES",
    "FeatureConfig",
    "FeatureMode",
    "FeatureVector",
    "InteractionFeatures",
    "Lexicon",
    "MODE_FEATURES",
    "ONE_PAGE_FEATURES",
    "PsychFeatures",
    "StructuralFeatures",
    "TextFeatures",
    "ascending_gradient",
    "compute_feature_values",
    "feature_vector",
    "interaction_features",
    "load_lexicon",
    "mask_vector",
    "psych_features",
    "read_feature_csv",
    "score_text",
    "structural_features",
    "text_features",
    "tier_ascending_gradient",
    "write_feature_csv",
]
