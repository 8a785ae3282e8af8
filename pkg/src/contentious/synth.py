"""Synthetic discussion-thread corpus with a controllable controversy signal.

Each post gets a comment cascade built comment-by-comment.  The like counts
carry the designed signal: every comment->comment reply flips an independent
"ascension" coin with the class probability pi, and on heads the reply gets
strictly more likes than its parent, so a tree's expected like-gradient
fraction equals pi exactly.  Reply-ascension bias, tree shape, pacing, word
choice, and size add milder class differences so the remaining feature
groups are informative but not dominant.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .features.text import DEMO_LEXICON
from .threads import Comment, CommentTree, Post, RepairPolicy, build_tree, tree_to_records

_NEGATIVE_WORDS = tuple(sorted(t for t, s in DEMO_LEXICON.entries.items() if s < 0))
_POSITIVE_WORDS = tuple(sorted(t for t, s in DEMO_LEXICON.entries.items() if s > 0))
_FILLER_WORDS = (
    "the", "a", "this", "that", "thread", "point", "comment", "post",
    "people", "really", "think", "maybe", "still", "also", "today", "here",
)


@dataclass(frozen=True)
class ClassParams:
    """Per-class generator knobs."""

    mean_size: float
    like_ascension: float       # pi: chance a reply out-likes its parent
    reply_ascension: float      # chance a new comment piles onto a deep reply
    interval_scale: float       # mean seconds between consecutive comments
    chain_weight: float
    star_weight: float
    negative_word_rate: float
    positive_word_rate: float

    def __post_init__(self) -> None:
        for name in ("like_ascension", "reply_ascension",
                     "negative_word_rate", "positive_word_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.mean_size < 1.0:
            raise ValueError("mean_size must be at least 1")
        if self.interval_scale <= 0:
            raise ValueError("interval_scale must be positive")
        if not 0.0 <= self.chain_weight + self.star_weight <= 1.0:
            raise ValueError("chain_weight + star_weight must stay within [0, 1]")


@dataclass(frozen=True)
class SyntheticParams:
    """Corpus-level knobs; defaults give a separable two-class corpus."""

    num_posts: int = 200        # per class
    seed: int = 0
    max_size: int = 80
    topics_per_class: int = 3
    controversial: ClassParams = field(default_factory=lambda: ClassParams(
        mean_size=44.0, like_ascension=0.6, reply_ascension=0.5,
        interval_scale=1800.0, chain_weight=0.1, star_weight=0.1,
        negative_word_rate=0.22, positive_word_rate=0.18))
    neutral: ClassParams = field(default_factory=lambda: ClassParams(
        mean_size=34.0, like_ascension=0.3, reply_ascension=0.12,
        interval_scale=2300.0, chain_weight=0.1, star_weight=0.1,
        negative_word_rate=0.18, positive_word_rate=0.22))

    def __post_init__(self) -> None:
        if self.num_posts < 1:
            raise ValueError("num_posts must be positive")
        if self.max_size < 2:
            raise ValueError("max_size must be at least 2")
        if self.topics_per_class < 1:
            raise ValueError("topics_per_class must be positive")


def _comment_text(rng: np.random.Generator, cls: ClassParams) -> str:
    words = []
    for _ in range(int(rng.integers(5, 11))):
        u = rng.random()
        if u < cls.negative_word_rate:
            words.append(_NEGATIVE_WORDS[rng.integers(len(_NEGATIVE_WORDS))])
        elif u < cls.negative_word_rate + cls.positive_word_rate:
            words.append(_POSITIVE_WORDS[rng.integers(len(_POSITIVE_WORDS))])
        else:
            words.append(_FILLER_WORDS[rng.integers(len(_FILLER_WORDS))])
    return " ".join(words)


def _make_tree(rng: np.random.Generator, post: Post, cls: ClassParams,
               max_size: int) -> CommentTree:
    # 2 + geometric keeps at least one comment->comment link in every tree
    # (the second comment always replies to the first)
    extra_mean = max(cls.mean_size - 2.0, 1.0)
    n = 2 + int(rng.geometric(1.0 / extra_mean))
    n = min(n, max_size)

    u = rng.random()
    if u < cls.chain_weight:
        shape = "chain"
    elif u < cls.chain_weight + cls.star_weight:
        shape = "star"
    else:
        shape = "random"

    comments: list[Comment] = []
    likes: dict[str, int] = {}
    # pile-on bursts: a visibly liked comment draws the next few replies, so
    # it ends up out-replying its own parent (an ascending reply count along
    # that link) and a likes-ranked front page keeps the burst links visible
    hub: Optional[str] = None
    burst_remaining = 0
    t = 0.0
    for i in range(n):
        cid = f"{post.post_id}-c{i + 1:03d}"
        t += rng.exponential(cls.interval_scale)
        if i == 0:
            parent = post.post_id
        elif i == 1:
            parent = comments[0].comment_id
        elif shape == "chain":
            parent = comments[-1].comment_id
        elif shape == "star":
            # broad but not degenerate: keep a few deep links so the
            # like-gradient still averages over more than one coin flip
            if rng.random() < 0.75:
                parent = post.post_id
            else:
                parent = comments[int(rng.integers(len(comments)))].comment_id
        elif burst_remaining > 0:
            parent = hub
            burst_remaining -= 1
        elif rng.random() < cls.reply_ascension:
            # the current like leader becomes the pile-on target (ties go to
            # the earliest comment)
            hub = max((c.comment_id for c in comments),
                      key=lambda cand: likes[cand])
            parent = hub
            burst_remaining = 2 + int(rng.integers(3))
        else:
            pool = [post.post_id] + [c.comment_id for c in comments]
            parent = pool[int(rng.integers(len(pool)))]

        if parent == post.post_id:
            like = int(rng.poisson(3.0))
        elif rng.random() < cls.like_ascension:
            like = likes[parent] + 1 + int(rng.poisson(2.0))
        else:
            like = int(rng.integers(0, likes[parent] + 1))

        comment = Comment(
            post_id=post.post_id,
            comment_id=cid,
            comment_time=int(round(t)),
            likes=like,
            text=_comment_text(rng, cls),
            parent_id=parent,
        )
        comments.append(comment)
        likes[cid] = like
    return build_tree(post, comments, RepairPolicy.DROP)


def synth_trees(params: SyntheticParams) -> list[CommentTree]:
    """Generate labelled trees: controversial first, then neutral."""
    rng = np.random.default_rng(params.seed)
    trees = []
    for label, cls, tag in ((True, params.controversial, "c"),
                            (False, params.neutral, "n")):
        for i in range(params.num_posts):
            topic = f"syn-{tag}{i % params.topics_per_class}"
            post = Post(
                topic=topic,
                post_id=f"{tag}{i + 1:04d}",
                post_time=0,
                text=f"discussion {i + 1} on {topic}",
                controversy_label=label,
            )
            trees.append(_make_tree(rng, post, cls, params.max_size))
    return trees


def generate_synthetic(params: SyntheticParams, out_dir: str,
                       trees: Optional[list[CommentTree]] = None) -> tuple[str, str]:
    """Write posts.jsonl + comments.jsonl; returns the two paths."""
    if trees is None:
        trees = synth_trees(params)
    os.makedirs(out_dir, exist_ok=True)
    posts_path = os.path.join(out_dir, "posts.jsonl")
    comments_path = os.path.join(out_dir, "comments.jsonl")
    with open(posts_path, "w", encoding="utf-8") as ph, \
            open(comments_path, "w", encoding="utf-8") as ch:
        for tree in trees:
            post_record, comment_records = tree_to_records(tree)
            ph.write(json.dumps(post_record, sort_keys=True) + "\n")
            for rec in comment_records:
                ch.write(json.dumps(rec, sort_keys=True) + "\n")
    return posts_path, comments_path
