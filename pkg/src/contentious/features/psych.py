"""Like-gradient and reply-gradient features over comment->comment links.

For each link where one comment replies to another, the reply "ascends"
when it strictly out-does its parent (more likes, or more direct replies).
Posts carry no like count, so links from the post itself are excluded from
both proportions.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..threads import CommentTree


@dataclass(frozen=True)
class PsychFeatures:
    ascending_gradient: float
    tier_ascending_gradient: float
    link_count: int


def psych_features(tree: CommentTree) -> PsychFeatures:
    """Fractions of comment->comment links whose reply strictly ascends.

    ``ascending_gradient`` compares like counts, ``tier_ascending_gradient``
    compares direct-reply counts; ties never ascend.  Threads without any
    comment->comment link (flat, news-style pages) score 0 on both.
    """
    links = tree.reply_links(include_root=False)
    m = len(links)
    if m == 0:
        return PsychFeatures(0.0, 0.0, 0)

    likes_up = 0
    replies_up = 0
    for pid, cid in links:
        if tree.comments[pid].likes < tree.comments[cid].likes:
            likes_up += 1
        if tree.direct_reply_count(pid) < tree.direct_reply_count(cid):
            replies_up += 1

    return PsychFeatures(
        ascending_gradient=likes_up / m,
        tier_ascending_gradient=replies_up / m,
        link_count=m,
    )


def ascending_gradient(tree: CommentTree) -> float:
    return psych_features(tree).ascending_gradient


def tier_ascending_gradient(tree: CommentTree) -> float:
    return psych_features(tree).tier_ascending_gradient
