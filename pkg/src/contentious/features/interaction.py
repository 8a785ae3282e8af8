"""Reply-timing and like-volume features of a discussion thread."""
from __future__ import annotations

from dataclasses import dataclass

from ..threads import CommentTree


@dataclass(frozen=True)
class InteractionFeatures:
    t_min: float
    t_avg: float
    density: float
    avg_ups: float
    delta: float
    # data-quality: reply links whose child precedes its parent (clock skew)
    clamped_links: int = 0


def interaction_features(
    tree: CommentTree, include_root_links: bool = True
) -> InteractionFeatures:
    """Reply-interval stats, comment density, and mean like count.

    Reply intervals are measured along reply links; with
    ``include_root_links`` (the default) post->top-level links count too,
    using the post time as the parent timestamp.  Negative intervals from
    clock skew are clamped to 0 and counted in ``clamped_links``.  A thread
    with no comments yields all zeros; a zero span is floored to one second
    so density stays finite.
    """
    n = tree.size
    if n == 0:
        return InteractionFeatures(0.0, 0.0, 0.0, 0.0, 0.0)

    post = tree.post
    times = {post.post_id: post.post_time}
    for cid, comment in tree.comments.items():
        times[cid] = comment.comment_time

    intervals = []
    clamped = 0
    for pid, cid in tree.reply_links(include_root=include_root_links):
        dt = times[cid] - times[pid]
        if dt < 0:
            dt = 0
            clamped += 1
        intervals.append(dt)

    if intervals:
        t_min = float(min(intervals))
        t_avg = sum(intervals) / len(intervals)
    else:
        t_min = t_avg = 0.0

    delta = max(c.comment_time for c in tree.comments.values()) - post.post_time
    delta = max(delta, 0)
    density = n / max(delta, 1)

    avg_ups = sum(c.likes for c in tree.comments.values()) / n

    return InteractionFeatures(
        t_min=t_min,
        t_avg=float(t_avg),
        density=float(density),
        avg_ups=float(avg_ups),
        delta=float(delta),
        clamped_links=clamped,
    )
