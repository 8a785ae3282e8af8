"""Tree-shape features: size, depth, breadth, average degree, virality.

All statistics are taken over comment nodes only; the root post does not
count toward size, degree averages, or virality pairs, although shortest
paths may run through it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..threads import CommentTree


@dataclass(frozen=True)
class StructuralFeatures:
    size: int
    depth: int
    breadth: int
    avg_degree: float
    virality: float


def structural_features(tree: CommentTree) -> StructuralFeatures:
    """Compute the five shape features of a validated tree.

    Virality is the mean shortest-path distance over ordered pairs of
    distinct comment nodes in the undirected tree; 0 when there are fewer
    than two comments.
    """
    n = tree.size
    if n == 0:
        return StructuralFeatures(0, 0, 0, 0.0, 0.0)

    depths = tree.depth
    max_depth = max(depths.values())

    per_level: dict[int, int] = {}
    for d in depths.values():
        per_level[d] = per_level.get(d, 0) + 1
    breadth = max(per_level.values())

    degree_sum = sum(tree.direct_reply_count(cid) for cid in tree.comments)
    avg_degree = degree_sum / n

    return StructuralFeatures(
        size=n,
        depth=max_depth,
        breadth=breadth,
        avg_degree=avg_degree,
        virality=_virality(tree),
    )


def _virality(tree: CommentTree) -> float:
    """Mean pairwise distance among comments, one BFS per comment node."""
    n = tree.size
    if n <= 1:
        return 0.0

    root = tree.post.post_id
    neighbors: dict[str, list[str]] = {root: []}
    for cid in tree.comments:
        neighbors.setdefault(cid, [])
    for cid, pid in tree.parent.items():
        neighbors[cid].append(pid)
        neighbors[pid].append(cid)

    total = 0
    for source in tree.comments:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for nxt in neighbors[node]:
                if nxt not in dist:
                    dist[nxt] = dist[node] + 1
                    queue.append(nxt)
        total += sum(dist[cid] for cid in tree.comments)

    # ordered pairs; each unordered pair is counted twice, matching n(n-1)
    return total / (n * (n - 1))
