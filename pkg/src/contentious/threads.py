"""Post/comment records and validated comment trees.

A discussion thread is a rooted tree: the post is the root, every comment
hangs under its parent (another comment, or the post itself for top-level
comments).  Input is JSON Lines, one record per line; trees are immutable
once built and safe to share across threads.
"""
from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional

log = logging.getLogger(__name__)


class DataError(Exception):
    """Malformed or inconsistent input data (CLI exit code 2)."""


class RepairPolicy(Enum):
    """How to handle comments whose parent chain never reaches the post."""

    DROP = "drop"
    REATTACH_ROOT = "reattach_root"


@dataclass(frozen=True)
class Post:
    """A root content item: topic label, id, publication time, text."""

    topic: str
    post_id: str
    post_time: int
    text: str
    controversy_label: Optional[bool] = None

    def __post_init__(self) -> None:
        if not self.post_id:
            raise DataError("post_id must be non-empty")
        if self.post_time < 0:
            raise DataError(f"post {self.post_id}: post_time must be >= 0")


@dataclass(frozen=True)
class Comment:
    """A reply node: owning post, id, time, like count, text, parent id."""

    post_id: str
    comment_id: str
    comment_time: int
    likes: int
    text: str
    parent_id: str

    def __post_init__(self) -> None:
        if not self.comment_id:
            raise DataError("comment_id must be non-empty")
        if self.likes < 0:
            raise DataError(f"comment {self.comment_id}: likes must be >= 0")


@dataclass(frozen=True)
class CommentTree:
    """Validated rooted tree of one post and its attached comments.

    ``depth`` maps comment_id -> distance from the root (root itself is
    depth 0 and not listed).  ``children`` maps node id (post or comment)
    -> tuple of direct-child comment_ids, sorted by comment_id so the
    structure is independent of input order.  ``dropped`` lists comment_ids
    that were discarded during repair.
    """

    post: Post
    comments: dict[str, Comment]
    parent: dict[str, str]
    children: dict[str, tuple[str, ...]]
    depth: dict[str, int]
    dropped: tuple[str, ...] = ()

    @property
    def size(self) -> int:
        """Number of comment nodes (the root post is not counted)."""
        return len(self.comments)

    def comment_ids(self) -> list[str]:
        """Comment ids sorted lexicographically."""
        return sorted(self.comments)

    def direct_reply_count(self, node_id: str) -> int:
        return len(self.children.get(node_id, ()))

    def reply_links(self, include_root: bool = True) -> list[tuple[str, str]]:
        """All (parent_id, child_id) reply links, ordered by child id.

        With ``include_root=False`` only comment->comment links are
        returned, i.e. links whose parent is itself a comment.
        """
        links = []
        for cid in self.comment_ids():
            pid = self.parent[cid]
            if include_root or pid != self.post.post_id:
                links.append((pid, cid))
        return links


def _require(record: dict, key: str, lineno: int, path: str):
    if key not in record:
        raise DataError(f"{path}:{lineno}: missing key {key!r}")
    return record[key]


def _post_from_record(record: dict, lineno: int, path: str) -> Post:
    label = record.get("label")
    if label is not None:
        label = bool(int(label))
    return Post(
        topic=str(_require(record, "topic", lineno, path)),
        post_id=str(_require(record, "post_id", lineno, path)),
        post_time=int(_require(record, "post_time", lineno, path)),
        text=str(_require(record, "text", lineno, path)),
        controversy_label=label,
    )


def _comment_from_record(record: dict, lineno: int, path: str) -> Comment:
    return Comment(
        post_id=str(_require(record, "post_id", lineno, path)),
        comment_id=str(_require(record, "comment_id", lineno, path)),
        comment_time=int(_require(record, "comment_time", lineno, path)),
        likes=int(_require(record, "likes", lineno, path)),
        text=str(_require(record, "text", lineno, path)),
        parent_id=str(_require(record, "parent_id", lineno, path)),
    )


@dataclass
class ParseReport:
    """Counts of records accepted and skipped during ingestion."""

    posts: int = 0
    comments: int = 0
    skipped_posts: int = 0
    skipped_comments: int = 0
    orphan_comments: int = 0
    skipped_lines: list[str] = field(default_factory=list)


def _iter_jsonl(path: str) -> Iterator[tuple[int, str]]:
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            yield lineno, line


def parse_dataset(
    posts_path: str,
    comments_path: str,
    strict: bool = False,
    report: Optional[ParseReport] = None,
) -> list[tuple[Post, list[Comment]]]:
    """Read posts/comments JSONL files and group comments by post.

    Malformed lines and comments pointing at unknown posts are skipped and
    counted (lenient default) or raised as :class:`DataError` when
    ``strict`` is set.  Post order follows the posts file; comment order
    within a post follows the comments file.
    """
    if report is None:
        report = ParseReport()

    posts: dict[str, Post] = {}
    order: list[str] = []
    for lineno, line in _iter_jsonl(posts_path):
        try:
            record = json.loads(line)
            post = _post_from_record(record, lineno, posts_path)
            if post.post_id in posts:
                raise DataError(f"{posts_path}:{lineno}: duplicate post_id {post.post_id!r}")
        except (DataError, ValueError, TypeError) as exc:
            if strict:
                raise DataError(f"{posts_path}:{lineno}: {exc}") from exc
            report.skipped_posts += 1
            report.skipped_lines.append(f"{posts_path}:{lineno}: {exc}")
            log.warning("skipping post line %d: %s", lineno, exc)
            continue
        posts[post.post_id] = post
        order.append(post.post_id)
        report.posts += 1

    grouped: dict[str, list[Comment]] = {pid: [] for pid in order}
    n_comment_lines = 0
    for lineno, line in _iter_jsonl(comments_path):
        n_comment_lines += 1
        try:
            record = json.loads(line)
            comment = _comment_from_record(record, lineno, comments_path)
        except (DataError, ValueError, TypeError) as exc:
            if strict:
                raise DataError(f"{comments_path}:{lineno}: {exc}") from exc
            report.skipped_comments += 1
            report.skipped_lines.append(f"{comments_path}:{lineno}: {exc}")
            log.warning("skipping comment line %d: %s", lineno, exc)
            continue
        if comment.post_id not in grouped:
            report.orphan_comments += 1
            report.skipped_lines.append(
                f"{comments_path}:{lineno}: comment {comment.comment_id!r} "
                f"references unknown post {comment.post_id!r}"
            )
            continue
        grouped[comment.post_id].append(comment)
        report.comments += 1

    if n_comment_lines == 0:
        log.warning("comments file %s is empty", comments_path)
    return [(posts[pid], grouped[pid]) for pid in order]


def build_tree(
    post: Post,
    comments: Iterable[Comment],
    repair_policy: RepairPolicy = RepairPolicy.DROP,
) -> CommentTree:
    """Assemble a validated comment tree for one post.

    Comments whose parent chain is broken (missing parent, a cycle, or a
    self-reference) are removed with their subtree (``DROP``) or the chain
    head is attached to the root (``REATTACH_ROOT``).  The result does not
    depend on input comment order.
    """
    by_id: dict[str, Comment] = {}
    duplicates = []
    for comment in comments:
        if comment.post_id != post.post_id:
            raise DataError(
                f"comment {comment.comment_id!r} belongs to post "
                f"{comment.post_id!r}, not {post.post_id!r}"
            )
        if comment.comment_id == post.post_id:
            raise DataError(f"comment id {comment.comment_id!r} collides with the post id")
        if comment.comment_id in by_id:
            duplicates.append(comment.comment_id)
        by_id[comment.comment_id] = comment
    if duplicates:
        raise DataError(f"duplicate comment_ids: {sorted(set(duplicates))}")

    root = post.post_id
    parent: dict[str, str] = {}
    for cid in sorted(by_id):
        pid = by_id[cid].parent_id
        if pid == root or pid in by_id:
            parent[cid] = pid
    # ids whose declared parent does not exist at all
    missing_parent = sorted(cid for cid in by_id if cid not in parent)

    # Nodes reach the root iff their parent chain does; everything else is
    # on or below a broken chain (missing parent or a cycle).
    reaches: dict[str, bool] = {}

    def _reaches_root(cid: str) -> bool:
        path = []
        cur = cid
        while cur != root and cur not in reaches:
            path.append(cur)
            nxt = parent.get(cur)
            if nxt is None or nxt in path:
                break
            cur = nxt
        ok = cur == root or reaches.get(cur, False)
        for node in path:
            reaches[node] = ok
        return ok

    attached = {cid for cid in by_id if cid in parent and _reaches_root(cid)}
    broken = sorted(set(by_id) - attached)

    dropped: list[str] = []
    if broken:
        if repair_policy is RepairPolicy.DROP:
            dropped = broken
        else:
            # Reattach each broken chain's head to the root: nodes with no
            # surviving parent, plus one cut point per cycle (the smallest
            # comment_id on the cycle).
            for cid in missing_parent:
                parent[cid] = root
            for cid in broken:
                if parent.get(cid, root) == root:
                    continue
                cycle = _find_cycle(cid, parent)
                if cycle:
                    parent[min(cycle)] = root
            reaches.clear()
            attached = {cid for cid in by_id if _reaches_root(cid)}
            dropped = sorted(set(by_id) - attached)  # unrepairable leftovers

    # sorted so downstream float reductions see one canonical order no
    # matter the process hash seed
    kept = {cid: by_id[cid] for cid in sorted(attached)}
    parent = {cid: parent[cid] for cid in kept}

    children: dict[str, list[str]] = {root: []}
    for cid in sorted(kept):
        children.setdefault(cid, [])
        children.setdefault(parent[cid], []).append(cid)

    depth: dict[str, int] = {}
    queue = deque([(root, 0)])
    while queue:
        node, d = queue.popleft()
        if node != root:
            depth[node] = d
        for child in children[node]:
            queue.append((child, d + 1))

    return CommentTree(
        post=post,
        comments=kept,
        parent=parent,
        children={k: tuple(v) for k, v in children.items()},
        depth=depth,
        dropped=tuple(dropped),
    )


def _find_cycle(start: str, parent: dict[str, str]) -> list[str]:
    """Return the cycle reachable by following parents from ``start``, if any."""
    seen: dict[str, int] = {}
    order = []
    cur = start
    while cur in parent:
        if cur in seen:
            return order[seen[cur]:]
        seen[cur] = len(order)
        order.append(cur)
        cur = parent[cur]
    return []


def tree_to_records(tree: CommentTree) -> tuple[dict, list[dict]]:
    """Serialize a tree back to the JSONL record schemas (edge list form)."""
    post = tree.post
    post_record = {
        "topic": post.topic,
        "post_id": post.post_id,
        "post_time": post.post_time,
        "text": post.text,
    }
    if post.controversy_label is not None:
        post_record["label"] = int(post.controversy_label)
    comment_records = [
        {
            "post_id": c.post_id,
            "comment_id": c.comment_id,
            "comment_time": c.comment_time,
            "likes": c.likes,
            "text": c.text,
            "parent_id": c.parent_id,
        }
        for c in (tree.comments[cid] for cid in tree.comment_ids())
    ]
    return post_record, comment_records


def load_trees(
    posts_path: str,
    comments_path: str,
    repair_policy: RepairPolicy = RepairPolicy.DROP,
    strict: bool = False,
    report: Optional[ParseReport] = None,
) -> list[CommentTree]:
    """Parse both files and build one tree per post."""
    pairs = parse_dataset(posts_path, comments_path, strict=strict, report=report)
    return [build_tree(post, comments, repair_policy) for post, comments in pairs]
