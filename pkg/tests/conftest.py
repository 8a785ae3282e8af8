"""Shared fixtures: the T1 reference tree, corpus files, random trees."""
import json

import numpy as np
import pytest

from contentious.threads import Comment, Post, RepairPolicy, build_tree

# The hand-checked reference tree used across feature, harness, and CLI
# tests.  Expected values are frozen in tests from independent arithmetic:
#   links root->v1 (10s), root->v2 (20s), v1->v3 (20s), v3->v4 (20s)
#   comment links: v1->v3 (5 vs 7 likes), v3->v4 (7 vs 2 likes)
T1_POST = Post(topic="demo", post_id="p1", post_time=0,
               text="good fair question", controversy_label=True)
T1_COMMENTS = (
    Comment(post_id="p1", comment_id="v1", comment_time=10, likes=5,
            text="good point", parent_id="p1"),
    Comment(post_id="p1", comment_id="v2", comment_time=20, likes=1,
            text="bad take", parent_id="p1"),
    Comment(post_id="p1", comment_id="v3", comment_time=30, likes=7,
            text="terrible and wrong", parent_id="v1"),
    Comment(post_id="p1", comment_id="v4", comment_time=50, likes=2,
            text="agree", parent_id="v3"),
)

T1_EXPECTED = {
    "n": 4.0,
    "d": 3.0,
    "b": 2.0,
    "k": 0.5,
    "v": 26.0 / 12.0,
    "t_min": 10.0,
    "t_avg": 17.5,
    "c": 0.08,
    "q": 3.75,
    "p_a": 0.5,
    "p_t": 0.0,
}


@pytest.fixture
def t1_tree():
    return build_tree(T1_POST, T1_COMMENTS, RepairPolicy.DROP)


@pytest.fixture
def t1_corpus(tmp_path):
    """T1 on disk plus an empty post and one orphan comment."""
    posts = tmp_path / "posts.jsonl"
    comments = tmp_path / "comments.jsonl"
    post_rows = [
        {"topic": "demo", "post_id": "p1", "post_time": 0,
         "text": "good fair question", "label": 1},
        {"topic": "demo", "post_id": "p2", "post_time": 100,
         "text": "quiet thread", "label": 0},
    ]
    comment_rows = [
        {"post_id": "p1", "comment_id": c.comment_id,
         "comment_time": c.comment_time, "likes": c.likes,
         "text": c.text, "parent_id": c.parent_id}
        for c in T1_COMMENTS
    ]
    comment_rows.append(
        {"post_id": "nope", "comment_id": "x1", "comment_time": 5,
         "likes": 0, "text": "lost", "parent_id": "nope"})
    posts.write_text("".join(json.dumps(r) + "\n" for r in post_rows))
    comments.write_text("".join(json.dumps(r) + "\n" for r in comment_rows))
    return str(posts), str(comments)


def random_tree(rng: np.random.Generator, max_size: int = 50,
                post_id: str = "r", allow_skew: bool = False):
    """Random topology with likes uniform 0..10; oracle-friendly."""
    n = int(rng.integers(0, max_size + 1))
    post = Post(topic="rand", post_id=post_id, post_time=int(rng.integers(0, 100)),
                text="", controversy_label=bool(rng.integers(0, 2)))
    comments = []
    ids = []
    t = post.post_time
    for i in range(n):
        cid = f"{post_id}c{i:03d}"
        parent = post_id if not ids or rng.random() < 0.3 else ids[int(rng.integers(len(ids)))]
        step = int(rng.integers(-5, 120)) if allow_skew else int(rng.integers(0, 120))
        t = max(t + step, 0)
        comments.append(Comment(
            post_id=post_id, comment_id=cid, comment_time=t,
            likes=int(rng.integers(0, 11)), text="", parent_id=parent))
        ids.append(cid)
    return build_tree(post, comments, RepairPolicy.DROP)


# ---------------------------------------------------------------------------
# acceptance summary: tests append (criterion, verdict, detail) lines and a
# terminal-summary hook prints them after the run so each criterion shows one
# visible pass/fail line in the captured output
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
