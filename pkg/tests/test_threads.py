"""Ingestion and tree-construction contracts."""
import json

import numpy as np
import pytest

from contentious.threads import (
    Comment, DataError, ParseReport, Post, RepairPolicy, build_tree,
    load_trees, parse_dataset, tree_to_records,
)
from conftest import T1_COMMENTS, T1_POST, random_tree


def test_parse_dataset_groups_and_counts_orphans(t1_corpus):
    posts_path, comments_path = t1_corpus
    report = ParseReport()
    groups = parse_dataset(posts_path, comments_path, report=report)
    assert [(p.post_id, len(cs)) for p, cs in groups] == [("p1", 4), ("p2", 0)]
    assert report.posts == 2
    assert report.comments == 4
    assert report.orphan_comments == 1


def test_load_trees_sizes(t1_corpus):
    trees = load_trees(*t1_corpus)
    assert [t.size for t in trees] == [4, 0]
    assert trees[0].post.controversy_label is True
    assert trees[1].post.controversy_label is False


def test_malformed_line_skipped_when_lenient(tmp_path):
    posts = tmp_path / "p.jsonl"
    comments = tmp_path / "c.jsonl"
    posts.write_text(json.dumps({"topic": "t", "post_id": "p1",
                                 "post_time": 0, "text": ""}) + "\n")
    comments.write_text("not json\n" + json.dumps(
        {"post_id": "p1", "comment_id": "c1", "comment_time": 1,
         "likes": 0, "text": "", "parent_id": "p1"}) + "\n")
    report = ParseReport()
    groups = parse_dataset(str(posts), str(comments), report=report)
    assert len(groups[0][1]) == 1
    assert len(report.skipped_lines) == 1
    assert ":1:" in report.skipped_lines[0]


def test_malformed_line_fatal_when_strict(tmp_path):
    posts = tmp_path / "p.jsonl"
    comments = tmp_path / "c.jsonl"
    posts.write_text(json.dumps({"topic": "t", "post_id": "p1",
                                 "post_time": 0, "text": ""}) + "\n")
    comments.write_text("{broken\n")
    with pytest.raises(DataError) as err:
        parse_dataset(str(posts), str(comments), strict=True)
    assert "line 1" in str(err.value)


def test_missing_file_is_data_error(tmp_path):
    with pytest.raises(DataError) as err:
        parse_dataset(str(tmp_path / "absent.jsonl"), str(tmp_path / "c.jsonl"))
    assert "absent.jsonl" in str(err.value)


def test_two_node_chain_depths():
    post = Post(topic="t", post_id="p", post_time=0, text="")
    tree = build_tree(post, [
        Comment(post_id="p", comment_id="c1", comment_time=1, likes=0,
                text="", parent_id="p"),
        Comment(post_id="p", comment_id="c2", comment_time=2, likes=0,
                text="", parent_id="c1"),
    ])
    assert tree.depth == {"c1": 1, "c2": 2}
    assert tree.children["p"] == ("c1",)
    assert tree.children["c1"] == ("c2",)


def test_t1_depths(t1_tree):
    assert sorted(t1_tree.depth.values()) == [1, 1, 2, 3]
    assert t1_tree.size == 4


def test_self_parent_dropped():
    post = Post(topic="t", post_id="p", post_time=0, text="")
    tree = build_tree(post, [
        Comment(post_id="p", comment_id="c1", comment_time=1, likes=0,
                text="", parent_id="c1"),
        Comment(post_id="p", comment_id="c2", comment_time=2, likes=0,
                text="", parent_id="p"),
    ], RepairPolicy.DROP)
    assert tree.size == 1
    assert tree.dropped == ("c1",)


def test_cycle_dropped_with_subtree():
    post = Post(topic="t", post_id="p", post_time=0, text="")
    comments = [
        Comment(post_id="p", comment_id="a", comment_time=1, likes=0,
                text="", parent_id="b"),
        Comment(post_id="p", comment_id="b", comment_time=2, likes=0,
                text="", parent_id="a"),
        Comment(post_id="p", comment_id="kid", comment_time=3, likes=0,
                text="", parent_id="a"),
        Comment(post_id="p", comment_id="ok", comment_time=4, likes=0,
                text="", parent_id="p"),
    ]
    tree = build_tree(post, comments, RepairPolicy.DROP)
    assert set(tree.comments) == {"ok"}
    assert set(tree.dropped) == {"a", "b", "kid"}


def test_cycle_reattached_to_root():
    post = Post(topic="t", post_id="p", post_time=0, text="")
    comments = [
        Comment(post_id="p", comment_id="a", comment_time=1, likes=0,
                text="", parent_id="b"),
        Comment(post_id="p", comment_id="b", comment_time=2, likes=0,
                text="", parent_id="a"),
    ]
    tree = build_tree(post, comments, RepairPolicy.REATTACH_ROOT)
    assert tree.size == 2
    assert tree.dropped == ()
    # reattachment keeps the tree acyclic with every node reachable
    assert sorted(tree.depth.values()) == [1, 2]


def test_missing_parent_reattached_to_root():
    post = Post(topic="t", post_id="p", post_time=0, text="")
    comments = [
        Comment(post_id="p", comment_id="c1", comment_time=1, likes=0,
                text="", parent_id="ghost"),
    ]
    tree = build_tree(post, comments, RepairPolicy.REATTACH_ROOT)
    assert tree.parent["c1"] == "p"
    assert tree.depth["c1"] == 1


def test_duplicate_comment_id_rejected():
    post = Post(topic="t", post_id="p", post_time=0, text="")
    comments = [
        Comment(post_id="p", comment_id="c1", comment_time=1, likes=0,
                text="", parent_id="p"),
        Comment(post_id="p", comment_id="c1", comment_time=2, likes=1,
                text="", parent_id="p"),
    ]
    with pytest.raises(DataError) as err:
        build_tree(post, comments)
    assert "c1" in str(err.value)


def test_foreign_post_id_rejected():
    post = Post(topic="t", post_id="p", post_time=0, text="")
    with pytest.raises(DataError):
        build_tree(post, [Comment(post_id="other", comment_id="c1",
                                  comment_time=1, likes=0, text="",
                                  parent_id="p")])


def test_negative_likes_rejected():
    with pytest.raises(DataError):
        Comment(post_id="p", comment_id="c", comment_time=0, likes=-1,
                text="", parent_id="p")


def test_negative_post_time_rejected():
    with pytest.raises(DataError):
        Post(topic="t", post_id="p", post_time=-1, text="")


def test_build_tree_order_independent():
    rng = np.random.default_rng(42)
    for trial in range(20):
        tree = random_tree(rng, max_size=30, post_id=f"p{trial}")
        shuffled = list(tree.comments.values())
        rng.shuffle(shuffled)
        rebuilt = build_tree(tree.post, shuffled)
        assert rebuilt.parent == tree.parent
        assert rebuilt.children == tree.children
        assert rebuilt.depth == tree.depth


def test_edge_count_invariants():
    rng = np.random.default_rng(7)
    for trial in range(20):
        tree = random_tree(rng, max_size=40, post_id=f"p{trial}")
        edges = tree.reply_links(include_root=True)
        assert len(edges) == tree.size
        total_children = sum(len(kids) for kids in tree.children.values())
        assert total_children == len(edges)


def test_round_trip_records():
    rng = np.random.default_rng(3)
    for trial in range(10):
        tree = random_tree(rng, max_size=25, post_id=f"p{trial}")
        post_rec, comment_recs = tree_to_records(tree)
        post = Post(topic=post_rec["topic"], post_id=post_rec["post_id"],
                    post_time=post_rec["post_time"], text=post_rec["text"],
                    controversy_label=bool(post_rec["label"])
                    if post_rec.get("label") is not None else None)
        comments = [Comment(**rec) for rec in comment_recs]
        rebuilt = build_tree(post, comments)
        assert rebuilt.comments == tree.comments
        assert rebuilt.parent == tree.parent
        assert rebuilt.post == tree.post


def test_comment_storage_order_is_canonical():
    # float reductions downstream follow dict insertion order, so the
    # builder must store comments identically no matter the input order
    # or the process hash seed
    rng = np.random.default_rng(11)
    for trial in range(20):
        tree = random_tree(rng, max_size=30, post_id=f"p{trial}")
        assert list(tree.comments) == sorted(tree.comments)
        assert list(tree.parent) == sorted(tree.parent)
