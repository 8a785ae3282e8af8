"""End-to-end CLI behaviour: pipelines, exit codes, stream separation."""
import csv
import io
import json
import os
import subprocess
import sys

import pytest

from contentious.cli import build_parser, main
from contentious.features import FEATURE_NAMES

pytestmark = pytest.mark.usefixtures("capsys")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    """A small synthetic corpus plus a feature CSV and a trained model."""
    root = tmp_path_factory.mktemp("cli")
    code = main(["synth", "--out", str(root / "data"), "--num-posts", "40",
                 "--seed", "0"])
    assert code == 0
    posts = str(root / "data" / "posts.jsonl")
    comments = str(root / "data" / "comments.jsonl")
    feats = str(root / "feats.csv")
    assert main(["features", "--posts", posts, "--comments", comments,
                 "--out", feats]) == 0
    model = str(root / "model.json")
    assert main(["train", "--features", feats, "--algorithm", "gbdt_goss_efb",
                 "--mode", "psychology", "--out", model, "--num-trees", "40",
                 "--min-samples-leaf", "5"]) == 0
    return {"root": root, "posts": posts, "comments": comments,
            "features": feats, "model": model}


class TestPipeline:
    def test_synth_prints_paths_on_stdout(self, capsys, tmp_path):
        code, out, err = run_cli(capsys, "synth", "--out", str(tmp_path),
                                 "--num-posts", "5", "--seed", "1")
        assert code == 0
        lines = out.splitlines()
        assert [os.path.basename(p) for p in lines] == ["posts.jsonl",
                                                        "comments.jsonl"]
        assert all(os.path.exists(p) for p in lines)
        assert "synthetic corpus" in err and "synthetic corpus" not in out

    def test_feature_csv_has_one_row_per_post(self, corpus):
        with open(corpus["features"], encoding="utf-8") as handle:
            rows = rows_of(handle.read())
        assert len(rows) == 80
        assert set(FEATURE_NAMES) <= set(rows[0])

    def test_evaluate_scores_every_row(self, capsys, corpus):
        code, out, err = run_cli(capsys, "evaluate", "--features",
                                 corpus["features"], "--model", corpus["model"])
        assert code == 0
        rows = rows_of(out)
        assert len(rows) == 80
        assert set(rows[0]) == {"post_id", "label", "predicted", "score"}
        assert "accuracy" in err and "accuracy" not in out
        acc = float(err.split("accuracy ")[1].split()[0])
        assert acc >= 0.9

    def test_importance_lists_both_methods(self, capsys, corpus):
        code, out, _ = run_cli(capsys, "importance", "--features",
                               corpus["features"], "--model", corpus["model"],
                               "--method", "both", "--repeats", "3")
        assert code == 0
        rows = rows_of(out)
        methods = {r["method"] for r in rows}
        assert methods == {"permutation", "gain"}
        assert len(rows) == 2 * len(FEATURE_NAMES)

    def test_ks_separates_the_classes(self, capsys, corpus):
        code, out, _ = run_cli(capsys, "ks", "--features", corpus["features"])
        assert code == 0
        rows = {r["feature"]: r for r in rows_of(out)}
        assert set(rows) == set(FEATURE_NAMES)
        assert float(rows["p_a"]["p_value"]) < 0.05
        assert all(0.0 <= float(r["statistic"]) <= 1.0 for r in rows.values())
        assert rows["p_a"]["n_neutral"] == rows["p_a"]["n_controversial"] == "40"

    def test_ks_single_feature_flag(self, capsys, corpus):
        code, out, _ = run_cli(capsys, "ks", "--features", corpus["features"],
                               "--feature", "q")
        assert code == 0
        assert [r["feature"] for r in rows_of(out)] == ["q"]

    def test_ingest_reports_tree_shapes(self, capsys, corpus):
        code, out, err = run_cli(capsys, "ingest", "--posts", corpus["posts"],
                                 "--comments", corpus["comments"])
        assert code == 0
        rows = rows_of(out)
        assert len(rows) == 80
        assert {r["label"] for r in rows} == {"0", "1"}
        assert all(int(r["comments"]) >= 2 for r in rows)
        assert "built 80 trees" in err

    def test_gbdt_flags_reach_training(self, capsys, corpus, tmp_path):
        model = str(tmp_path / "tuned.json")
        code, _, _ = run_cli(capsys, "train", "--features", corpus["features"],
                             "--algorithm", "gbdt", "--mode", "psychology",
                             "--out", model, "--num-trees", "7",
                             "--learning-rate", "0.3", "--max-leaves", "4",
                             "--bins", "16")
        assert code == 0
        payload = json.load(open(model, encoding="utf-8"))
        blob = json.dumps(payload)
        assert '"num_trees": 7' in blob
        assert '"learning_rate": 0.3' in blob


class TestT1Features:
    def test_reference_tree_round_trip(self, capsys, t1_corpus, tmp_path):
        posts, comments = t1_corpus
        out_csv = str(tmp_path / "t1.csv")
        code, _, err = run_cli(capsys, "features", "--posts", str(posts),
                               "--comments", str(comments), "--out", out_csv)
        assert code == 0
        assert "wrote 2 feature rows" in err
        with open(out_csv, encoding="utf-8") as handle:
            rows = {r["post_id"]: r for r in rows_of(handle.read())}
        assert set(rows) == {"p1", "p2"}
        t1 = rows["p1"]
        assert float(t1["n"]) == 4.0
        assert float(t1["p_a"]) == 0.5
        assert float(t1["p_t"]) == 0.0
        assert float(t1["t_avg"]) == 17.5
        assert t1["label"] == "1"
        quiet = rows["p2"]
        assert float(quiet["n"]) == 0.0
        assert quiet["label"] == "0"

    def test_horizon_flag_slices_before_features(self, capsys, t1_corpus,
                                                 tmp_path):
        posts, comments = t1_corpus
        out_csv = str(tmp_path / "t1h.csv")
        code, _, _ = run_cli(capsys, "features", "--posts", str(posts),
                             "--comments", str(comments), "--out", out_csv,
                             "--horizon", "25")
        assert code == 0
        with open(out_csv, encoding="utf-8") as handle:
            rows = {r["post_id"]: r for r in rows_of(handle.read())}
        assert float(rows["p1"]["n"]) == 2.0

    def test_one_page_flag_uses_page_mask(self, capsys, t1_corpus, tmp_path):
        posts, comments = t1_corpus
        out_csv = str(tmp_path / "t1p.csv")
        code, _, _ = run_cli(capsys, "features", "--posts", str(posts),
                             "--comments", str(comments), "--out", out_csv,
                             "--one-page-ratio", "1.0")
        assert code == 0
        with open(out_csv, encoding="utf-8") as handle:
            rows = {r["post_id"]: r for r in rows_of(handle.read())}
        assert float(rows["p1"]["p_a"]) == 0.5
        assert float(rows["p1"]["d"]) == 0.0


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 1
        assert "usage error" in err

    def test_unknown_flag(self, capsys):
        code, _, err = run_cli(capsys, "synth", "--out", "x", "--wat")
        assert code == 1
        assert "usage error" in err

    def test_missing_required_flag(self, capsys):
        code, _, err = run_cli(capsys, "train", "--algorithm", "logreg")
        assert code == 1
        assert "--features" in err or "features" in err

    def test_no_arguments_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 1

    def test_missing_config_names_path(self, capsys):
        code, _, err = run_cli(capsys, "experiment", "--config", "absent.toml")
        assert code == 2
        assert "absent.toml" in err

    def test_strict_ingest_reports_line_number(self, capsys, tmp_path):
        posts = tmp_path / "posts.jsonl"
        comments = tmp_path / "comments.jsonl"
        posts.write_text('{"topic": "t", "post_id": "p", "post_time": 0, '
                         '"text": "", "label": 0}\n', encoding="utf-8")
        comments.write_text("not json\n", encoding="utf-8")
        code, _, err = run_cli(capsys, "ingest", "--posts", str(posts),
                               "--comments", str(comments), "--strict")
        assert code == 2
        assert ":1:" in err or "line 1" in err

    def test_nonpositive_horizon_is_usage_error(self, capsys, t1_corpus,
                                                tmp_path):
        posts, comments = t1_corpus
        code, _, err = run_cli(capsys, "features", "--posts", str(posts),
                               "--comments", str(comments),
                               "--out", str(tmp_path / "x.csv"),
                               "--horizon", "0")
        assert code == 1
        assert "horizon" in err

    def test_evaluate_wrong_columns_is_data_error(self, capsys, corpus,
                                                  tmp_path):
        bogus = tmp_path / "bogus.csv"
        bogus.write_text("post_id,label,n\nx,1,3.0\n", encoding="utf-8")
        code, _, err = run_cli(capsys, "evaluate", "--features", str(bogus),
                               "--model", corpus["model"])
        assert code == 2
        assert "error" in err


class TestHelp:
    def test_top_level_help_lists_every_subcommand(self, capsys):
        code, out, _ = run_cli(capsys, "--help")
        assert code == 0
        for name in ("ingest", "features", "train", "evaluate", "importance",
                     "ks", "synth", "experiment", "plot"):
            assert name in out

    def test_every_flag_of_every_subcommand_is_documented(self):
        parser = build_parser()
        sub_action = next(a for a in parser._actions
                          if isinstance(a, type(a)) and hasattr(a, "choices")
                          and a.choices and "synth" in a.choices)
        for name, sub in sub_action.choices.items():
            text = sub.format_help()
            for action in sub._actions:
                assert action.help, f"{name}: {action.option_strings} lacks help"
                for opt in action.option_strings:
                    assert opt in text

    @pytest.mark.parametrize("name", ["synth", "train", "experiment"])
    def test_subcommand_help_exits_zero(self, capsys, name):
        code, out, _ = run_cli(capsys, name, "--help")
        assert code == 0
        assert "--" in out


EXPERIMENT_CONFIG = """
[synthetic]
num_posts = 16
seed = 5
max_size = 30

[split]
seeds = [0, 1]

[run]
algorithms = ["logreg"]
modes = ["structure", "psychology"]
one_page_ratios = [1.0]
time_horizons = [3600]
detail_algorithm = "logreg"
importance_repeats = 2
output = "{out}"
"""


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("exp")
    config = root / "exp.toml"
    config.write_text(EXPERIMENT_CONFIG.replace("{out}", str(root / "out")),
                      encoding="utf-8")
    buffer = io.StringIO()
    stdout, sys.stdout = sys.stdout, buffer
    try:
        assert main(["experiment", "--config", str(config)]) == 0
    finally:
        sys.stdout = stdout
    return buffer.getvalue().strip()


class TestExperimentCommand:
    def test_prints_run_dir_with_report(self, run_dir):
        assert os.path.isfile(os.path.join(run_dir, "report.json"))
        assert os.path.isfile(os.path.join(run_dir, "matrix.csv"))

    def test_plot_renders_svgs_from_report(self, capsys, run_dir, tmp_path):
        report = os.path.join(run_dir, "report.json")
        code, out, _ = run_cli(capsys, "plot", "--report", report,
                               "--out", str(tmp_path / "plots"))
        assert code == 0
        paths = out.splitlines()
        assert paths
        assert all(p.endswith(".svg") and os.path.isfile(p) for p in paths)

    def test_plot_rejects_bad_json(self, capsys, tmp_path):
        bad = tmp_path / "report.json"
        bad.write_text("{", encoding="utf-8")
        code, _, err = run_cli(capsys, "plot", "--report", str(bad),
                               "--out", str(tmp_path / "p"))
        assert code == 2
        assert "JSON" in err


class TestRerunsAreByteIdentical:
    def test_feature_csv(self, capsys, corpus, tmp_path):
        paths = [str(tmp_path / f"f{i}.csv") for i in (1, 2)]
        for path in paths:
            assert main(["features", "--posts", corpus["posts"],
                         "--comments", corpus["comments"], "--out", path]) == 0
        capsys.readouterr()
        a, b = (open(p, "rb").read() for p in paths)
        assert a == b

    def test_model_json(self, capsys, corpus, tmp_path):
        paths = [str(tmp_path / f"m{i}.json") for i in (1, 2)]
        for path in paths:
            assert main(["train", "--features", corpus["features"],
                         "--algorithm", "dtree", "--mode", "structure",
                         "--out", path]) == 0
        capsys.readouterr()
        a, b = (open(p, "rb").read() for p in paths)
        assert a == b


class TestEntryPoints:
    def test_module_invocation(self):
        proc = subprocess.run([sys.executable, "-m", "contentious", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "synth" in proc.stdout

    def test_module_invocation_propagates_usage_errors(self):
        proc = subprocess.run([sys.executable, "-m", "contentious", "nope"],
                              capture_output=True, text=True)
        assert proc.returncode == 1
