import json

import pytest

from acosgen.cli import main

from conftest import MINI_DATASET


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestStats:
    def test_text_output(self, capsys, mini_dataset_file):
        code, out, _ = run(capsys, "stats", "--dataset", str(mini_dataset_file))
        assert code == 0
        assert "sentences        3" in out

    def test_json_output(self, capsys, mini_dataset_file):
        code, out, _ = run(capsys, "stats", "--dataset", str(mini_dataset_file), "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["num_sentences"] == 3
        assert payload["quads"]["EAEO"]["count"] == 3

    def test_missing_file_exit_2(self, capsys, tmp_path):
        code, _, err = run(capsys, "stats", "--dataset", str(tmp_path / "nope.tsv"))
        assert code == 2
        assert "no such file" in err

    def test_env_var_flag(self, capsys, mini_dataset_file, monkeypatch):
        monkeypatch.setenv("ACOSGEN_DATASET", str(mini_dataset_file))
        code, out, _ = run(capsys, "stats")
        assert code == 0
        assert "sentences" in out


class TestLinearize:
    def test_line_aligned_and_deterministic(self, capsys, mini_dataset_file, tmp_path):
        out_a = tmp_path / "a.txt"
        out_b = tmp_path / "b.txt"
        for out in (out_a, out_b):
            code, _, _ = run(
                capsys, "linearize", "--dataset", str(mini_dataset_file), "--out", str(out)
            )
            assert code == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        lines = out_a.read_text().splitlines()
        assert len(lines) == 3
        assert lines[0] == "the food quality | the pizza is great | positive"

    def test_paraphrase_style(self, capsys, mini_dataset_file):
        code, out, _ = run(
            capsys, "linearize", "--dataset", str(mini_dataset_file), "--style", "paraphrase"
        )
        assert code == 0
        assert out.splitlines()[0] == "FOOD#QUALITY is great because pizza is great"

    def test_unknown_category_names_label_and_line(self, capsys, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("a b\t0,1 NOT#REAL 2 -1,-1\n", encoding="utf-8")
        code, _, err = run(capsys, "linearize", "--dataset", str(path))
        assert code == 2
        assert "NOT#REAL" in err
        assert "line 1" in err


class TestEvaluate:
    def _targets(self, capsys, dataset, tmp_path, style="gen-nat"):
        target_path = tmp_path / "targets.txt"
        code, _, _ = run(
            capsys,
            "linearize",
            "--dataset",
            str(dataset),
            "--style",
            style,
            "--out",
            str(target_path),
        )
        assert code == 0
        return target_path

    def test_identity_pipeline_perfect(self, capsys, mini_dataset_file, tmp_path):
        preds = self._targets(capsys, mini_dataset_file, tmp_path)
        code, out, _ = run(
            capsys,
            "evaluate",
            "--dataset",
            str(mini_dataset_file),
            "--predictions",
            str(preds),
            "--json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["f1"] == 1.0
        assert payload["dropped_segments"] == 0

    def test_blank_predictions_zero(self, capsys, mini_dataset_file, tmp_path):
        preds = tmp_path / "blank.txt"
        preds.write_text("\n\n\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            "evaluate",
            "--dataset",
            str(mini_dataset_file),
            "--predictions",
            str(preds),
            "--json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["precision"] == payload["recall"] == payload["f1"] == 0.0

    def test_garbage_line_counted_not_fatal(self, capsys, mini_dataset_file, tmp_path):
        preds = self._targets(capsys, mini_dataset_file, tmp_path)
        lines = preds.read_text().splitlines()
        lines[1] = "complete nonsense"
        preds.write_text("\n".join(lines) + "\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            "evaluate",
            "--dataset",
            str(mini_dataset_file),
            "--predictions",
            str(preds),
            "--json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["dropped_segments"] >= 1
        assert payload["f1"] > 0

    def test_line_count_mismatch(self, capsys, mini_dataset_file, tmp_path):
        preds = tmp_path / "short.txt"
        preds.write_text("only one line\n", encoding="utf-8")
        code, _, err = run(
            capsys, "evaluate", "--dataset", str(mini_dataset_file), "--predictions", str(preds)
        )
        assert code == 2
        assert "1 lines for 3 gold" in err


class TestSclCheck:
    def test_small_run_passes(self, capsys):
        code, out, _ = run(
            capsys, "scl-check", "--seed", "0", "--oracle-batches", "40", "--grad-batches", "4"
        )
        assert code == 0
        assert "40/40" in out
        assert "ok" in out


class TestSclDemo:
    def test_json_report(self, capsys, tmp_path):
        reps = tmp_path / "reps.tsv"
        code, out, _ = run(
            capsys,
            "scl-demo",
            "--synthetic",
            "40",
            "--steps",
            "10",
            "--seed",
            "3",
            "--json",
            "--reps-out",
            str(reps),
        )
        assert code == 0
        payload = json.loads(out)
        assert set(payload["characteristics"]) == {"sentiment", "aspect", "opinion"}
        assert reps.exists()

    def test_deterministic_given_seed(self, capsys):
        args = ("scl-demo", "--synthetic", "30", "--steps", "8", "--seed", "9", "--json")
        _, out_a, _ = run(capsys, *args)
        _, out_b, _ = run(capsys, *args)
        assert out_a == out_b

    def test_dataset_corpus(self, capsys, tmp_path):
        # enough structure for at least one trainable characteristic
        lines = []
        for i in range(8):
            sent = i % 3
            if i % 2:
                lines.append(f"w{i} x{i} y{i} z{i}\t0,1 C{i % 4} {sent} 1,2")
            else:
                lines.append(f"w{i} x{i} y{i} z{i}\t-1,-1 C{i % 4} {sent} -1,-1")
        path = tmp_path / "d.tsv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        code, out, _ = run(
            capsys, "scl-demo", "--dataset", str(path), "--steps", "3", "--json"
        )
        assert code == 0
        assert json.loads(out)["steps"] == 3


class TestSclConfigPlumbing:
    def test_scl_config_file_and_overrides(self, capsys, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("tau=0.5\nalpha=0.2\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            "scl-demo",
            "--synthetic",
            "20",
            "--steps",
            "2",
            "--scl-config",
            str(cfg),
            "--tau",
            "0.25",
            "--json",
        )
        assert code == 0

    def test_bad_config_exit_2(self, capsys, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("bogus=1\n", encoding="utf-8")
        code, _, err = run(
            capsys, "scl-demo", "--synthetic", "20", "--steps", "1", "--scl-config", str(cfg)
        )
        assert code == 2
        assert "unknown key" in err
