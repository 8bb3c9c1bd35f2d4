import json
from pathlib import Path

import pytest

from distparse import pcfg
from distparse.cli import main
from distparse.trees import parse_bracketed, preprocess, serialize_bracketed, write_treebank

SAMPLE = Path(__file__).resolve().parent.parent / "data" / "sample_treebank.mrg"


@pytest.fixture
def mini_treebank(tmp_path):
    path = tmp_path / "mini.mrg"
    write_treebank(pcfg.generate_trees(40, seed=900), path)
    return path


def canonical(path):
    trees = parse_bracketed(Path(path).read_text(encoding="utf-8"))
    out = []
    for tree in trees:
        cleaned = preprocess(tree)
        if cleaned is not None:
            out.append(serialize_bracketed(cleaned) + "\n")
    return "".join(out)


class TestEncodeDecode:
    def test_roundtrip_is_byte_identical(self, tmp_path):
        jsonl = tmp_path / "sample.jsonl"
        out = tmp_path / "sample.out.mrg"
        assert main(["encode", str(SAMPLE), "--out", str(jsonl)]) == 0
        assert main(["decode", str(jsonl), "--out", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == canonical(SAMPLE)

    def test_engines_produce_identical_files(self, tmp_path, mini_treebank):
        jsonl = tmp_path / "mini.jsonl"
        assert main(["encode", str(mini_treebank), "--out", str(jsonl)]) == 0
        outputs = []
        for engine in ("scan", "rmq", "stack"):
            out = tmp_path / f"out.{engine}.mrg"
            assert main(["decode", str(jsonl), "--engine", engine, "--out", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_jsonl_shape(self, tmp_path):
        jsonl = tmp_path / "sample.jsonl"
        main(["encode", str(SAMPLE), "--out", str(jsonl)])
        lines = jsonl.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 25
        for line in lines:
            record = json.loads(line)
            assert len(record["distances"]) == len(record["words"]) - 1

    def test_empty_input_gives_empty_output(self, tmp_path):
        src = tmp_path / "empty.mrg"
        src.write_text("")
        jsonl = tmp_path / "empty.jsonl"
        out = tmp_path / "empty.out.mrg"
        assert main(["encode", str(src), "--out", str(jsonl)]) == 0
        assert jsonl.read_text() == ""
        assert main(["decode", str(jsonl), "--out", str(out)]) == 0
        assert out.read_text() == ""

    def test_right_branching_three_word_heights(self, tmp_path):
        src = tmp_path / "three.mrg"
        src.write_text("(S (T0 w0) (X (T1 w1) (T2 w2)))\n")
        jsonl = tmp_path / "three.jsonl"
        assert main(["encode", str(src), "--out", str(jsonl)]) == 0
        record = json.loads(jsonl.read_text())
        assert record["distances"] == [2.0, 1.0]

    def test_trees_emptied_by_preprocessing_are_skipped(self, tmp_path, capsys):
        src = tmp_path / "traces.mrg"
        src.write_text("(S (NP (-NONE- *)))\n(S (NN dog))\n")
        jsonl = tmp_path / "traces.jsonl"
        assert main(["encode", str(src), "--out", str(jsonl)]) == 0
        assert len(jsonl.read_text().splitlines()) == 1
        assert "1 trees empty after preprocessing" in capsys.readouterr().err
        sidecar = json.loads((tmp_path / "traces.jsonl.run.json").read_text())
        assert sidecar["skipped_empty"] == 1

    def test_sidecar_metadata_written(self, tmp_path):
        jsonl = tmp_path / "sample.jsonl"
        main(["encode", str(SAMPLE), "--out", str(jsonl)])
        sidecar = json.loads((tmp_path / "sample.jsonl.run.json").read_text())
        assert sidecar["command"] == "encode"
        assert sidecar["trees"] == 25
        assert "version" in sidecar

    def test_parse_error_reported_with_offset(self, tmp_path, capsys):
        bad = tmp_path / "bad.mrg"
        bad.write_text("(S (NP (NN dog)")
        assert main(["encode", str(bad)]) == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "offset" in err

    def test_malformed_jsonl_names_line(self, tmp_path, capsys):
        jsonl = tmp_path / "bad.jsonl"
        jsonl.write_text('{"words": ["a"]}\n')
        assert main(["decode", str(jsonl)]) == 1
        assert "line 1" in capsys.readouterr().err

    def test_missing_file_fails_cleanly(self, capsys):
        assert main(["encode", "/nonexistent/path.mrg"]) == 1
        assert capsys.readouterr().err.startswith("error: io:")


class TestRoundtripCommand:
    def test_sample_treebank_has_no_mismatches(self, capsys):
        assert main(["roundtrip", str(SAMPLE)]) == 0
        assert "25 trees, 0 mismatches" in capsys.readouterr().out

    def test_single_word_corpus(self, tmp_path, capsys):
        path = tmp_path / "one.mrg"
        path.write_text("(INTJ (UH Yes))\n")
        assert main(["roundtrip", str(path)]) == 0
        assert "1 trees, 0 mismatches" in capsys.readouterr().out

    def test_exhaustive_small_tree_corpus(self, tmp_path, capsys):
        # every binary shape over 2-6 leaves, expanded to its n-ary tree
        from distparse.binarize import EMPTY_LABEL, Internal, debinarize
        from helpers import binary_shapes, materialize_shape

        trees = []
        for n in range(2, 7):
            for shape in binary_shapes(n):
                tree = materialize_shape(shape)
                if isinstance(tree, Internal) and tree.label == EMPTY_LABEL:
                    tree.label = "S"
                trees.append(debinarize(tree))
        path = tmp_path / "exhaustive.mrg"
        write_treebank(trees, path)
        assert main(["roundtrip", str(path)]) == 0
        assert f"{len(trees)} trees, 0 mismatches" in capsys.readouterr().out


class TestTrainPredictScore:
    def test_full_pipeline(self, tmp_path, mini_treebank, capsys):
        ckpt = tmp_path / "model.json"
        metrics = tmp_path / "metrics.jsonl"
        code = main(
            [
                "train",
                "--train", str(mini_treebank),
                "--dev", str(mini_treebank),
                "--epochs", "3",
                "--seed", "11",
                "--out", str(ckpt),
                "--metrics", str(metrics),
            ]
        )
        assert code == 0
        assert ckpt.exists()
        lines = metrics.read_text().splitlines()
        assert len(lines) == 4  # run header + 3 epochs
        run_meta = json.loads(lines[0])["run"]
        assert run_meta["train_config"]["seed"] == 11

        pred = tmp_path / "pred.mrg"
        assert main(
            ["predict", str(mini_treebank), "--model", str(ckpt), "--out", str(pred)]
        ) == 0
        assert len(pred.read_text().splitlines()) == 40

        capsys.readouterr()
        assert main(["score", str(mini_treebank), str(pred)]) == 0
        out = capsys.readouterr().out
        assert "labeled" in out and "word label accuracy" in out

        report = tmp_path / "report.json"
        assert main(
            ["score", str(mini_treebank), str(pred), "--json", "--out", str(report)]
        ) == 0
        payload = json.loads(report.read_text())
        assert 0.0 <= payload["labeled"]["f1"] <= 100.0
        assert payload["labeled"]["f1"] <= payload["unlabeled"]["f1"] + 1e-9

    def test_same_seed_gives_identical_metrics(self, tmp_path, mini_treebank):
        ckpt = tmp_path / "model.json"
        metrics = tmp_path / "metrics.jsonl"
        argv = [
            "train",
            "--train", str(mini_treebank),
            "--epochs", "2",
            "--seed", "5",
            "--out", str(ckpt),
            "--metrics", str(metrics),
        ]
        logs = []
        checkpoints = []
        for _ in range(2):
            assert main(argv) == 0
            logs.append(metrics.read_bytes())
            checkpoints.append(ckpt.read_bytes())
        assert logs[0] == logs[1]
        assert checkpoints[0] == checkpoints[1]

    def test_config_file_with_flag_overrides(self, tmp_path, mini_treebank):
        config = tmp_path / "train.cfg"
        config.write_text(
            "epochs = 1\nseed = 9\nhidden_dim = 8  # keep it fast\n"
            "embed_dim = 8\nconv_channels = 8\nff_hidden = 8\n"
        )
        ckpt = tmp_path / "model.json"
        assert main(
            [
                "train",
                "--train", str(mini_treebank),
                "--config", str(config),
                "--epochs", "2",
                "--out", str(ckpt),
            ]
        ) == 0
        payload = json.loads(ckpt.read_text())
        assert payload["metadata"]["train_config"]["epochs"] == 2  # flag wins
        assert payload["metadata"]["train_config"]["seed"] == 9
        assert payload["model"]["hidden_dim"] == 8

    def test_unknown_config_key_rejected(self, tmp_path, mini_treebank, capsys):
        config = tmp_path / "bad.cfg"
        config.write_text("learnign_rate = 0.1\n")
        assert main(
            [
                "train",
                "--train", str(mini_treebank),
                "--config", str(config),
                "--out", str(tmp_path / "m.json"),
            ]
        ) == 1
        assert "unknown keys" in capsys.readouterr().err

    def test_score_leaf_mismatch_fails(self, tmp_path, capsys):
        a = tmp_path / "a.mrg"
        b = tmp_path / "b.mrg"
        a.write_text("(S (NN dog))\n")
        b.write_text("(S (NN cat))\n")
        assert main(["score", str(a), str(b)]) == 1
        assert "sentence 0" in capsys.readouterr().err

    def test_bad_checkpoint_fails_cleanly(self, tmp_path, mini_treebank, capsys):
        bogus = tmp_path / "bogus.json"
        bogus.write_text("{}")
        assert main(
            ["predict", str(mini_treebank), "--model", str(bogus)]
        ) == 1
        assert capsys.readouterr().err.startswith("error: checkpoint:")


class TestBench:
    def test_csv_output_and_agreement(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        assert main(
            [
                "bench",
                "--sizes", "200,400",
                "--reps", "3",
                "--shape", "left-chain",
                "--out", str(out),
            ]
        ) == 0
        lines = out.read_text().splitlines()
        header_index = next(i for i, l in enumerate(lines) if not l.startswith("#"))
        assert lines[header_index] == (
            "engine,shape,size,repetitions,median_seconds,min_seconds"
        )
        data = [l for l in lines[header_index + 1 :] if l]
        assert len(data) == 6  # 2 sizes x 3 engines
        err = capsys.readouterr().err
        assert "doubling ratios" in err

    def test_unknown_engine_rejected(self, capsys):
        assert main(["bench", "--engines", "warp", "--sizes", "10"]) == 1
        assert "unknown engine" in capsys.readouterr().err

    def test_too_small_size_rejected(self, capsys):
        assert main(["bench", "--sizes", "1"]) == 1


class TestArgumentErrors:
    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit) as info:
            main(["encode", "x.mrg", "--frobnicate"])
        assert info.value.code == 2

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
