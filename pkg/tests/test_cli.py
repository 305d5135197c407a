import csv
import json
import os

import pytest

import eaiadd
from eaiadd.eaiadd import run
from eaiadd.helper_funcs import load_config, load_tdcf_params
from eaiadd.synth_commands import synth_commands

EXAMPLES = os.path.join(os.path.dirname(eaiadd.__file__), "examples")
TDCF_PARAMS = os.path.join(EXAMPLES, "tdcf_asvspoof2019.yaml")
TINY = ["--frames", "8", "--d-e", "4", "--d-a", "4", "--latent-dim", "2"]
QUICK = ["--epochs", "2", "--d-model", "4", "--k", "1", "--batch-size", "4",
         "--learning-rate", "0.01"]


@pytest.fixture
def trained(tmp_path, small_dataset, capsys):
    ckpt = tmp_path / "model.eaim"
    assert run(["train", "-m", str(small_dataset), "-o", str(ckpt)]
               + QUICK) == 0
    capsys.readouterr()
    return ckpt


def test_synth(tmp_path, capsys):
    out = tmp_path / "data"
    assert run(["synth", "-o", str(out), "--num-bonafide", "3",
                "--num-spoof", "2", "--seed", "1"] + TINY) == 0
    assert len(list(out.glob("*.eaif"))) == 5
    assert (out / "manifest.jsonl").exists()
    assert "Wrote 5 bundles" in capsys.readouterr().err


def test_train_prints_final_breakdown(tmp_path, small_dataset, capsys):
    ckpt = tmp_path / "model.eaim"
    history = tmp_path / "history.json"
    assert run(["train", "-m", str(small_dataset), "-o", str(ckpt),
                "--history", str(history)] + QUICK) == 0
    captured = capsys.readouterr()
    final = json.loads(captured.out)
    assert set(final) == {"ce", "eval", "s", "total"}
    assert captured.err.count("epoch") == 2
    assert "Training" in captured.err
    assert json.loads(history.read_text())[-1] == final
    assert ckpt.read_bytes()[:4] == b"EAIM"


def test_train_is_reproducible(tmp_path, small_dataset, capsys):
    outputs = []
    for name in ("a", "b"):
        assert run(["train", "-m", str(small_dataset),
                    "-o", str(tmp_path / name)] + QUICK) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


@pytest.mark.parametrize("flags", [["--no-eaam"], ["--no-eval"],
                                   ["--no-hig"], ["--linear-streams"],
                                   ["--graph-layer", "gcn"]])
def test_train_ablations(tmp_path, small_dataset, flags):
    assert run(["train", "-m", str(small_dataset),
                "-o", str(tmp_path / "m.eaim")] + QUICK + flags) == 0


def test_eval_without_tdcf(trained, small_dataset, capsys):
    assert run(["eval", "--checkpoint", str(trained),
                "-m", str(small_dataset)]) == 0
    captured = capsys.readouterr()
    result = json.loads(captured.out)
    assert set(result) == {"eer", "eer_threshold", "n_bonafide", "n_spoof"}
    assert result["n_bonafide"] == result["n_spoof"] == 4
    assert 0.0 <= result["eer"] <= 1.0
    assert "published" in captured.err and "chosen" in captured.err
    assert "Scoring %s" % trained in captured.err


def test_eval_with_tdcf_and_several_runs(tmp_path, trained, small_dataset,
                                         capsys):
    out = tmp_path / "metrics.json"
    assert run(["eval", "--checkpoint", str(trained),
                "--checkpoint", str(trained), "-m", str(small_dataset),
                "--tdcf-params", TDCF_PARAMS, "-o", str(out)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert json.loads(out.read_text()) == result
    assert len(result["runs"]) == 2
    assert result["runs"][0]["min_tdcf"] >= 0.0
    assert result["mean_eer"] == result["runs"][0]["eer"]
    assert result["mean_min_tdcf"] == result["runs"][0]["min_tdcf"]


def test_analyze(tmp_path, small_dataset, capsys):
    out = tmp_path / "analysis"
    assert run(["analyze", "-m", str(small_dataset), "-o", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["bonafide"]["n"] + summary["bonafide"]["n_skipped"] == 4
    assert len(summary["per_bundle"]) == 8
    with open(out / "bonafide_0000.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["frame_index", "emo_change", "acu_change"]
    assert len(rows) == 8
    assert [r[0] for r in rows[1:]] == [str(i) for i in range(1, 8)]
    assert "Change correlation" in capsys.readouterr().out


def test_gradcheck_is_repeatable(capsys):
    argv = ["gradcheck", "--seed", "1", "--frames", "4", "--d-model", "2"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert "classifier" in first and "eaam.sinc_cutoffs" in first
    assert "Checking gradients" not in first


def test_usage_error_exits_1(capsys):
    assert run(["train", "--no-such-flag"]) == 1
    assert run(["synth", "-o", "x", "--frames", "3"]) == 1


def test_validation_error_exits_1(tmp_path, capsys):
    assert run(["synth", "-o", str(tmp_path), "--latent-dim", "9"]
               + TINY[:6]) == 1
    assert "latent_dim" in capsys.readouterr().err


def test_missing_manifest_exits_2(tmp_path, capsys):
    assert run(["analyze", "-m", str(tmp_path / "nope.jsonl"),
                "-o", str(tmp_path / "out")]) == 2


def test_corrupt_bundle_exits_2(tmp_path, capsys):
    (tmp_path / "bad.eaif").write_bytes(b"NOPE" + bytes(40))
    (tmp_path / "m.jsonl").write_text(
        '{"id": "bad", "path": "bad.eaif", "label": "spoof"}\n')
    assert run(["analyze", "-m", str(tmp_path / "m.jsonl"),
                "-o", str(tmp_path / "out")]) == 2
    assert "bundle 'bad'" in capsys.readouterr().err


def test_bundle_with_invalid_id_exits_2(tmp_path, capsys):
    data = bytearray(b"EAIF" + bytes(19))
    data[4] = 1
    data[8] = 2
    data[12] = data[16] = 1
    data[21] = 2
    data += b"\xff\xfe" + bytes(8 * 5)
    (tmp_path / "ab.eaif").write_bytes(bytes(data))
    (tmp_path / "m.jsonl").write_text(
        '{"id": "ab", "path": "ab.eaif", "label": "bonafide"}\n')
    assert run(["analyze", "-m", str(tmp_path / "m.jsonl"),
                "-o", str(tmp_path / "out")]) == 2
    err = capsys.readouterr().err
    assert "bundle 'ab'" in err and "not valid UTF-8" in err


def _failing_dataset(*args, **kwargs):
    raise RuntimeError("generator exploded")


def test_unexpected_error_hides_traceback(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(synth_commands, "gen_dataset", _failing_dataset)
    # "-d" here is the output directory, not the root debug flag
    assert run(["synth", "-o", "-d"]) == 1
    err = capsys.readouterr().err
    assert "generator exploded" in err
    assert "Traceback" not in err
    assert "pass -d/--debug" in err


def test_debug_prints_traceback(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(synth_commands, "gen_dataset", _failing_dataset)
    assert run(["--debug", "synth", "-o", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "Traceback" in err and "generator exploded" in err


def test_bad_tdcf_params_exit_1(tmp_path, trained, small_dataset, capsys):
    params = tmp_path / "tdcf.yaml"
    params.write_text("p_target: 0.5\n")
    assert run(["eval", "--checkpoint", str(trained),
                "-m", str(small_dataset), "--tdcf-params", str(params)]) == 1
    assert "Config Errors" in capsys.readouterr().err


def test_config_file_supplies_defaults(tmp_path, capsys):
    config = tmp_path / "config.yaml"
    config.write_text(
        "synth:\n"
        "  out_dir: %s\n"
        "  num_bonafide: 2\n"
        "  num_spoof: 1\n"
        "  frames: 8\n"
        "  d_e: 4\n"
        "  d_a: 4\n"
        "  latent_dim: 2\n" % (tmp_path / "data"))
    assert run(["-c", str(config), "synth", "--num-spoof", "2"]) == 0
    assert len(list((tmp_path / "data").glob("*.eaif"))) == 4


def test_config_paths_resolve_against_config_dir(tmp_path, small_dataset,
                                                 monkeypatch, capsys):
    conf_dir = tmp_path / "conf"
    conf_dir.mkdir()
    config = conf_dir / "config.yaml"
    config.write_text(
        "synth:\n"
        "  out_dir: data\n"
        "train:\n"
        "  manifest: %s\n"
        "  out: model.eaim\n"
        "  history: history.json\n" % small_dataset)
    monkeypatch.chdir(tmp_path)
    assert run(["-c", str(config), "synth", "--num-bonafide", "1",
                "--num-spoof", "1"] + TINY) == 0
    assert len(list((conf_dir / "data").glob("*.eaif"))) == 2
    assert run(["-c", str(config), "train"] + QUICK) == 0
    assert (conf_dir / "model.eaim").exists()
    assert len(json.loads((conf_dir / "history.json").read_text())) == 2
    assert not (tmp_path / "model.eaim").exists()


def test_config_file_errors(tmp_path, capsys):
    config = tmp_path / "config.yaml"
    config.write_text("train:\n  epochs: many\n  colour: blue\n")
    assert run(["-c", str(config), "gradcheck"]) == 1
    err = capsys.readouterr().err
    assert "'config.yaml.train.epochs'" in err
    assert "unknown key: 'colour'" in err


def test_example_files_load():
    with open(os.path.join(EXAMPLES, "desk_config.yaml")) as f:
        config = load_config(f)
    assert set(config) == {"synth", "train", "eval", "analyze", "gradcheck"}
    assert config["train"]["epochs"] == 20
    assert config["train"]["learning_rate"] == 0.001
    assert config["eval"]["tdcf_params"] == TDCF_PARAMS
    params = load_tdcf_params(config["eval"]["tdcf_params"])
    c1, c2 = params.constants()
    assert c1 > 0 and c2 > 0


def test_version(capsys):
    assert run(["--version"]) == 0
    assert eaiadd.__version__ in capsys.readouterr().out


def test_gradcheck_progress_goes_to_stderr(capsys):
    assert run(["gradcheck", "--seed", "1", "--frames", "4",
                "--d-model", "2"]) == 0
    captured = capsys.readouterr()
    assert "Checking gradients" in captured.err
    assert "Gradient check (seed 1)" in captured.out
