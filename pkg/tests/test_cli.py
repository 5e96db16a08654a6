import json
import os

import numpy as np
import pytest

from lineartist import cli, feature, imgio

from conftest import synth_natural


@pytest.fixture
def content_png(tmp_path):
    path = str(tmp_path / "content.png")
    imgio.save_image(synth_natural(size=32), path)
    return path


@pytest.fixture
def styles_dir(tmp_path):
    d = tmp_path / "styles"
    d.mkdir()
    for i in range(2):
        imgio.save_image(synth_natural(size=32, seed=20 + i), str(d / f"s{i}.png"))
    return str(d)


def test_sketch_success(content_png, tmp_path):
    out = str(tmp_path / "sketch.png")
    assert cli.main(["sketch", content_png, out]) == 0
    img = imgio.load_image(out)
    assert img.shape[:2] == (32, 32)


def test_sketch_idempotent(content_png, tmp_path):
    out1 = str(tmp_path / "a.png")
    out2 = str(tmp_path / "b.png")
    assert cli.main(["sketch", content_png, out1]) == 0
    assert cli.main(["sketch", content_png, out2]) == 0
    with open(out1, "rb") as fh:
        b1 = fh.read()
    with open(out2, "rb") as fh:
        b2 = fh.read()
    assert b1 == b2


def test_smooth_and_canny(content_png, tmp_path):
    sm = str(tmp_path / "smooth.png")
    ed = str(tmp_path / "edges.png")
    assert cli.main(["smooth", "--lambda", "0.02", content_png, sm]) == 0
    assert cli.main(["canny", sm, ed]) == 0
    edges = imgio.load_image(ed)
    assert set(np.unique(edges)) <= {0.0, 1.0}


def test_unknown_flag_exit_1(content_png, tmp_path, capsys):
    code = cli.main(["sketch", "--bogus", content_png, str(tmp_path / "o.png")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_bad_param_exit_1(content_png, tmp_path):
    code = cli.main(
        ["sketch", "--directions", "3", content_png, str(tmp_path / "o.png")]
    )
    assert code == 1


def test_missing_input_exit_2(tmp_path):
    code = cli.main(["sketch", str(tmp_path / "missing.png"), str(tmp_path / "o.png")])
    assert code == 2


def test_stylize_missing_styles_dir_exit_1(content_png, tmp_path, capsys):
    code = cli.main(
        [
            "stylize",
            "--content", content_png,
            "--styles", str(tmp_path / "nosuch"),
            "--iters", "1",
            "--out", str(tmp_path / "o.png"),
        ]
    )
    assert code == 1
    assert "--styles" in capsys.readouterr().err


def test_help_exit_0_and_defaults(capsys):
    assert cli.main(["smooth", "--help"]) == 0
    out = capsys.readouterr().out
    assert "0.02" in out and "1.2" in out

    assert cli.main(["stylize", "--help"]) == 0
    out = capsys.readouterr().out
    for token in ("8.0", "500.0", "1.0", "2000", "0.85", "0.0001"):
        assert token in out


def test_weights_command(styles_dir, tmp_path):
    out = str(tmp_path / "weights.json")
    code = cli.main(
        ["weights", "--styles", styles_dir, "--out", out, "--layers", "2", "--channels", "8"]
    )
    assert code == 0
    with open(out) as fh:
        payload = json.load(fh)
    assert payload["layers"] == 2
    assert payload["styles"] == ["s0.png", "s1.png"]
    omega = np.asarray(payload["omega"])
    assert omega.shape == (2, 2)
    assert np.all((omega >= 0) & (omega <= 1))


def test_stylize_command(content_png, styles_dir, tmp_path):
    out = str(tmp_path / "styled.png")
    code = cli.main(
        [
            "stylize",
            "--content", content_png,
            "--styles", styles_dir,
            "--iters", "2",
            "--lr", "0.05",
            "--layers", "2",
            "--channels", "8",
            "--out", out,
            "--trace",
        ]
    )
    assert code == 0
    assert imgio.load_image(out).shape[:2] == (32, 32)
    with open(out + ".loss.csv") as fh:
        lines = fh.read().strip().splitlines()
    assert lines[0] == "iteration,loss"
    assert len(lines) == 3


def test_features_export_roundtrip(content_png, tmp_path):
    out = str(tmp_path / "feats.lafm")
    code = cli.main(
        ["features-export", "--layers", "2", "--channels", "8", content_png, out]
    )
    assert code == 0
    maps = feature.import_features(out)
    assert len(maps) == 2
    assert maps[0].channels == 8


def test_dataset_command(tmp_path):
    in_dir = tmp_path / "in"
    in_dir.mkdir()
    for i in range(2):
        imgio.save_image(synth_natural(size=40, seed=i), str(in_dir / f"i{i}.png"))
    out_dir = str(tmp_path / "out")
    code = cli.main(
        ["dataset", "--in", str(in_dir), "--out", out_dir, "--target", "32"]
    )
    assert code == 0
    assert os.path.exists(os.path.join(out_dir, "pairs.jsonl"))


def test_config_file_defaults_and_override(content_png, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"directions": 4, "width": 0.05}))
    out1 = str(tmp_path / "a.png")
    assert cli.main(["--config", str(cfg), "sketch", content_png, out1]) == 0
    ref = str(tmp_path / "ref.png")
    assert cli.main(["sketch", "--directions", "4", "--width", "0.05", content_png, ref]) == 0
    with open(out1, "rb") as fh:
        b1 = fh.read()
    with open(ref, "rb") as fh:
        br = fh.read()
    assert b1 == br
    # an explicit flag still wins over the config value
    out2 = str(tmp_path / "b.png")
    assert cli.main(["--config", str(cfg), "sketch", "--width", "0.2", content_png, out2]) == 0
    wide = str(tmp_path / "wide.png")
    assert cli.main(["sketch", "--directions", "4", "--width", "0.2", content_png, wide]) == 0
    with open(out2, "rb") as fh:
        b2 = fh.read()
    with open(wide, "rb") as fh:
        bw = fh.read()
    assert b2 == bw


def test_config_missing_file_exit_2(content_png, tmp_path):
    code = cli.main(
        ["--config", str(tmp_path / "nope.json"), "sketch", content_png, str(tmp_path / "o.png")]
    )
    assert code == 2
