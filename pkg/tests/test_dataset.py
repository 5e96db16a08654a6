import os

import numpy as np
import pytest

from lineartist import dataset, imgio
from lineartist.pencil import SketchParams
from lineartist.smooth import L0Params

from conftest import synth_natural


@pytest.fixture
def input_dir(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    for i in range(3):
        imgio.save_image(synth_natural(size=48, seed=i), str(d / f"img{i}.png"))
    return str(d)


def test_params_digest_stable_and_sensitive():
    a = dataset.params_digest(L0Params(), SketchParams())
    b = dataset.params_digest(L0Params(), SketchParams())
    c = dataset.params_digest(L0Params(lam=0.05), SketchParams())
    assert a == b and a != c
    assert len(a) == 16 and all(ch in "0123456789abcdef" for ch in a)


def test_extract_pair_shapes():
    img = synth_natural(size=40)
    sketch, reality = dataset.extract_pair(img, L0Params(), SketchParams(), target=32)
    assert sketch.shape == (32, 32)
    assert reality.shape == (32, 32)
    assert sketch.min() >= 0.0 and sketch.max() <= 1.0


def test_manifest_roundtrip(tmp_path):
    records = [
        dataset.PairRecord(
            id=f"r{i}",
            reality_path=f"reality/r{i}.png",
            sketch_path=f"sketches/r{i}.png",
            width=32,
            height=32,
            params_digest="ab" * 8,
        )
        for i in range(4)
    ]
    path = str(tmp_path / "pairs.jsonl")
    dataset.write_manifest(records, path)
    assert dataset.read_manifest(path) == records


def test_build_dataset_basic(input_dir, tmp_path):
    out = str(tmp_path / "out")
    records = dataset.build_dataset(input_dir, out, target=32)
    assert len(records) == 3
    assert [r.id for r in records] == ["img0", "img1", "img2"]
    manifest = dataset.read_manifest(os.path.join(out, dataset.MANIFEST_NAME))
    assert manifest == records
    for rec in records:
        assert rec.width == rec.height == 32
        sketch = imgio.load_image(os.path.join(out, rec.sketch_path))
        reality = imgio.load_image(os.path.join(out, rec.reality_path))
        assert sketch.shape[:2] == (32, 32)
        assert reality.shape[:2] == (32, 32)


def test_build_dataset_complexity_filter(input_dir, tmp_path):
    # a flat image survives a zero-density threshold; textured ones do not
    imgio.save_image(np.full((48, 48), 0.5), os.path.join(input_dir, "flat.png"))
    out = str(tmp_path / "out")
    records = dataset.build_dataset(input_dir, out, target=32, max_gradcount=0.0)
    assert [r.id for r in records] == ["flat"]


def test_build_dataset_deterministic(input_dir, tmp_path):
    out1 = str(tmp_path / "a")
    out2 = str(tmp_path / "b")
    r1 = dataset.build_dataset(input_dir, out1, target=32, workers=1)
    r2 = dataset.build_dataset(input_dir, out2, target=32, workers=3)
    assert r1 == r2
    with open(os.path.join(out1, dataset.MANIFEST_NAME), "rb") as fh:
        m1 = fh.read()
    with open(os.path.join(out2, dataset.MANIFEST_NAME), "rb") as fh:
        m2 = fh.read()
    assert m1 == m2
    for rec in r1:
        with open(os.path.join(out1, rec.sketch_path), "rb") as fh:
            s1 = fh.read()
        with open(os.path.join(out2, rec.sketch_path), "rb") as fh:
            s2 = fh.read()
        assert s1 == s2


def test_build_dataset_ignores_unsupported(input_dir, tmp_path):
    with open(os.path.join(input_dir, "notes.txt"), "w") as fh:
        fh.write("not an image\n")
    records = dataset.build_dataset(input_dir, str(tmp_path / "out"), target=32)
    assert len(records) == 3


def test_build_dataset_empty_dir(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(ValueError):
        dataset.build_dataset(str(empty), str(tmp_path / "out"))


def test_build_dataset_thread_env(input_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("LINEARTIST_THREADS", "2")
    records = dataset.build_dataset(input_dir, str(tmp_path / "out"), target=32)
    assert len(records) == 3
