import numpy as np
import pytest

from lineartist import feature
from lineartist.feature import FeatureMap, FilterBank


def test_bank_deterministic():
    a = feature.build_bank(seed=5)
    b = feature.build_bank(seed=5)
    for ka, kb in zip(a.kernels, b.kernels):
        np.testing.assert_array_equal(ka, kb)


def test_bank_kernel_normalization():
    bank = feature.build_bank(seed=2, n_orient=4, layers=2, channels_per_layer=10)
    for layer in bank.kernels:
        for k in layer:
            assert abs(k.mean()) <= 1e-12
            assert abs(np.linalg.norm(k) - 1.0) <= 1e-12


def test_bank_seed_changes_kernels():
    a = feature.build_bank(seed=1)
    b = feature.build_bank(seed=2)
    assert any(
        not np.array_equal(ka, kb) for ka, kb in zip(a.kernels, b.kernels)
    )


def test_bank_validation():
    with pytest.raises(ValueError):
        feature.build_bank(layers=0)
    with pytest.raises(ValueError):
        feature.build_bank(n_orient=8, channels_per_layer=4)
    with pytest.raises(ValueError):
        feature.build_bank(kernel_size=4)


def test_extract_zero_image():
    bank = feature.build_bank(seed=0, layers=3)
    for m in feature.extract(np.zeros((16, 16)), bank):
        assert not m.data.any()


def test_extract_spatial_dims():
    bank = feature.build_bank(seed=0, layers=3, channels_per_layer=8)
    maps = feature.extract(np.zeros((16, 16)), bank)
    assert [(m.height, m.width) for m in maps] == [(16, 16), (8, 8), (4, 4)]
    assert all(m.channels == 8 for m in maps)


def test_brightness_scaling_layer1(rng):
    bank = feature.build_bank(seed=0, layers=1, channels_per_layer=8)
    img = rng.uniform(0.1, 0.5, size=(12, 12))
    a = feature.extract(img, bank)[0].data
    b = feature.extract(2.0 * img, bank)[0].data
    pos = a > 0
    np.testing.assert_allclose(b[pos], 2.0 * a[pos], rtol=1e-12)


def test_extract_deterministic(rng):
    bank = feature.build_bank(seed=0)
    img = rng.uniform(size=(16, 16))
    a = feature.extract(img, bank)
    b = feature.extract(img, bank)
    for ma, mb in zip(a, b):
        np.testing.assert_array_equal(ma.data, mb.data)


def test_backward_zero_upstream(rng):
    bank = feature.build_bank(seed=0, layers=2, channels_per_layer=8)
    img = rng.uniform(size=(12, 12))
    ups = [np.zeros_like(m.data) for m in feature.extract(img, bank)]
    assert not feature.backward(img, bank, ups).any()


def test_backward_identity_kernel():
    # single layer, single 1x1 identity kernel: gradient equals upstream
    bank = FilterBank(seed=0, n_orient=0, kernels=(np.ones((1, 1, 1)),))
    img = np.full((6, 6), 0.4)
    maps = feature.extract(img, bank)
    np.testing.assert_array_equal(maps[0].data[0], img)
    up = np.arange(36.0).reshape(1, 6, 6)
    np.testing.assert_array_equal(feature.backward(img, bank, [up]), up[0])


@pytest.mark.parametrize("layers", [1, 2, 3])
def test_backward_finite_difference(layers):
    rng = np.random.default_rng(3)
    bank = feature.build_bank(seed=1, n_orient=4, layers=layers, channels_per_layer=6)
    img = rng.uniform(0.1, 1.0, size=(12, 12))
    weights = [rng.standard_normal(m.data.shape) for m in feature.extract(img, bank)]

    def probe(x):
        return sum(
            float(np.sum(w * m.data))
            for w, m in zip(weights, feature.extract(x, bank))
        )

    grad = feature.backward(img, bank, weights)
    eps = 1e-5
    for i, j in [(0, 0), (2, 3), (5, 7), (7, 2), (11, 11), (6, 6)]:
        xp = img.copy()
        xp[i, j] += eps
        xm = img.copy()
        xm[i, j] -= eps
        fd = (probe(xp) - probe(xm)) / (2 * eps)
        assert abs(fd - grad[i, j]) <= 1e-6 * max(1.0, abs(fd))


def test_backward_shape_mismatch(rng):
    bank = feature.build_bank(seed=0, layers=2, channels_per_layer=8)
    img = rng.uniform(size=(12, 12))
    ups = [np.zeros((8, 12, 12)), np.zeros((8, 7, 7))]
    with pytest.raises(ValueError):
        feature.backward(img, bank, ups)


def test_color_image_gradient_split(rng):
    bank = feature.build_bank(seed=0, layers=1, channels_per_layer=8)
    img = rng.uniform(size=(8, 8, 3))
    ups = [rng.standard_normal(m.data.shape) for m in feature.extract(img, bank)]
    g = feature.backward(img, bank, ups)
    assert g.shape == img.shape
    np.testing.assert_allclose(g[:, :, 0], g[:, :, 1])


def test_gram_identity():
    f = FeatureMap(layer=0, data=np.eye(2).reshape(2, 1, 2))
    np.testing.assert_array_equal(feature.gram(f), np.eye(2))


def test_gram_ones():
    f = FeatureMap(layer=0, data=np.ones((1, 2, 3)))
    np.testing.assert_array_equal(feature.gram(f), np.array([[6.0]]))


def test_gram_brute_force(rng):
    data = rng.standard_normal((3, 1, 5))
    f = FeatureMap(layer=0, data=data)
    g = feature.gram(f)
    flat = data.reshape(3, 5)
    for i in range(3):
        for j in range(3):
            want = sum(flat[i, k] * flat[j, k] for k in range(5))
            assert abs(g[i, j] - want) <= 1e-12
    np.testing.assert_array_equal(g, g.T)


def test_feature_file_roundtrip(tmp_path, rng):
    bank = feature.build_bank(seed=0, layers=2, channels_per_layer=8)
    maps = feature.extract(rng.uniform(size=(16, 16)), bank)
    path = str(tmp_path / "feats.lafm")
    feature.export_features(maps, path)
    back = feature.import_features(path)
    assert len(back) == len(maps)
    for a, b in zip(maps, back):
        assert a.layer == b.layer
        np.testing.assert_allclose(a.data, b.data, atol=1e-6)
        np.testing.assert_array_equal(b.data, a.data.astype("<f4").astype(np.float64))


def test_feature_file_bad_magic(tmp_path):
    p = tmp_path / "bad.lafm"
    p.write_bytes(b"NOPE" + bytes(16))
    with pytest.raises(feature.FeatureFormatError, match="magic"):
        feature.import_features(str(p))


def test_feature_file_truncated(tmp_path):
    bank = feature.build_bank(seed=0, n_orient=4, layers=1, channels_per_layer=4)
    maps = feature.extract(np.full((8, 8), 0.5), bank)
    path = tmp_path / "feats.lafm"
    feature.export_features(maps, str(path))
    data = path.read_bytes()
    # header claims 2 maps but only 1 payload follows
    bad = data[:4] + (2).to_bytes(4, "little") + data[8:]
    p2 = tmp_path / "trunc.lafm"
    p2.write_bytes(bad)
    with pytest.raises(feature.FeatureFormatError, match="truncated"):
        feature.import_features(str(p2))


def test_feature_file_nan(tmp_path):
    import struct

    p = tmp_path / "nan.lafm"
    payload = struct.pack("<f", float("nan"))
    p.write_bytes(b"LAFM" + struct.pack("<I", 1) + struct.pack("<4I", 0, 1, 1, 1) + payload)
    with pytest.raises(feature.FeatureFormatError, match="finite"):
        feature.import_features(str(p))
