"""Deterministic differentiable feature pyramid and Gram statistics.

Each layer applies a fixed bank of small kernels (oriented derivative-of-
Gaussian filters plus seeded random ones) to the channel mean of its
input, follows with a ReLU, and feeds a 2x average-pooled copy to the
next layer. The bank is a pure function of its arguments, so feature
extraction is bit-reproducible, and `backward` implements the exact
adjoint so image-space gradients can be checked against finite
differences. Externally computed feature maps can be imported through a
small binary container format (see `export_features`).
"""

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

__all__ = [
    "FilterBank",
    "FeatureMap",
    "build_bank",
    "extract",
    "backward",
    "gram",
    "export_features",
    "import_features",
    "FeatureFormatError",
]

MAGIC = b"LAFM"


class FeatureFormatError(Exception):
    """Feature container file does not parse."""


@dataclass(frozen=True)
class FeatureMap:
    layer: int
    data: np.ndarray  # (channels, height, width), float64

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def height(self):
        return self.data.shape[1]

    @property
    def width(self):
        return self.data.shape[2]


@dataclass(frozen=True)
class FilterBank:
    seed: int
    n_orient: int
    kernels: tuple = field(repr=False)  # per layer: (channels, k, k) array

    @property
    def n_layers(self):
        return len(self.kernels)


def _dog_kernel(size, angle, sigma):
    c = (size - 1) / 2.0
    yy, xx = np.mgrid[0:size, 0:size] - c
    u = xx * np.cos(angle) + yy * np.sin(angle)
    g = np.exp(-(xx * xx + yy * yy) / (2.0 * sigma * sigma))
    return -u * g


def _normalize(k):
    k = k - k.mean()
    return k / np.linalg.norm(k)


def build_bank(seed=0, n_orient=8, layers=3, channels_per_layer=16, kernel_size=3):
    """Deterministic filter bank; random kernels come from a seeded PCG64."""
    if layers < 1:
        raise ValueError("layers must be >= 1")
    if channels_per_layer < n_orient:
        raise ValueError("channels_per_layer must be >= n_orient")
    if kernel_size % 2 != 1 or kernel_size < 3:
        raise ValueError("kernel_size must be odd and >= 3")
    rng = np.random.default_rng(seed)
    sigma = kernel_size / 3.0
    all_layers = []
    for _ in range(layers):
        ks = [
            _normalize(_dog_kernel(kernel_size, np.pi * j / n_orient, sigma))
            for j in range(n_orient)
        ]
        for _ in range(channels_per_layer - n_orient):
            ks.append(_normalize(rng.standard_normal((kernel_size, kernel_size))))
        all_layers.append(np.stack(ks, axis=0))
    return FilterBank(seed=seed, n_orient=n_orient, kernels=tuple(all_layers))


def _conv_same(x, k):
    """Replicate-padded stride-1 correlation."""
    p = k.shape[0] // 2
    xp = np.pad(x, p, mode="edge")
    return signal.correlate2d(xp, k, mode="valid")


def _conv_same_adjoint(dy, k):
    """Adjoint of `_conv_same`: full convolution, then fold the edge pad."""
    p = k.shape[0] // 2
    dxp = signal.convolve2d(dy, k, mode="full")
    h = dxp.shape[0] - 2 * p
    w = dxp.shape[1] - 2 * p
    dx = dxp[p : p + h, p : p + w].copy()
    dx[0, :] += dxp[:p, p : p + w].sum(axis=0)
    dx[-1, :] += dxp[p + h :, p : p + w].sum(axis=0)
    dx[:, 0] += dxp[p : p + h, :p].sum(axis=1)
    dx[:, -1] += dxp[p : p + h, p + w :].sum(axis=1)
    dx[0, 0] += dxp[:p, :p].sum()
    dx[0, -1] += dxp[:p, p + w :].sum()
    dx[-1, 0] += dxp[p + h :, :p].sum()
    dx[-1, -1] += dxp[p + h :, p + w :].sum()
    return dx


def _avgpool2(x):
    h2, w2 = x.shape[0] // 2, x.shape[1] // 2
    return x[: 2 * h2, : 2 * w2].reshape(h2, 2, w2, 2).mean(axis=(1, 3))


def _avgpool2_adjoint(dy, shape):
    dx = np.zeros(shape)
    h2, w2 = dy.shape
    dx[: 2 * h2, : 2 * w2] = np.repeat(np.repeat(dy, 2, axis=0), 2, axis=1) / 4.0
    return dx


def _channel_mean(img):
    a = np.asarray(img, dtype=np.float64)
    return a if a.ndim == 2 else a.mean(axis=2)


def _forward(img, bank):
    """Run the pyramid; keep intermediates needed for the adjoint pass."""
    base = _channel_mean(img)
    bases, acts = [], []
    x = base
    for l, kernels in enumerate(bank.kernels):
        if l > 0:
            pooled = np.stack([_avgpool2(ch) for ch in acts[-1]], axis=0)
            if pooled.shape[1] < 1 or pooled.shape[2] < 1:
                raise ValueError("image too small for the requested layer count")
            x = pooled.mean(axis=0)
        bases.append(x)
        pre = np.stack([_conv_same(x, k) for k in kernels], axis=0)
        acts.append(np.maximum(pre, 0.0))
    return bases, acts


def extract(img, bank):
    """Feature maps of all layers for an image in [0, 1]."""
    _, acts = _forward(img, bank)
    return [FeatureMap(layer=l, data=a) for l, a in enumerate(acts)]


def backward(img, bank, upstream):
    """Exact reverse-mode gradient of `extract` w.r.t. the image.

    `upstream` is one dL/dF array of shape (channels, h, w) per layer.
    """
    bases, acts = _forward(img, bank)
    if len(upstream) != len(acts):
        raise ValueError("upstream layer count mismatch")
    n_layers = len(acts)
    dbase_next = None  # gradient w.r.t. bases[l] flowing from deeper layers
    for l in range(n_layers - 1, -1, -1):
        up = np.asarray(upstream[l], dtype=np.float64)
        if up.shape != acts[l].shape:
            raise ValueError(f"upstream shape mismatch at layer {l}")
        dact = up.copy()
        if dbase_next is not None:
            # dbase_next is dL/d(bases[l+1]); bases[l+1] = mean_c avgpool2(acts[l])
            c = acts[l].shape[0]
            per_ch = dbase_next / c
            pool_grad = _avgpool2_adjoint(per_ch, acts[l].shape[1:])
            dact += pool_grad[None, :, :]
        dpre = dact * (acts[l] > 0.0)
        dbase = np.zeros_like(bases[l])
        for ch, k in enumerate(bank.kernels[l]):
            dbase += _conv_same_adjoint(dpre[ch], k)
        dbase_next = dbase
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 2:
        return dbase_next
    return np.repeat(dbase_next[:, :, None], a.shape[2], axis=2) / a.shape[2]


def gram(fmap):
    """Channel Gram matrix F F^T over the flattened spatial axis."""
    f = fmap.data.reshape(fmap.channels, -1)
    g = f @ f.T
    # Mirror one triangle so symmetry is exact.
    return np.triu(g) + np.triu(g, 1).T


def export_features(maps, path):
    """Write feature maps to the binary container (f32 little-endian)."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(maps)))
        for m in maps:
            c, h, w = m.data.shape
            fh.write(struct.pack("<4I", m.layer, c, h, w))
            fh.write(m.data.astype("<f4").tobytes())


def import_features(path):
    """Read feature maps written by `export_features`; values widen to f64."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != MAGIC:
        raise FeatureFormatError("magic mismatch")
    if len(buf) < 8:
        raise FeatureFormatError("truncated header")
    (count,) = struct.unpack_from("<I", buf, 4)
    off = 8
    maps = []
    for _ in range(count):
        if off + 16 > len(buf):
            raise FeatureFormatError("truncated map header")
        layer, c, h, w = struct.unpack_from("<4I", buf, off)
        off += 16
        nbytes = c * h * w * 4
        if off + nbytes > len(buf):
            raise FeatureFormatError("truncated payload")
        data = np.frombuffer(buf, dtype="<f4", count=c * h * w, offset=off)
        off += nbytes
        data = data.astype(np.float64).reshape(c, h, w)
        if not np.all(np.isfinite(data)):
            raise FeatureFormatError("non-finite values in payload")
        maps.append(FeatureMap(layer=int(layer), data=data))
    return maps
