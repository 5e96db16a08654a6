"""Image containers, color conversion, resampling, and file I/O.

Images are plain numpy float64 arrays with samples in [0, 1]: gray images
are (H, W), color images are (H, W, 3), row-major and channel-interleaved.
Quantization to 8 bits happens only at file boundaries; everything in
between stays in double precision.

Supported formats: PNG (8-bit gray/RGB via Pillow), binary PGM (P5) and
binary PPM (P6) with a hand-rolled parser that tolerates header comments.
"""

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "ImageIOError",
    "UnsupportedFormatError",
    "CorruptImageError",
    "load_image",
    "save_image",
    "to_grayscale",
    "resize",
    "validate_image",
]

# ITU-R BT.601 luma weights.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

_EXTENSIONS = {".png": "png", ".pgm": "pgm", ".ppm": "ppm"}


class ImageIOError(Exception):
    """Base class for image decode/encode failures."""


class UnsupportedFormatError(ImageIOError):
    """File extension or pixel layout outside the supported set."""


class CorruptImageError(ImageIOError):
    """File claims a supported format but its contents do not parse."""


def validate_image(img):
    """Check the image array contract; raise ValueError on violation."""
    a = np.asarray(img)
    if a.ndim not in (2, 3) or (a.ndim == 3 and a.shape[2] != 3):
        raise ValueError("image must be (H, W) gray or (H, W, 3) color")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    if not np.all(np.isfinite(a)) or a.min() < 0.0 or a.max() > 1.0:
        raise ValueError("samples must be finite and in [0, 1]")
    return a


def _format_for(path, fmt=None):
    if fmt is not None:
        fmt = fmt.lower()
        if fmt not in ("png", "pgm", "ppm"):
            raise UnsupportedFormatError(f"unsupported format {fmt!r}")
        return fmt
    ext = os.path.splitext(str(path))[1].lower()
    if ext not in _EXTENSIONS:
        raise UnsupportedFormatError(f"unsupported file extension {ext!r}")
    return _EXTENSIONS[ext]


def _pnm_header(buf, path):
    """Parse magic, width, height, maxval; return tokens and raster offset.

    Comment lines starting with '#' may appear between header tokens.
    """
    tokens = []
    i = 0
    n = len(buf)
    while len(tokens) < 4:
        if i >= n:
            raise CorruptImageError(f"{path}: truncated header")
        c = buf[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            j = buf.find(b"\n", i)
            if j < 0:
                raise CorruptImageError(f"{path}: unterminated header comment")
            i = j + 1
        else:
            j = i
            while j < n and not buf[j : j + 1].isspace() and buf[j : j + 1] != b"#":
                j += 1
            tokens.append(buf[i:j])
            i = j
    # Exactly one whitespace byte separates maxval from the raster.
    if i >= n or not buf[i : i + 1].isspace():
        raise CorruptImageError(f"{path}: missing raster separator")
    return tokens, i + 1


def _load_pnm(path, channels):
    with open(path, "rb") as fh:
        buf = fh.read()
    tokens, off = _pnm_header(buf, path)
    magic = tokens[0]
    expect = b"P5" if channels == 1 else b"P6"
    if magic != expect:
        raise CorruptImageError(f"{path}: bad magic {magic!r}, expected {expect!r}")
    try:
        w, h, maxval = (int(t) for t in tokens[1:4])
    except ValueError as exc:
        raise CorruptImageError(f"{path}: non-numeric header field") from exc
    if w < 1 or h < 1:
        raise CorruptImageError(f"{path}: bad dimensions {w}x{h}")
    if maxval != 255:
        raise UnsupportedFormatError(f"{path}: only 8-bit maxval 255 supported")
    need = w * h * channels
    raster = buf[off : off + need]
    if len(raster) < need:
        raise CorruptImageError(f"{path}: raster truncated")
    arr = np.frombuffer(raster, dtype=np.uint8).astype(np.float64) / 255.0
    if channels == 1:
        return arr.reshape(h, w)
    return arr.reshape(h, w, 3)


def _load_png(path):
    try:
        with Image.open(path) as im:
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.uint8)
            elif im.mode in ("RGB", "RGBA", "P", "LA", "1"):
                arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
            else:
                raise UnsupportedFormatError(f"{path}: unsupported PNG mode {im.mode}")
    except UnidentifiedImageError as exc:
        raise CorruptImageError(f"{path}: not a decodable PNG") from exc
    except OSError as exc:
        raise CorruptImageError(f"{path}: PNG stream corrupt ({exc})") from exc
    return arr.astype(np.float64) / 255.0


def load_image(path):
    """Load a PNG/PGM/PPM file as a float64 array in [0, 1]."""
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    fmt = _format_for(path)
    if fmt == "png":
        return _load_png(path)
    if fmt == "pgm":
        return _load_pnm(path, channels=1)
    return _load_pnm(path, channels=3)


def quantize(img):
    """Map samples to bytes: clamp to [0, 1], then round half up on s*255."""
    a = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    return np.floor(a * 255.0 + 0.5).astype(np.uint8)


def save_image(img, path, fmt=None):
    """Write an image; format from `fmt` or the file extension."""
    fmt = _format_for(path, fmt)
    a = np.asarray(img, dtype=np.float64)
    if a.ndim not in (2, 3) or (a.ndim == 3 and a.shape[2] != 3):
        raise ValueError("image must be (H, W) or (H, W, 3)")
    q = quantize(a)
    if fmt == "png":
        Image.fromarray(q, mode="L" if q.ndim == 2 else "RGB").save(path, format="PNG")
        return
    if fmt == "pgm":
        if q.ndim != 2:
            raise UnsupportedFormatError("PGM requires a single-channel image")
        header = f"P5\n{q.shape[1]} {q.shape[0]}\n255\n".encode("ascii")
    else:
        if q.ndim != 3:
            raise UnsupportedFormatError("PPM requires a 3-channel image")
        header = f"P6\n{q.shape[1]} {q.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(q.tobytes())


def to_grayscale(img):
    """BT.601 luma; single-channel input is returned unchanged."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 2:
        return a
    if a.ndim != 3 or a.shape[2] != 3:
        raise ValueError("expected (H, W) or (H, W, 3) image")
    return a @ LUMA_WEIGHTS


def _axis_coords(n_in, n_out):
    # Pixel-center mapping with edge clamp.
    s = np.clip((np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5, 0.0, n_in - 1.0)
    lo = np.floor(s).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, s - lo


def resize(img, w, h):
    """Bilinear resize with edge-clamped sampling."""
    a = np.asarray(img, dtype=np.float64)
    if w < 1 or h < 1:
        raise ValueError("target dimensions must be >= 1")
    H, W = a.shape[:2]
    if (w, h) == (W, H):
        return a.copy()
    x0, x1, fx = _axis_coords(W, w)
    y0, y1, fy = _axis_coords(H, h)
    if a.ndim == 3:
        fx = fx[:, None]
    top = a[y0][:, x0] * (1.0 - fx) + a[y0][:, x1] * fx
    bot = a[y1][:, x0] * (1.0 - fx) + a[y1][:, x1] * fx
    fy = fy[:, None] if a.ndim == 2 else fy[:, None, None]
    return top * (1.0 - fy) + bot * fy
