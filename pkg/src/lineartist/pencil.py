"""Pencil-stroke sketch synthesis.

Gradient magnitude is classified into direction channels by convolving
with oriented line kernels and taking the per-pixel winner; re-convolving
the winning channels with the same kernels links nearby stroke pixels
along their direction, producing freehand-looking lines.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

__all__ = [
    "SketchParams",
    "resolve_kernel_len",
    "grad_magnitude",
    "make_line_kernels",
    "classify",
    "line_shape",
    "pencil_sketch",
]


@dataclass(frozen=True)
class SketchParams:
    n_directions: int = 8
    kernel_len: object = "auto"  # "auto" -> round(min(H, W) / 30), clamped >= 7
    stroke_width: float = 0.1
    invert_output: bool = True

    def __post_init__(self):
        if self.n_directions < 2 or self.n_directions % 2 != 0:
            raise ValueError("n_directions must be even and >= 2")
        if self.kernel_len != "auto" and int(self.kernel_len) < 3:
            raise ValueError("explicit kernel_len must be >= 3")
        if self.stroke_width < 0:
            raise ValueError("stroke_width must be >= 0")


def resolve_kernel_len(params, shape):
    if params.kernel_len == "auto":
        return max(7, int(round(min(shape[:2]) / 30.0)))
    return int(params.kernel_len)


def grad_magnitude(img):
    """Forward-difference gradient magnitude, replicate boundary."""
    a = np.asarray(img, dtype=np.float64)
    gx = np.zeros_like(a)
    gy = np.zeros_like(a)
    gx[:, :-1] = a[:, 1:] - a[:, :-1]
    gy[:-1, :] = a[1:, :] - a[:-1, :]
    return np.sqrt(gx * gx + gy * gy)


def _line_kernel(length, angle):
    """Unit-mass anti-aliased line segment through the kernel center.

    Rasterized by stepping the major axis one pixel at a time and
    splitting each unit of mass linearly between the two minor-axis
    cells it covers, so every direction deposits the same weight at the
    center cell.
    """
    k = np.zeros((length, length))
    c = (length - 1) / 2.0
    co, si = np.cos(angle), np.sin(angle)
    steep = abs(si) > abs(co)
    slope = (co / si) if steep else (si / co)
    for t in range(length):
        minor = c + (t - c) * slope
        if abs(minor - round(minor)) < 1e-9:
            minor = float(round(minor))
        m0 = int(np.floor(minor))
        f = minor - m0
        for mm, wgt in ((m0, 1.0 - f), (m0 + 1, f)):
            if wgt <= 0.0 or not 0 <= mm < length:
                continue
            if steep:
                k[t, mm] += wgt
            else:
                k[mm, t] += wgt
    return k / k.sum()


def make_line_kernels(params, shape):
    """One kernel per direction, angles i * 180 / n spaced, each summing to 1."""
    length = resolve_kernel_len(params, shape)
    return [
        _line_kernel(length, np.pi * i / params.n_directions)
        for i in range(params.n_directions)
    ]


def classify(g, kernels):
    """Winner-take-all split of G into per-direction magnitude maps.

    Channel i holds G(p) where kernel i's response is maximal at p (ties
    to the lowest index), zero elsewhere, so the channels partition G.
    """
    g = np.asarray(g, dtype=np.float64)
    responses = np.stack(
        [ndimage.correlate(g, k, mode="nearest") for k in kernels], axis=0
    )
    winner = np.argmax(responses, axis=0)
    return np.stack([np.where(winner == i, g, 0.0) for i in range(len(kernels))], axis=0)


def line_shape(stack, kernels):
    """Aggregate each direction channel along its kernel; min-max normalize."""
    if len(stack) != len(kernels):
        raise ValueError("stack and kernel counts differ")
    s = np.zeros_like(np.asarray(stack[0], dtype=np.float64))
    for c, k in zip(stack, kernels):
        s += ndimage.correlate(np.asarray(c, dtype=np.float64), k, mode="nearest")
    lo, hi = s.min(), s.max()
    if hi <= lo:
        return np.zeros_like(s)
    return (s - lo) / (hi - lo)


def _disk(radius):
    r = int(radius)
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    return yy * yy + xx * xx <= r * r


def pencil_sketch(img, params=SketchParams()):
    """Full stroke pipeline: magnitude, classify, shape, dilate, invert."""
    i = np.asarray(img, dtype=np.float64)
    kernels = make_line_kernels(params, i.shape)
    g = grad_magnitude(i)
    s = line_shape(classify(g, kernels), kernels)
    radius = int(round(params.stroke_width * resolve_kernel_len(params, i.shape)))
    if radius > 0:
        s = ndimage.grey_dilation(s, footprint=_disk(radius))
    if params.invert_output:
        s = 1.0 - s
    return np.clip(s, 0.0, 1.0)
