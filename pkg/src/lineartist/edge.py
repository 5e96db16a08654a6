"""Canny edge extraction: blur, Sobel, non-maximum suppression, hysteresis."""

import numpy as np
from scipy import ndimage

__all__ = ["sobel", "canny"]

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T

# Neighbor offsets (row, col) along the +gradient direction, by angle bin:
# 0 = horizontal gradient, 1 = 45 degrees, 2 = vertical, 3 = 135 degrees.
_BIN_OFFSETS = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}


def sobel(img):
    """3x3 Sobel gradients with edge-clamped borders; returns (gx, gy)."""
    a = np.asarray(img, dtype=np.float64)
    if a.shape[0] < 3 or a.shape[1] < 3:
        raise ValueError("image smaller than the 3x3 Sobel kernel")
    gx = ndimage.correlate(a, SOBEL_X, mode="nearest")
    gy = ndimage.correlate(a, SOBEL_Y, mode="nearest")
    return gx, gy


def _angle_bins(gx, gy):
    """Quantize gradient direction (mod 180 deg) to 4 bins of 45 deg.

    Ties at bin boundaries go to whichever neighboring bin is closer to
    horizontal.
    """
    ang = np.degrees(np.arctan2(gy, gx)) % 180.0
    bins = np.floor((ang + 22.5) / 45.0).astype(np.intp) % 4
    # Exact boundary angles: 22.5 -> 0 deg, 67.5 -> 45, 112.5 -> 135, 157.5 -> 0.
    rem = np.mod(ang, 45.0)
    on_edge = rem == 22.5
    for boundary, target in ((22.5, 0), (67.5, 1), (112.5, 3), (157.5, 0)):
        bins[on_edge & (ang == boundary)] = target
    return bins


def _nms(mag, bins):
    h, w = mag.shape
    padded = np.zeros((h + 2, w + 2))
    padded[1:-1, 1:-1] = mag
    out = np.zeros_like(mag)
    for b, (dr, dc) in _BIN_OFFSETS.items():
        sel = bins == b
        plus = padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
        minus = padded[1 - dr : 1 - dr + h, 1 - dc : 1 - dc + w]
        keep = sel & (mag > plus) & (mag >= minus)
        out[keep] = mag[keep]
    return out


def canny(img, sigma=1.4, t_low=0.1, t_high=0.2):
    """Binary edge map from blur, Sobel, 4-direction NMS and hysteresis.

    Thresholds are fractions of the maximum suppressed magnitude; strong
    pixels seed 8-connected regions of weak pixels.
    """
    if not (0.0 < t_low < t_high <= 1.0):
        raise ValueError("need 0 < t_low < t_high <= 1")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    a = np.asarray(img, dtype=np.float64)
    if sigma > 0:
        a = ndimage.gaussian_filter(a, sigma, mode="nearest")
    gx, gy = sobel(a)
    mag = np.hypot(gx, gy)
    if mag.max() == 0.0:
        return np.zeros(a.shape, dtype=bool)
    thin = _nms(mag, _angle_bins(gx, gy))
    peak = mag.max()
    strong = thin >= t_high * peak
    weak = (thin >= t_low * peak) & (thin > 0)
    labels, _ = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    seeds = np.unique(labels[strong])
    seeds = seeds[seeds > 0]
    return np.isin(labels, seeds)
