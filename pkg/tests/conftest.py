import numpy as np
import pytest
from scipy import ndimage


def synth_natural(size=64, seed=7):
    """Deterministic natural-looking test image: smooth blobs plus shapes."""
    rng = np.random.default_rng(seed)
    img = ndimage.gaussian_filter(rng.uniform(size=(size, size)), 3.0)
    yy, xx = np.mgrid[0:size, 0:size]
    disk = (yy - size * 0.4) ** 2 + (xx - size * 0.55) ** 2 <= (size * 0.2) ** 2
    img = img + 0.35 * disk + 0.2 * (xx / size)
    img -= img.min()
    return img / img.max()


def synth_styles(n=5, size=64, seed=11, outlier_black=False):
    """Correlated style images (shared base texture plus perturbations)."""
    rng = np.random.default_rng(seed)
    base = ndimage.gaussian_filter(rng.uniform(size=(size, size)), 2.0)
    base = (base - base.min()) / (base.max() - base.min())
    styles = []
    for _ in range(n):
        bump = 0.12 * ndimage.gaussian_filter(rng.standard_normal((size, size)), 2.0)
        styles.append(np.clip(base + bump, 0.0, 1.0))
    if outlier_black:
        styles.append(np.zeros((size, size)))
    return styles


@pytest.fixture
def natural_image():
    return synth_natural()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
