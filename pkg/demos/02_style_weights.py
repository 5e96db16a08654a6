"""Show how the adaptive style weights react to an outlier style.

Five correlated textures plus one all-black image are pushed through the
feature pyramid; the pairwise Gram-free feature differences define a
similarity graph whose PageRank scores become per-layer style weights.
The black outlier should land at the bottom of every layer.

Run with:  python3 demos/02_style_weights.py
"""

import numpy as np
from scipy import ndimage

from lineartist import asw, feature

rng = np.random.default_rng(11)
size = 64

# Correlated styles: one shared base texture plus small perturbations,
# then one all-black outlier.
base = ndimage.gaussian_filter(rng.uniform(size=(size, size)), 2.0)
base = (base - base.min()) / (base.max() - base.min())
styles = [
    np.clip(base + 0.12 * ndimage.gaussian_filter(rng.standard_normal((size, size)), 1.0), 0, 1)
    for _ in range(5)
]
styles.append(np.zeros((size, size)))

bank = feature.build_bank(seed=0)
feats = [feature.extract(s, bank) for s in styles]
table = asw.compute_asw(feats, theta=0.85, tol=1e-4)

names = [f"style{i}" for i in range(5)] + ["black"]
print("normalized weights (rows = layers):")
header = "layer  " + "  ".join(f"{n:>7s}" for n in names)
print(header)
for l in range(table.n_layers):
    row = "  ".join(f"{table.omega_bar[l, a]:7.4f}" for a in range(len(names)))
    print(f"{l:5d}  {row}")

for l in range(table.n_layers):
    assert table.omega_bar[l, -1] == table.omega_bar[l].min()
print("\nthe all-black outlier receives the smallest weight in every layer")
