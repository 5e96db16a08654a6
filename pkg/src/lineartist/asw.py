"""Adaptive per-style per-layer weights from a similarity graph.

For each layer, pairwise squared-error distances between style feature
maps are inverted into similarities, row-normalized into edge weights of
a fully connected undirected graph, and scored with a damped PageRank
iteration. The scores are squashed through a sigmoid stretched over the
observed score range and normalized by the layer/style count. Styles far
from the consensus (outliers) receive the smallest weights.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "PageRankResult",
    "ASWTable",
    "difference_matrix",
    "similarity_matrix",
    "edge_weights",
    "pagerank",
    "asw_map",
    "normalize_asw",
    "compute_asw",
]


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before reaching tolerance."""


@dataclass(frozen=True)
class PageRankResult:
    pr: np.ndarray
    theta: float
    iterations_used: int


@dataclass(frozen=True)
class ASWTable:
    omega: np.ndarray  # (n_layers, n_styles), raw weights in (0, 1)
    omega_bar: np.ndarray  # omega / (n_layers * n_styles)
    pr: np.ndarray  # (n_layers, n_styles), converged PageRank scores

    @property
    def n_layers(self):
        return self.omega.shape[0]

    @property
    def n_styles(self):
        return self.omega.shape[1]


def difference_matrix(style_maps):
    """Pairwise half squared error between same-layer style feature maps."""
    if len(style_maps) < 2:
        raise ValueError("need at least 2 styles")
    shapes = {m.data.shape for m in style_maps}
    if len(shapes) != 1:
        raise ValueError("style feature maps must share a shape")
    flat = np.stack([m.data.ravel() for m in style_maps], axis=0)
    n = flat.shape[0]
    delta = np.zeros((n, n))
    for p in range(n):
        for q in range(p + 1, n):
            d = 0.5 * float(np.sum((flat[p] - flat[q]) ** 2))
            delta[p, q] = delta[q, p] = d
    return delta


def similarity_matrix(delta):
    """Invert distances: big difference, small similarity; zero diagonal.

    The division is regularized with eps = 1e-8 * max(delta); identical
    styles everywhere (all-zero delta) fall back to a uniform graph.
    """
    delta = np.asarray(delta, dtype=np.float64)
    n = delta.shape[0]
    top = delta.max()
    off = ~np.eye(n, dtype=bool)
    gamma = np.zeros_like(delta)
    if top == 0.0:
        gamma[off] = 1.0
        return gamma
    eps = 1e-8 * top
    gamma[off] = top / (delta[off] + eps)
    return gamma


def edge_weights(gamma):
    """Row-normalize the similarity matrix into edge weights."""
    gamma = np.asarray(gamma, dtype=np.float64)
    sums = gamma.sum(axis=1)
    if np.any(sums <= 0.0):
        raise ValueError("similarity matrix has an all-zero row")
    return gamma / sums[:, None]


def pagerank(mu, theta=0.85, tol=1e-4, max_iter=1000):
    """Damped PageRank over incoming edge weights.

    Each node's score is (1-theta)/N plus theta/N times the sum of its
    neighbors' scores weighted by the edges pointing at it, iterated from
    a uniform start until the relative L1 change drops to tol.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must be in (0, 1)")
    mu = np.asarray(mu, dtype=np.float64)
    n = mu.shape[0]
    incoming = mu.T
    pr = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        new = (1.0 - theta) / n + (theta / n) * (incoming @ pr)
        delta = np.abs(new - pr).sum()
        pr = new
        if delta <= tol * np.abs(pr).sum():
            return PageRankResult(pr=pr, theta=theta, iterations_used=it)
    raise ConvergenceError(f"PageRank did not converge in {max_iter} iterations")


def asw_map(pr):
    """Sigmoid of the score stretched over [min, max] -> weights in (0, 1)."""
    pr = np.asarray(pr, dtype=np.float64)
    lo, hi = pr.min(), pr.max()
    if hi == lo:
        return np.full(pr.shape, 0.5)
    return 1.0 / (1.0 + np.exp(2.0 - 4.0 * (pr - lo) / (hi - lo)))


def normalize_asw(omega, n_layers, n_styles, pr=None):
    """Divide raw weights by the layer/style count, keeping the raw table."""
    omega = np.asarray(omega, dtype=np.float64)
    if n_layers < 1 or n_styles < 1:
        raise ValueError("layer and style counts must be >= 1")
    if pr is None:
        pr = np.full_like(omega, np.nan)
    return ASWTable(
        omega=omega, omega_bar=omega / (n_layers * n_styles), pr=np.asarray(pr)
    )


def compute_asw(style_features, theta=0.85, tol=1e-4, max_iter=1000):
    """Full per-layer pipeline over `style_features[style][layer]` maps.

    A single style degenerates to the flat weight 0.5 (the sigmoid's
    midpoint), matching the uniform fallback for identical styles.
    """
    n_styles = len(style_features)
    if n_styles == 0:
        raise ValueError("need at least one style")
    n_layers = len(style_features[0])
    if any(len(f) != n_layers for f in style_features):
        raise ValueError("every style needs features at every layer")
    omega = np.zeros((n_layers, n_styles))
    prs = np.zeros((n_layers, n_styles))
    for l in range(n_layers):
        if n_styles == 1:
            omega[l] = 0.5
            prs[l] = 1.0
            continue
        maps = [style_features[s][l] for s in range(n_styles)]
        mu = edge_weights(similarity_matrix(difference_matrix(maps)))
        result = pagerank(mu, theta=theta, tol=tol, max_iter=max_iter)
        omega[l] = asw_map(result.pr)
        prs[l] = result.pr
    return normalize_asw(omega, n_layers, n_styles, pr=prs)
