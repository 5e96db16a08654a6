"""Adaptively weighted multi-style optimization in pixel space.

The objective combines per-layer content losses against a target image
with Gram-matrix style losses against every style exemplar, each style
term scaled by its adaptive weight. Gradients are pushed through the
feature pyramid analytically and the image is updated with Adam, clamped
to [0, 1] after every step.
"""

from dataclasses import dataclass

import numpy as np

from .asw import compute_asw
from .feature import backward, extract, gram

__all__ = [
    "NumericalError",
    "TransferConfig",
    "AdamState",
    "content_loss_grad",
    "style_loss_grad",
    "total_loss",
    "adam_step",
    "stylize",
]


class NumericalError(RuntimeError):
    """Non-finite loss or gradient encountered during optimization."""


@dataclass(frozen=True)
class TransferConfig:
    alpha: float = 8.0
    beta: float = 500.0
    lr: float = 1.0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    iterations: int = 2000
    init: str = "noise"  # or "content"
    seed: int = 0
    content_layers: tuple = None  # None = all layers
    style_layers: tuple = None

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1 and beta2 must be in [0, 1)")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.init not in ("noise", "content"):
            raise ValueError("init must be 'noise' or 'content'")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def like(cls, x):
        return cls(m=np.zeros_like(x), v=np.zeros_like(x))


def content_loss_grad(f_target, f_x):
    """Half squared error between feature maps and its gradient in f_x."""
    if f_target.data.shape != f_x.data.shape:
        raise ValueError("feature map shapes disagree")
    diff = f_x.data - f_target.data
    return 0.5 * float(np.sum(diff * diff)), diff


def style_loss_grad(f_style, f_x):
    """Normalized squared Gram difference and its gradient in f_x."""
    if f_style.data.shape != f_x.data.shape:
        raise ValueError("feature map shapes disagree")
    c, h, w = f_x.data.shape
    norm = float(c * h * w)
    g_a = gram(f_style)
    g_x = gram(f_x)
    dg = g_x - g_a
    loss = float(np.sum(dg * dg)) / (4.0 * norm)
    fx = f_x.data.reshape(c, -1)
    grad = (dg @ fx).reshape(c, h, w) / norm
    return loss, grad


def _layer_active(mask, layer):
    return mask is None or layer in mask


def total_loss(d_features, style_features, x, bank, asw_table, cfg):
    """Weighted content+style objective at image x and its pixel gradient."""
    x_features = extract(x, bank)
    n_layers = len(x_features)
    if len(d_features) != n_layers:
        raise ValueError("content feature layer count mismatch")
    if asw_table.n_layers != n_layers or asw_table.n_styles != len(style_features):
        raise ValueError("ASW table dimensions do not match features")
    loss = 0.0
    upstream = [np.zeros_like(f.data) for f in x_features]
    for l in range(n_layers):
        if cfg.alpha > 0 and _layer_active(cfg.content_layers, l):
            c_loss, c_grad = content_loss_grad(d_features[l], x_features[l])
            loss += cfg.alpha * c_loss
            upstream[l] += cfg.alpha * c_grad
        if cfg.beta > 0 and _layer_active(cfg.style_layers, l):
            for a, maps in enumerate(style_features):
                wgt = cfg.beta * asw_table.omega_bar[l, a]
                s_loss, s_grad = style_loss_grad(maps[l], x_features[l])
                loss += wgt * s_loss
                upstream[l] += wgt * s_grad
    return loss, backward(x, bank, upstream)


def adam_step(x, grad, state, cfg):
    """One bias-corrected Adam update; the image stays clamped to [0, 1]."""
    if x.shape != grad.shape or state.m.shape != x.shape:
        raise ValueError("image, gradient, and state shapes disagree")
    t = state.t + 1
    m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad
    v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad * grad
    m_hat = m / (1.0 - cfg.beta1**t)
    v_hat = v / (1.0 - cfg.beta2**t)
    x_new = np.clip(x - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.adam_eps), 0.0, 1.0)
    return x_new, AdamState(m=m, v=v, t=t)


def stylize(
    d,
    styles,
    cfg=TransferConfig(),
    bank=None,
    theta=0.85,
    tol=1e-4,
    content_features=None,
    trace=None,
):
    """Optimize an image toward the content/style objective.

    `content_features` may carry externally computed feature maps for the
    content image in place of the built-in extractor's. `trace`, if given,
    is a list that receives the per-iteration loss values.
    """
    if bank is None:
        raise ValueError("a filter bank is required")
    if not styles:
        raise ValueError("need at least one style image")
    d = np.asarray(d, dtype=np.float64)
    for s in styles:
        if np.asarray(s).shape[:2] != d.shape[:2]:
            raise ValueError("style images must match the content size")
    d_features = content_features if content_features is not None else extract(d, bank)
    style_features = [extract(np.asarray(s, dtype=np.float64), bank) for s in styles]
    asw_table = compute_asw(style_features, theta=theta, tol=tol)

    if cfg.init == "content":
        x = d.copy()
    else:
        rng = np.random.default_rng(cfg.seed)
        x = rng.uniform(0.0, 1.0, size=d.shape)
    state = AdamState.like(x)
    for _ in range(cfg.iterations):
        loss, grad = total_loss(d_features, style_features, x, bank, asw_table, cfg)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise NumericalError(f"non-finite loss/gradient at step {state.t + 1}")
        if trace is not None:
            trace.append(loss)
        x, state = adam_step(x, grad, state, cfg)
    return x
