"""Sketch extraction, paired-dataset building, and adaptively weighted
multi-style image synthesis."""

from .asw import ASWTable, PageRankResult, compute_asw, pagerank
from .dataset import build_dataset, extract_pair
from .edge import canny, sobel
from .feature import FeatureMap, FilterBank, build_bank, extract, gram
from .imgio import load_image, resize, save_image, to_grayscale
from .pencil import SketchParams, pencil_sketch
from .smooth import L0Params, grad_count, l0_smooth
from .transfer import AdamState, TransferConfig, adam_step, stylize, total_loss

__version__ = "0.1.0"

__all__ = [
    "ASWTable",
    "AdamState",
    "FeatureMap",
    "FilterBank",
    "L0Params",
    "PageRankResult",
    "SketchParams",
    "TransferConfig",
    "adam_step",
    "build_bank",
    "build_dataset",
    "canny",
    "compute_asw",
    "extract",
    "extract_pair",
    "grad_count",
    "gram",
    "l0_smooth",
    "load_image",
    "pagerank",
    "pencil_sketch",
    "resize",
    "save_image",
    "sobel",
    "stylize",
    "to_grayscale",
    "total_loss",
]
