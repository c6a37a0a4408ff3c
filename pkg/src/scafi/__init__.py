"""Saliency estimation from two complementary pathways.

The contrast-aware pathway learns a per-image sparse code over multi-scale
patches and scores each patch by the self-information of its responses.
The semantic pathway aggregates deep convolutional feature maps read from
a container file. Maps are fused with maxima normalization and evaluated
against eye-fixation data with shuffled AUC.
"""

__version__ = "0.1.0"

from .cas import CasConfig, cas_saliency
from .core import gaussian_blur, normalize_range, resize_bilinear
from .evaluation import (
    FixationSet,
    SaucConfig,
    auc_score,
    blur_sweep,
    dataset_eval,
    fixation_density,
    sauc,
)
from .formats import read_map, read_sfm1, render_heatmap, write_map, write_sfm1
from .fusion import MnConfig, fuse, maxima_normalize
from .sas import FeatureStack, aggregate_layer, combine_layers, sas_saliency

__all__ = [
    "CasConfig",
    "FeatureStack",
    "FixationSet",
    "MnConfig",
    "SaucConfig",
    "aggregate_layer",
    "auc_score",
    "blur_sweep",
    "cas_saliency",
    "combine_layers",
    "dataset_eval",
    "fixation_density",
    "fuse",
    "gaussian_blur",
    "maxima_normalize",
    "normalize_range",
    "read_map",
    "read_sfm1",
    "render_heatmap",
    "resize_bilinear",
    "sas_saliency",
    "sauc",
    "write_map",
    "write_sfm1",
]
