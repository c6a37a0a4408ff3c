"""Semantic-aware saliency (SAS) by deep feature integration.

Feature maps are grouped by convolutional stage (conv1..conv5). Each map is
resized to the image resolution, turned into a spatial probability
distribution with a softmax, and the distributions of a stage are summed.
Stage maps are then combined with a layer weight vector.
"""

from dataclasses import dataclass

import numpy as np

from .core import interp_matrix, normalize_range

LAYER_NAMES = ("conv1", "conv2", "conv3", "conv4", "conv5")

# map counts produced by the reference exporter, per stage
EXPECTED_MAP_COUNTS = {
    "conv1": 128,
    "conv2": 256,
    "conv3": 768,
    "conv4": 1536,
    "conv5": 1536,
}

WEIGHT_PRESETS = {
    "w1": (1.0, 0.0, 0.0, 0.0, 0.0),
    "w2": (0.0, 1.0, 0.0, 0.0, 0.0),
    "w3": (0.0, 0.0, 1.0, 0.0, 0.0),
    "w4": (0.0, 0.0, 0.0, 1.0, 0.0),
    "w5": (0.0, 0.0, 0.0, 0.0, 1.0),
    "w_all": (0.2, 0.2, 0.2, 0.2, 0.2),
}

EQ3_MODES = ("standard", "literal")

_CHUNK = 32  # maps resized per batch; bounds peak memory at image resolution


@dataclass
class FeatureStack:
    """Feature maps grouped by stage, plus the source image geometry.

    ``layers`` maps stage name -> (map_count, height, width) float array of
    non-negative (post-ReLU) activations at the stage's native resolution.
    """

    image_width: int
    image_height: int
    layers: dict

    def map_count(self, name):
        return self.layers[name].shape[0]


def resolve_weights(weights):
    """Accept a preset name or a 5-vector; return a length-5 float array."""
    if isinstance(weights, str):
        key = "w_all" if weights == "all" else weights
        if key not in WEIGHT_PRESETS:
            raise ValueError(f"unknown weight preset {weights!r}")
        return np.array(WEIGHT_PRESETS[key], dtype=np.float64)
    arr = np.asarray(weights, dtype=np.float64)
    if arr.shape != (5,):
        raise ValueError("layer weights must have 5 entries (conv1..conv5)")
    if arr.min() < 0:
        raise ValueError("layer weights must be non-negative")
    if arr.sum() <= 0:
        raise ValueError("layer weights must not all be zero")
    return arr


def aggregate_layer(stack, layer_name, mode="standard"):
    """Sum of per-map spatial softmax distributions for one stage.

    Maps are resized (corner-aligned bilinear) to the image resolution
    before the softmax. ``standard`` scores exp(C - max); ``literal``
    flips the exponent sign, which peaks where the feature is weakest.
    """
    if mode not in EQ3_MODES:
        raise ValueError(f"unknown softmax mode {mode!r}")
    if layer_name not in stack.layers:
        raise ValueError(f"layer {layer_name!r} not present in stack")
    maps = stack.layers[layer_name]
    if maps.shape[0] == 0:
        raise ValueError(f"layer {layer_name!r} is empty")
    h, w = stack.image_height, stack.image_width
    rows = interp_matrix(maps.shape[1], h)
    cols_t = interp_matrix(maps.shape[2], w).T
    out = np.zeros((h, w))
    for start in range(0, maps.shape[0], _CHUNK):
        chunk = maps[start : start + _CHUNK].astype(np.float64)
        resized = rows @ chunk @ cols_t  # (k, h, w)
        peak = resized.max(axis=(1, 2), keepdims=True)
        sign = -1.0 if mode == "literal" else 1.0
        e = np.exp(sign * (resized - peak))
        out += (e / e.sum(axis=(1, 2), keepdims=True)).sum(axis=0)
    return out


def combine_layers(layer_maps, weights):
    """Weighted sum of stage maps, range-normalized.

    A stage may be absent only if its weight is zero; present maps must
    share dimensions.
    """
    w = resolve_weights(weights)
    out = None
    for name, weight in zip(LAYER_NAMES, w):
        if weight == 0.0:
            continue
        if name not in layer_maps:
            raise ValueError(f"layer {name!r} has weight {weight} but no map")
        m = np.asarray(layer_maps[name], dtype=np.float64)
        if out is None:
            out = weight * m
        else:
            if m.shape != out.shape:
                raise ValueError("stage maps have mismatched dimensions")
            out += weight * m
    return normalize_range(out)


def sas_saliency(stack, weights="w5", mode="standard"):
    """Semantic pathway: aggregate each weighted stage, then combine."""
    w = resolve_weights(weights)
    layer_maps = {}
    for name, weight in zip(LAYER_NAMES, w):
        if weight == 0.0:
            continue
        layer_maps[name] = aggregate_layer(stack, name, mode=mode)
    return combine_layers(layer_maps, w)
