"""Pathway integration: maxima normalization plus pooling alternatives.

Maxima normalization scales a map by ``(1 - mean(local maxima))^2``, so a
map with one dominant peak keeps its weight while a map with many
comparable peaks is suppressed. This is the classic promotion operator
from feature-integration saliency models.
"""

from dataclasses import dataclass

import numpy as np

from .core import normalize_range

STRATEGIES = ("mn", "ap", "mp")

NEIGHBORHOODS = ("eight", "diagonal")


@dataclass
class MnConfig:
    local_max_threshold: float = 0.1
    # "eight" is the standard 8-connected local-maximum test; "diagonal"
    # compares against the 4 diagonal neighbors only.
    neighborhood: str = "eight"

    def __post_init__(self):
        if not 0.0 < self.local_max_threshold < 1.0:
            raise ValueError("local max threshold must be in (0, 1)")
        if self.neighborhood not in NEIGHBORHOODS:
            raise ValueError(f"unknown neighborhood {self.neighborhood!r}")


def _local_maxima(arr, threshold, neighborhood):
    """Boolean mask of interior pixels strictly greater than every neighbor
    and above the threshold. Border pixels have no complete neighborhood and
    are never maxima."""
    h, w = arr.shape
    mask = np.zeros((h, w), dtype=bool)
    if h < 3 or w < 3:
        return mask
    c = arr[1:-1, 1:-1]
    diag = [arr[:-2, :-2], arr[:-2, 2:], arr[2:, :-2], arr[2:, 2:]]
    axial = [arr[:-2, 1:-1], arr[2:, 1:-1], arr[1:-1, :-2], arr[1:-1, 2:]]
    neighbors = diag if neighborhood == "diagonal" else diag + axial
    strict = c > threshold
    for n in neighbors:
        strict &= c > n
    mask[1:-1, 1:-1] = strict
    return mask


def maxima_normalize(saliency, cfg=None):
    """Range-normalize, then rescale by (1 - mean of local maxima)^2.

    With no qualifying maxima (including the degenerate constant map) the
    range-normalized map is returned unchanged.
    """
    cfg = cfg or MnConfig()
    s = normalize_range(saliency)
    mask = _local_maxima(s, cfg.local_max_threshold, cfg.neighborhood)
    count = int(mask.sum())
    if count == 0:
        return s
    mean_max = s[mask].sum() / count
    return s * (1.0 - mean_max) ** 2


def fuse(map_a, map_b, strategy="mn", cfg=None):
    """Combine two pathway maps; the result is range-normalized.

    mn: sum of maxima-normalized maps; ap: average of range-normalized
    maps; mp: pixel-wise max of range-normalized maps.
    """
    a = np.asarray(map_a, dtype=np.float64)
    b = np.asarray(map_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"map dimensions differ: {a.shape} vs {b.shape}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown fusion strategy {strategy!r}")
    if strategy == "mn":
        out = maxima_normalize(a, cfg) + maxima_normalize(b, cfg)
    elif strategy == "ap":
        out = (normalize_range(a) + normalize_range(b)) / 2.0
    else:
        out = np.maximum(normalize_range(a), normalize_range(b))
    return normalize_range(out)
