"""Shared raster types and elementary grid operations.

Conventions used throughout the package:

* an image is a ``(H, W, 3)`` float array, RGB, channel-interleaved,
  intensities in ``[0, 1]``;
* a saliency map is a ``(H, W)`` float array of finite, non-negative values.

All functions here are pure and never modify their inputs.
"""

import math

import numpy as np
from scipy.ndimage import gaussian_filter


def validate_image(image):
    """Check image shape/range conventions, returning a float64 view or copy."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) RGB image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("image intensities must lie in [0, 1]")
    return arr


def validate_map(saliency):
    arr = np.asarray(saliency, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected 2D saliency map, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("saliency map contains non-finite values")
    if arr.min() < 0.0:
        raise ValueError("saliency map contains negative values")
    return arr


def normalize_range(saliency):
    """Rescale a map affinely to [0, 1].

    A constant map carries no signal and maps to all zeros (this also
    avoids the 0/0 in the affine rescale).
    """
    arr = np.asarray(saliency, dtype=np.float64)
    lo = arr.min()
    hi = arr.max()
    if hi > lo:
        return (arr - lo) / (hi - lo)
    return np.zeros_like(arr)


def gaussian_blur(saliency, sigma):
    """Separable Gaussian blur with replicate border padding.

    ``sigma`` is in pixels; the kernel is truncated at radius ``ceil(3*sigma)``.
    ``sigma == 0`` returns the input unchanged.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    arr = np.asarray(saliency, dtype=np.float64)
    if sigma == 0:
        return arr.copy()
    radius = math.ceil(3.0 * sigma)
    return gaussian_filter(arr, sigma=sigma, mode="nearest", radius=radius)


def interp_matrix(n_in, n_out):
    """Corner-aligned linear interpolation matrix of shape (n_out, n_in).

    Output sample j reads input position ``j * (n_in - 1) / (n_out - 1)``;
    a single output (or input) sample degenerates to index 0 (or weight 1).
    """
    a = np.zeros((n_out, n_in))
    if n_in == 1:
        a[:, 0] = 1.0
        return a
    if n_out == 1:
        a[0, 0] = 1.0
        return a
    pos = np.arange(n_out) * (n_in - 1) / (n_out - 1)
    left = np.minimum(pos.astype(np.intp), n_in - 2)
    frac = pos - left
    a[np.arange(n_out), left] = 1.0 - frac
    a[np.arange(n_out), left + 1] = frac
    return a


def resize_bilinear(grid, new_width, new_height):
    """Bilinear resize with corner-aligned sampling.

    Works on a 2D map or an (H, W, C) image; output values are clipped to
    the input's [min, max] so interpolation never leaves the input range.
    """
    if new_width < 1 or new_height < 1:
        raise ValueError("target dimensions must be >= 1")
    arr = np.asarray(grid, dtype=np.float64)
    h, w = arr.shape[:2]
    if (w, h) == (new_width, new_height):
        return arr.copy()
    rows = interp_matrix(h, new_height)
    cols = interp_matrix(w, new_width)
    if arr.ndim == 2:
        out = rows @ arr @ cols.T
    elif arr.ndim == 3:
        out = np.stack([rows @ arr[:, :, c] @ cols.T for c in range(arr.shape[2])], axis=2)
    else:
        raise ValueError(f"expected 2D or 3D array, got shape {arr.shape}")
    return np.clip(out, arr.min(), arr.max())
