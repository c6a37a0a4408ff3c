"""Contrast-aware saliency (CAS).

Pipeline per window size: dense patch extraction -> adaptive complete
sparse basis via FastICA -> linear filter responses -> per-feature
histogram densities -> per-patch self-information -> 2D map. Single-scale
maps are normalized and summed into the final CAS map.

The basis is learned per image: the representation adapts to the input so
that self-information measures contrast against the image's own statistics,
not against an external corpus.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import normalize_range, resize_bilinear, validate_image

DEFAULT_SCALES = (1, 3, 5, 7)


@dataclass
class CasConfig:
    scales: tuple = DEFAULT_SCALES
    stride: int = 1
    max_ica_iterations: int = 200
    ica_tolerance: float = 1e-4
    ica_nonlinearity: str = "tanh"
    training_patch_cap: int = 20000
    rng_seed: int = 42
    working_max_width: int = 320
    density_bins: int = 100

    def __post_init__(self):
        if any(s < 1 or s % 2 == 0 for s in self.scales):
            raise ValueError("window sizes must be odd and >= 1")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.ica_nonlinearity != "tanh":
            raise ValueError(f"unsupported ICA nonlinearity {self.ica_nonlinearity!r}")


@dataclass
class PatchMatrix:
    """Vectorized image patches at one window size.

    ``data`` is (patch_dim, patch_count) with columns in raster order of the
    patch centers; ``center_rows``/``center_cols`` give each column's center
    pixel in the source image.
    """

    window_size: int
    image_height: int
    image_width: int
    data: np.ndarray
    center_rows: np.ndarray
    center_cols: np.ndarray

    @property
    def patch_dim(self):
        return self.data.shape[0]

    @property
    def patch_count(self):
        return self.data.shape[1]


@dataclass
class IcaBasis:
    """Affine unmixing learned from patches: subtract mean, whiten, rotate."""

    window_size: int
    mean: np.ndarray            # (patch_dim,)
    whitening: np.ndarray       # (retained_dim, patch_dim)
    rotation: np.ndarray        # (retained_dim, retained_dim), orthogonal
    converged: bool
    iterations: int
    training_indices: np.ndarray

    @property
    def retained_dim(self):
        return self.whitening.shape[0]

    @property
    def filters(self):
        """Effective linear filters, one per row."""
        return self.rotation @ self.whitening


@dataclass
class DensityModel:
    """Laplace-smoothed histogram density for one feature.

    Probability lookups clamp out-of-support values to the nearest edge bin.
    """

    edges: np.ndarray
    probs: np.ndarray

    def log_prob(self, values):
        nbins = self.probs.size
        idx = np.searchsorted(self.edges, values, side="right") - 1
        idx = np.clip(idx, 0, nbins - 1)
        return np.log(np.minimum(self.probs[idx], 1.0))


@dataclass
class ResponseMatrix:
    window_size: int
    data: np.ndarray  # (retained_dim, patch_count)
    densities: list | None = None


def extract_patches(image, window_size, stride=1):
    """Slide a window_size x window_size window over the image at the given
    stride, from the top-left to the bottom-right, and stack the vectorized
    RGB patches as columns."""
    img = validate_image(image)
    h, w = img.shape[:2]
    b = int(window_size)
    if b % 2 == 0 or b < 1:
        raise ValueError("window size must be odd and >= 1")
    if b > min(h, w):
        raise ValueError(f"image too small for scale {b} ({w}x{h})")
    win = sliding_window_view(img, (b, b), axis=(0, 1))  # (h-b+1, w-b+1, 3, b, b)
    win = win[::stride, ::stride]
    gh, gw = win.shape[:2]
    # column layout: (row, col, channel) of the patch, flattened C-order
    data = win.transpose(0, 1, 3, 4, 2).reshape(gh * gw, b * b * 3).T
    data = np.ascontiguousarray(data)
    off = (b - 1) // 2
    rr, cc = np.meshgrid(np.arange(gh) * stride + off, np.arange(gw) * stride + off, indexing="ij")
    return PatchMatrix(
        window_size=b,
        image_height=h,
        image_width=w,
        data=data,
        center_rows=rr.ravel(),
        center_cols=cc.ravel(),
    )


def whiten_data(data, eig_cutoff=1e-8):
    """Center the columns of (dim, n) data and compute a whitening transform.

    Eigendirections with eigenvalue < eig_cutoff * lambda_max are dropped;
    returns (mean, whitening) where whitening @ (data - mean) has identity
    covariance over the given columns.
    """
    mean = data.mean(axis=1)
    centered = data - mean[:, None]
    cov = centered @ centered.T / data.shape[1]
    eigvals, eigvecs = np.linalg.eigh(cov)
    lam_max = eigvals[-1]
    if not np.isfinite(lam_max) or lam_max <= 1e-14:
        raise ValueError("degenerate patch statistics")
    keep = eigvals > eig_cutoff * lam_max
    whitening = (eigvecs[:, keep] / np.sqrt(eigvals[keep])).T
    return mean, whitening


def _symmetric_decorrelation(w):
    # W <- (W W^T)^{-1/2} W
    s, u = np.linalg.eigh(w @ w.T)
    s = np.maximum(s, 1e-12)
    return (u * (1.0 / np.sqrt(s))) @ u.T @ w


def fastica_rotation(z, rng, tol=1e-4, max_iter=200):
    """Symmetric FastICA with tanh contrast on whitened (dim, n) data.

    Iterates until the largest per-row change in |<w_new, w_old>| drops
    below ``tol``. Returns (rotation, iterations, converged); the rotation
    is orthogonalized in float64 on exit, so it satisfies the orthogonality
    contract even when the iteration did not converge. The update loop runs
    in float32: the fixed point is the same and the final decorrelation
    restores full precision.
    """
    dim, n = z.shape
    z32 = np.asarray(z, dtype=np.float32)
    w = _symmetric_decorrelation(rng.standard_normal((dim, dim))).astype(np.float32)
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        wz = w @ z32
        g = np.tanh(wz)
        g_prime_mean = (1.0 - g * g).mean(axis=1)
        w_new = (g @ z32.T) / n - g_prime_mean[:, None] * w
        w_new = _symmetric_decorrelation(w_new.astype(np.float64)).astype(np.float32)
        cos = np.einsum("ij,ij->i", w_new.astype(np.float64), w.astype(np.float64))
        w = w_new
        if np.max(np.abs(np.abs(cos) - 1.0)) < tol:
            converged = True
            break
    return _symmetric_decorrelation(w.astype(np.float64)), iterations, converged


def learn_basis(patches, cfg):
    """Learn a complete sparse basis for one scale's patches.

    Training uses a seeded uniform subsample of at most
    ``cfg.training_patch_cap`` columns; the subsample indices are kept on
    the returned basis so later stages can fit densities on the same data.
    Deterministic per (rng_seed, window_size).
    """
    n = patches.patch_count
    m = patches.patch_dim
    if n < 10 * m:
        raise ValueError(f"not enough patches to learn a basis: {n} < 10*{m}")
    rng = np.random.default_rng([cfg.rng_seed, patches.window_size])
    if n > cfg.training_patch_cap:
        idx = np.sort(rng.choice(n, size=cfg.training_patch_cap, replace=False))
    else:
        idx = np.arange(n)
    train = patches.data[:, idx]
    mean, whitening = whiten_data(train)
    z = whitening @ (train - mean[:, None])
    rotation, iterations, converged = fastica_rotation(
        z, rng, tol=cfg.ica_tolerance, max_iter=cfg.max_ica_iterations
    )
    if not converged:
        warnings.warn(
            f"FastICA did not converge in {cfg.max_ica_iterations} iterations "
            f"at window size {patches.window_size}; using current estimate",
            stacklevel=2,
        )
    return IcaBasis(
        window_size=patches.window_size,
        mean=mean,
        whitening=whitening,
        rotation=rotation,
        converged=converged,
        iterations=iterations,
        training_indices=idx,
    )


def compute_responses(basis, patches):
    """Apply the basis filters to mean-subtracted patches."""
    if basis.window_size != patches.window_size:
        raise ValueError(
            f"scale mismatch: basis {basis.window_size} vs patches {patches.window_size}"
        )
    if basis.mean.size != patches.patch_dim:
        raise ValueError("patch dimension does not match basis")
    data = basis.filters @ (patches.data - basis.mean[:, None])
    return ResponseMatrix(window_size=patches.window_size, data=data)


def fit_densities(responses, bins=100, fit_columns=None):
    """Fit a Laplace-smoothed histogram to each response row.

    ``fit_columns`` restricts the histogram to a column subset (the ICA
    training set in the CAS pipeline); scoring later clamps out-of-support
    values into the edge bins. Returns the same matrix with densities set.
    """
    data = responses.data if fit_columns is None else responses.data[:, fit_columns]
    if data.shape[1] < bins:
        raise ValueError(f"need at least {bins} responses per feature, got {data.shape[1]}")
    models = []
    n = data.shape[1]
    for row in data:
        lo, hi = row.min(), row.max()
        if hi <= lo:
            hi = lo + 1.0  # all-equal responses fall into the first bin
        edges = np.linspace(lo, hi, bins + 1)
        counts, _ = np.histogram(row, bins=edges)
        probs = (counts + 1.0) / (n + bins)
        models.append(DensityModel(edges=edges, probs=probs))
    responses.densities = models
    return responses


def self_information_map(responses):
    """Per-patch saliency: negative log joint probability of the feature
    vector, features treated as independent. Natural log; always finite and
    non-negative because the smoothed probabilities lie in (0, 1]."""
    if responses.densities is None:
        raise ValueError("densities not fitted")
    scores = np.zeros(responses.data.shape[1])
    for row, model in zip(responses.data, responses.densities):
        scores -= model.log_prob(row)
    return scores


def assemble_scale_map(scores, patches, image_shape=None):
    """Scatter per-patch scores back onto the pixel grid.

    Each score lands on its patch's center pixel; the uncovered border
    frame of width (window_size-1)/2 replicates the nearest interior value.
    The result is range-normalized. Requires the dense stride-1 grid.
    """
    h, w = image_shape if image_shape is not None else (patches.image_height, patches.image_width)
    b = patches.window_size
    pad = (b - 1) // 2
    gh, gw = h - b + 1, w - b + 1
    if scores.size != patches.patch_count or scores.size != gh * gw:
        raise ValueError("scores do not cover the dense patch grid")
    core = np.empty((gh, gw))
    core[patches.center_rows - pad, patches.center_cols - pad] = scores
    return normalize_range(np.pad(core, pad, mode="edge"))


def cas_saliency(image, cfg=None):
    """Full contrast-aware pathway over all configured window sizes.

    Images wider than ``cfg.working_max_width`` are processed at reduced
    resolution (aspect preserved) and the map is resized back. Scales too
    large for the image are skipped with a warning as long as at least one
    scale succeeds.
    """
    cfg = cfg or CasConfig()
    if cfg.stride != 1:
        raise ValueError("multi-scale map assembly requires stride 1")
    img = validate_image(image)
    orig_h, orig_w = img.shape[:2]
    if orig_w > cfg.working_max_width:
        work_w = cfg.working_max_width
        work_h = max(1, round(orig_h * work_w / orig_w))
        img = resize_bilinear(img, work_w, work_h)
    h, w = img.shape[:2]
    total = np.zeros((h, w))
    succeeded = 0
    for window_size in cfg.scales:
        try:
            patches = extract_patches(img, window_size, stride=cfg.stride)
        except ValueError as exc:
            if "image too small" in str(exc):
                warnings.warn(f"skipping scale {window_size}: {exc}", stacklevel=2)
                continue
            raise
        basis = learn_basis(patches, cfg)
        responses = compute_responses(basis, patches)
        fit_densities(responses, bins=cfg.density_bins, fit_columns=basis.training_indices)
        scores = self_information_map(responses)
        total += assemble_scale_map(scores, patches)
        succeeded += 1
    if succeeded == 0:
        raise ValueError("no scale succeeded; image too small for all configured scales")
    if (orig_h, orig_w) != (h, w):
        total = resize_bilinear(total, orig_w, orig_h)
    return normalize_range(total)
