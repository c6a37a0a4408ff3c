"""Eye-fixation evaluation: fixation densities, shuffled AUC, blur sweep.

Shuffled AUC scores a saliency map by how well it separates the test
image's fixations (positives) from fixations borrowed from other images
(negatives), which discounts center bias. Sampling is repeated and
averaged; every repetition draws as many negatives as there are positives.
"""

import warnings
import zlib
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import gaussian_blur

DEFAULT_SIGMA_FRACTIONS = tuple(i / 100.0 for i in range(9))  # 0.00 .. 0.08 of width


@dataclass
class FixationSet:
    """Pixel locations of recorded fixations, pooled over subjects."""

    image_id: str
    width: int
    height: int
    points: np.ndarray  # (n, 2) int, columns are (x, y)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.intp).reshape(-1, 2)
        if pts.shape[0] == 0:
            raise ValueError(f"{self.image_id}: fixation set is empty")
        if (
            pts[:, 0].min() < 0
            or pts[:, 1].min() < 0
            or pts[:, 0].max() >= self.width
            or pts[:, 1].max() >= self.height
        ):
            raise ValueError(f"{self.image_id}: fixation outside image bounds")
        self.points = pts


@dataclass
class SaucConfig:
    repetitions: int = 100
    rng_seed: int = 42

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def fixation_density(fixations, sigma):
    """Binary fixation impulses blurred with a Gaussian, peak-normalized."""
    impulses = np.zeros((fixations.height, fixations.width))
    impulses[fixations.points[:, 1], fixations.points[:, 0]] = 1.0
    density = gaussian_blur(impulses, sigma)
    return density / density.max()


def auc_score(pos_values, neg_values):
    """Exact rank-based AUC (Mann-Whitney); tied values earn half credit."""
    pos = np.asarray(pos_values, dtype=np.float64)
    neg = np.asarray(neg_values, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("need at least one positive and one negative value")
    ranks = rankdata(np.concatenate([pos, neg]), method="average")
    pos_rank_sum = ranks[: pos.size].sum()
    return (pos_rank_sum - pos.size * (pos.size + 1) / 2.0) / (pos.size * neg.size)


def _rep_rng(seed, image_id, repetition):
    return np.random.default_rng([seed, zlib.crc32(image_id.encode()), repetition])


def sauc(saliency, fixations, other_points, cfg=None):
    """Shuffled AUC of a map against one image's fixations.

    Negatives are drawn per repetition from the pooled fixations of other
    images, clipped into this image's bounds, with the exact positive
    coordinates excluded. Sampling is without replacement whenever the
    candidate pool is large enough.
    """
    cfg = cfg or SaucConfig()
    arr = np.asarray(saliency, dtype=np.float64)
    if arr.shape != (fixations.height, fixations.width):
        raise ValueError("saliency map dimensions do not match the fixation set")
    other = np.asarray(other_points, dtype=np.intp).reshape(-1, 2)
    if other.shape[0] == 0:
        raise ValueError("negative fixation pool is empty")
    other = np.column_stack(
        [np.clip(other[:, 0], 0, fixations.width - 1), np.clip(other[:, 1], 0, fixations.height - 1)]
    )
    pos_pts = fixations.points
    pos_set = set(map(tuple, pos_pts))
    keep = np.array([tuple(p) not in pos_set for p in other], dtype=bool)
    candidates = other[keep]
    n_pos = pos_pts.shape[0]
    if candidates.shape[0] == 0:
        raise ValueError("no negative candidates remain after excluding positives")
    replace = candidates.shape[0] < n_pos
    if replace:
        warnings.warn(
            f"{fixations.image_id}: only {candidates.shape[0]} negative candidates for "
            f"{n_pos} positives; sampling with replacement",
            stacklevel=2,
        )
    pos_values = arr[pos_pts[:, 1], pos_pts[:, 0]]
    scores = np.empty(cfg.repetitions)
    for rep in range(cfg.repetitions):
        rng = _rep_rng(cfg.rng_seed, fixations.image_id, rep)
        pick = rng.choice(candidates.shape[0], size=n_pos, replace=replace)
        neg = candidates[pick]
        scores[rep] = auc_score(pos_values, arr[neg[:, 1], neg[:, 0]])
    return float(scores.mean())


def blur_sweep(saliency, fixations, other_points, sigma_fractions=None, cfg=None):
    """Shuffled AUC over a grid of blur kernels.

    Sigmas are fractions of the image width, resolved to pixels before
    blurring. Returns per-sigma scores plus the best grid point.
    """
    fractions = list(DEFAULT_SIGMA_FRACTIONS if sigma_fractions is None else sigma_fractions)
    if not fractions:
        raise ValueError("sigma grid is empty")
    scores = []
    for frac in fractions:
        blurred = gaussian_blur(saliency, frac * fixations.width)
        scores.append(sauc(blurred, fixations, other_points, cfg))
    best = int(np.argmax(scores))
    return {
        "sigmas": fractions,
        "scores": scores,
        "best_sigma": fractions[best],
        "best_score": scores[best],
    }


def dataset_eval(entries, sigma_fractions=None, cfg=None):
    """Evaluate a set of (image_id, saliency map, FixationSet) entries.

    Each image's negatives pool the fixations of all other images. The
    report carries per-image sweeps, the dataset mean per sigma, and the
    best mean score; everything is deterministic given the config seed.
    """
    cfg = cfg or SaucConfig()
    fractions = list(DEFAULT_SIGMA_FRACTIONS if sigma_fractions is None else sigma_fractions)
    entries = sorted(entries, key=lambda e: e[0])
    if len(entries) < 2:
        raise ValueError("need at least 2 images so negatives can come from other images")
    per_image = []
    for image_id, saliency, fixations in entries:
        pool = np.concatenate(
            [fx.points for other_id, _, fx in entries if other_id != image_id]
        )
        sweep = blur_sweep(saliency, fixations, pool, fractions, cfg)
        per_image.append(
            {
                "id": image_id,
                "scores": sweep["scores"],
                "best_sigma": sweep["best_sigma"],
                "best_score": sweep["best_score"],
            }
        )
    mean_scores = [
        float(np.mean([img["scores"][i] for img in per_image])) for i in range(len(fractions))
    ]
    best = int(np.argmax(mean_scores))
    return {
        "config": {"repetitions": cfg.repetitions, "rng_seed": cfg.rng_seed},
        "sigmas": fractions,
        "mean_scores": mean_scores,
        "best_sigma": fractions[best],
        "best_score": mean_scores[best],
        "images": per_image,
    }
