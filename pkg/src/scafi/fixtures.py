"""Synthetic fixtures: pop-out stimuli, feature stacks, eval datasets.

The pop-out images follow the classic pre-attentive search layout: a grid
of identical distractor disks on a flat background with a single target
that differs in exactly one attribute (color, intensity, or size). Each
generator also returns the target's bounding box so tests can check that
the saliency argmax lands on the singleton.
"""

import json
import os

import numpy as np

from .core import gaussian_blur
from .evaluation import FixationSet, fixation_density
from .formats import write_fixations, write_image_png, write_map_f32, write_sfm1
from .sas import FeatureStack

POPOUT_KINDS = ("color", "intensity", "size")

_POPOUT_STYLES = {
    # distractor color, target color, distractor radius, target radius
    "color": ((0.20, 0.60, 0.20), (0.80, 0.20, 0.20), 5, 5),
    "intensity": ((0.62, 0.62, 0.62), (0.95, 0.95, 0.95), 5, 5),
    "size": ((0.20, 0.30, 0.80), (0.20, 0.30, 0.80), 2, 12),
}


def _paint_disk(img, cy, cx, radius, color):
    h, w = img.shape[:2]
    yy, xx = np.ogrid[:h, :w]
    img[(yy - cy) ** 2 + (xx - cx) ** 2 <= radius * radius] = color


def make_popout_image(kind, seed=0, width=160, height=120):
    """One singleton among distractor disks; returns (image, target bbox).

    The bbox is (x0, y0, x1, y1), inclusive, with a 2-pixel margin around
    the target disk.
    """
    if kind not in _POPOUT_STYLES:
        raise ValueError(f"unknown pop-out kind {kind!r}")
    d_col, t_col, d_rad, t_rad = _POPOUT_STYLES[kind]
    rng = np.random.default_rng(seed)
    img = np.full((height, width, 3), 0.5)
    centers = [
        (cy, cx)
        for cy in range(16, height - 12, 28)
        for cx in range(18, width - 14, 30)
    ]
    target = int(rng.integers(1, len(centers) - 1))
    for k, (cy, cx) in enumerate(centers):
        if k != target:
            _paint_disk(img, cy, cx, d_rad, d_col)
    tcy, tcx = centers[target]
    _paint_disk(img, tcy, tcx, t_rad, t_col)
    bbox = (tcx - t_rad - 2, tcy - t_rad - 2, tcx + t_rad + 2, tcy + t_rad + 2)
    return img, bbox


def make_scene_image(width=160, height=120):
    """Gray scene with one red disk; the simplest pop-out check."""
    img = np.full((height, width, 3), 0.5)
    cy, cx, r = height // 2, width // 2, 8
    _paint_disk(img, cy, cx, r, (0.80, 0.15, 0.15))
    bbox = (cx - r - 2, cy - r - 2, cx + r + 2, cy + r + 2)
    return img, bbox


def make_blob_stack(width=64, height=48, map_count=4, blob=(24, 32), layer="conv5", seed=0):
    """Feature stack whose first map holds a single hot Gaussian blob; the
    remaining maps are low-level noise. Native map resolution is a quarter
    of the image in each axis."""
    rng = np.random.default_rng(seed)
    mh, mw = max(2, height // 4), max(2, width // 4)
    maps = 0.05 * rng.random((map_count, mh, mw)).astype(np.float32)
    impulse = np.zeros((mh, mw))
    impulse[int(blob[0] * mh / height), int(blob[1] * mw / width)] = 1.0
    maps[0] += (4.0 * gaussian_blur(impulse, 1.5)).astype(np.float32)
    return FeatureStack(image_width=width, image_height=height, layers={layer: maps})


def make_eval_dataset(n_images=10, width=120, height=90, fixations_per_image=40, seed=0):
    """Synthetic eye-tracking data with disjoint per-image fixation clusters.

    Cluster centers are spread around a circle so each image's fixations
    occupy a region that other images' fixations avoid; a predictor equal
    to the image's own fixation density easily separates the two. Returns
    a list of (image_id, FixationSet).
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_images):
        angle = 2.0 * np.pi * i / n_images
        cx = width / 2 + 0.32 * width * np.cos(angle)
        cy = height / 2 + 0.32 * height * np.sin(angle)
        pts = np.column_stack(
            [
                np.clip(np.round(rng.normal(cx, width * 0.03, fixations_per_image)), 0, width - 1),
                np.clip(np.round(rng.normal(cy, height * 0.03, fixations_per_image)), 0, height - 1),
            ]
        ).astype(np.intp)
        image_id = f"synth_{i:02d}"
        out.append((image_id, FixationSet(image_id=image_id, width=width, height=height, points=pts)))
    return out


def generate_all(out_dir, seed=0):
    """Write the full fixture tree used by the CLI examples and tests.

    Layout:
        popout_<kind>.png + popout_targets.json
        scene.png, scene.sfm
        eval/fixations/<id>.json, eval/maps/<id>.f32
    """
    os.makedirs(out_dir, exist_ok=True)
    targets = {}
    for kind in POPOUT_KINDS:
        img, bbox = make_popout_image(kind, seed=seed)
        write_image_png(os.path.join(out_dir, f"popout_{kind}.png"), img)
        targets[kind] = list(bbox)
    with open(os.path.join(out_dir, "popout_targets.json"), "w", encoding="utf-8") as fh:
        json.dump(targets, fh, sort_keys=True)

    scene, scene_bbox = make_scene_image()
    write_image_png(os.path.join(out_dir, "scene.png"), scene)
    stack = make_blob_stack(
        width=scene.shape[1],
        height=scene.shape[0],
        blob=((scene_bbox[1] + scene_bbox[3]) // 2, (scene_bbox[0] + scene_bbox[2]) // 2),
        seed=seed,
    )
    write_sfm1(os.path.join(out_dir, "scene.sfm"), stack)

    fix_dir = os.path.join(out_dir, "eval", "fixations")
    map_dir = os.path.join(out_dir, "eval", "maps")
    os.makedirs(fix_dir, exist_ok=True)
    os.makedirs(map_dir, exist_ok=True)
    for image_id, fx in make_eval_dataset(seed=seed):
        write_fixations(
            os.path.join(fix_dir, f"{image_id}.json"),
            [fx.points.tolist()],
            image_id,
            fx.width,
            fx.height,
        )
        write_map_f32(os.path.join(map_dir, f"{image_id}.f32"), fixation_density(fx, sigma=4.0))
    return out_dir
