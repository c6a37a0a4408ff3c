#!/usr/bin/env python3
"""Walk through the contrast-aware pathway on classic search stimuli.

Builds the three singleton displays (color, intensity, size), runs the
multi-scale sparse-coding pathway on each, and saves heatmap overlays with
the maximum marked by a red dot. The singleton should win every time even
though nothing in the pathway knows what a "disk" is: its patches are
simply rarer than everything else in the image.
"""

import os

import numpy as np

from scafi import CasConfig, cas_saliency, render_heatmap
from scafi.cas import extract_patches, learn_basis
from scafi.fixtures import POPOUT_KINDS, make_popout_image
from scafi.formats import write_image_png

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

cfg = CasConfig(rng_seed=0, training_patch_cap=8000, max_ica_iterations=100)

for kind in POPOUT_KINDS:
    image, bbox = make_popout_image(kind, seed=0)
    saliency = cas_saliency(image, cfg)
    y, x = np.unravel_index(np.argmax(saliency), saliency.shape)
    inside = bbox[0] <= x <= bbox[2] and bbox[1] <= y <= bbox[3]
    print(f"{kind:9s} singleton: argmax at ({x},{y}), target box {bbox}, hit={inside}")
    write_image_png(os.path.join(OUT, f"popout_{kind}_overlay.png"),
                    render_heatmap(image, saliency, alpha=0.55))

# peek inside one scale: the learned filters for 7x7 windows of the color
# stimulus look like localized edge/color-opponent detectors
image, _ = make_popout_image("color", seed=0)
patches = extract_patches(image, 7)
basis = learn_basis(patches, cfg)
print(f"\n7x7 basis: {basis.retained_dim} filters retained out of {patches.patch_dim} "
      f"dimensions, converged={basis.converged} after {basis.iterations} iterations")

# tile the first 25 filters into one image, each rescaled to [0,1],
# upscaled 4x so the structure is visible
tiles = []
for row in basis.filters[:25]:
    f = row.reshape(7, 7, 3)
    f = (f - f.min()) / (f.max() - f.min())
    tiles.append(np.pad(f, ((1, 1), (1, 1), (0, 0)), constant_values=1.0))
grid = np.concatenate([np.concatenate(tiles[i * 5:(i + 1) * 5], axis=1) for i in range(5)])
write_image_png(os.path.join(OUT, "learned_filters_7x7.png"), np.kron(grid, np.ones((4, 4, 1))))
print(f"outputs in {OUT}/")
