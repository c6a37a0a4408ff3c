#!/usr/bin/env python3
"""Aggregate a feature stack into a semantic map and fuse it with the
contrast map.

Feature containers normally come from the exporter tool (see exporter/ in
the repository root); this demo builds a small synthetic stack whose first
map contains a hot blob, standing in for a semantically meaningful
detector firing on an object. It then walks through the three fusion
strategies.

Maxima normalization rescales each map by (1 - mean of its local maxima)
squared, so a map whose secondary maxima are weak relative to its peak
keeps most of its weight, while a map with many comparable peaks is
suppressed. The edge case is instructive: a map with exactly one local
maximum has mean-of-maxima 1 and is zeroed outright, which happens to the
ultra-clean contrast map below.
"""

import os

import numpy as np

from scafi import CasConfig, cas_saliency, fuse, maxima_normalize, sas_saliency
from scafi.fixtures import make_blob_stack, make_scene_image
from scafi.formats import render_heatmap, write_image_png

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

image, bbox = make_scene_image()
height, width = image.shape[:2]

# a stack whose hot blob sits on the disk, as a conv5 detector would
stack = make_blob_stack(width=width, height=height,
                        blob=((bbox[1] + bbox[3]) // 2, (bbox[0] + bbox[2]) // 2), seed=0)
semantic = sas_saliency(stack, weights="w5", mode="standard")
contrast = cas_saliency(image, CasConfig(rng_seed=0, training_patch_cap=8000,
                                         max_ica_iterations=100))

print("map statistics before fusion:")
for name, m in (("semantic", semantic), ("contrast", contrast)):
    scaled = maxima_normalize(m)
    print(f"  {name:9s} peak {m.max():.3f} -> {scaled.max():.3f} after maxima normalization")

for strategy in ("mn", "ap", "mp"):
    fused = fuse(semantic, contrast, strategy=strategy)
    y, x = np.unravel_index(np.argmax(fused), fused.shape)
    print(f"fusion {strategy}: argmax ({x},{y})")
    write_image_png(os.path.join(OUT, f"fused_{strategy}.png"),
                    render_heatmap(image, fused, alpha=0.55))

# the literal softmax variant highlights the weakest responses instead;
# compare the two aggregation modes side by side
flipped = sas_saliency(stack, weights="w5", mode="literal")
write_image_png(os.path.join(OUT, "semantic_standard.png"), render_heatmap(image, semantic, 0.55))
write_image_png(os.path.join(OUT, "semantic_literal.png"), render_heatmap(image, flipped, 0.55))
print(f"outputs in {OUT}/")
