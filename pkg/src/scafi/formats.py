"""File formats: SFM1 feature containers, saliency maps, fixation JSON.

SFM1 layout (all little-endian):

    bytes 0..3    magic "SFM1"
    bytes 4..7    header length L, uint32
    bytes 8..8+L  UTF-8 JSON: {"image_width", "image_height",
                  "layers": [{"name", "maps", "height", "width"}, ...]}
    remainder     float32 payload, layers in declared order, each laid out
                  map-major then row-major

Saliency maps travel either as raw ".f32" (uint32 width, uint32 height,
row-major float32; lossless) or as 16-bit grayscale PNG (values in [0, 1]
quantized to 0..65535, round half up).
"""

import json
import struct
import warnings

import numpy as np
from PIL import Image as PILImage

from .evaluation import FixationSet
from .sas import EXPECTED_MAP_COUNTS, FeatureStack

SFM1_MAGIC = b"SFM1"


def write_sfm1(path, stack):
    layers = [
        {"name": name, "maps": int(maps.shape[0]), "height": int(maps.shape[1]), "width": int(maps.shape[2])}
        for name, maps in stack.layers.items()
    ]
    header = json.dumps(
        {"image_width": stack.image_width, "image_height": stack.image_height, "layers": layers},
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(SFM1_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for maps in stack.layers.values():
            fh.write(np.ascontiguousarray(maps, dtype="<f4").tobytes())


def read_sfm1(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != SFM1_MAGIC:
        raise ValueError(f"{path}: bad magic {blob[:4]!r}")
    if len(blob) < 8:
        raise ValueError(f"{path}: truncated header at byte {len(blob)}")
    (header_len,) = struct.unpack("<I", blob[4:8])
    if len(blob) < 8 + header_len:
        raise ValueError(f"{path}: truncated header at byte {len(blob)}")
    header = json.loads(blob[8 : 8 + header_len].decode("utf-8"))
    names = [layer["name"] for layer in header["layers"]]
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: duplicate layer names")
    declared = sum(l["maps"] * l["height"] * l["width"] for l in header["layers"])
    payload = blob[8 + header_len :]
    if len(payload) != 4 * declared:
        raise ValueError(
            f"{path}: payload is {len(payload)} bytes at offset {8 + header_len}, "
            f"expected {4 * declared}"
        )
    layers = {}
    offset = 8 + header_len
    for layer in header["layers"]:
        count = layer["maps"] * layer["height"] * layer["width"]
        flat = np.frombuffer(payload[: 4 * count], dtype="<f4")
        payload = payload[4 * count :]
        bad = ~np.isfinite(flat)
        if bad.any():
            bad_at = offset + 4 * int(np.flatnonzero(bad)[0])
            raise ValueError(f"{path}: NaN or infinite value at byte {bad_at}")
        maps = flat.reshape(layer["maps"], layer["height"], layer["width"]).copy()
        if maps.min() < 0:
            warnings.warn(
                f"{path}: layer {layer['name']!r} has negative values; clamping to 0",
                stacklevel=2,
            )
            np.maximum(maps, 0.0, out=maps)
        expected = EXPECTED_MAP_COUNTS.get(layer["name"])
        if expected is not None and layer["maps"] != expected:
            warnings.warn(
                f"{path}: layer {layer['name']!r} has {layer['maps']} maps, "
                f"reference exporter produces {expected}",
                stacklevel=2,
            )
        layers[layer["name"]] = maps
        offset += 4 * count
    return FeatureStack(
        image_width=header["image_width"], image_height=header["image_height"], layers=layers
    )


def write_map_f32(path, saliency):
    arr = np.asarray(saliency, dtype="<f4")
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", w, h))
        fh.write(np.ascontiguousarray(arr).tobytes())


def read_map_f32(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 8:
        raise ValueError(f"{path}: truncated header")
    w, h = struct.unpack("<II", blob[:8])
    if len(blob) != 8 + 4 * w * h:
        raise ValueError(f"{path}: expected {4 * w * h} payload bytes, got {len(blob) - 8}")
    return np.frombuffer(blob[8:], dtype="<f4").reshape(h, w).astype(np.float64)


def write_map_png(path, saliency):
    """Quantize a [0, 1] map to 16-bit grayscale PNG (round half up)."""
    arr = np.clip(np.asarray(saliency, dtype=np.float64), 0.0, 1.0)
    samples = np.floor(arr * 65535.0 + 0.5).astype(np.uint16)
    PILImage.fromarray(samples).save(path)


def read_map_png(path):
    samples = np.array(PILImage.open(path))
    return samples.astype(np.float64) / 65535.0


def write_map(path, saliency):
    if str(path).endswith(".f32"):
        write_map_f32(path, saliency)
    else:
        write_map_png(path, saliency)


def read_map(path):
    if str(path).endswith(".f32"):
        return read_map_f32(path)
    return read_map_png(path)


def write_image_png(path, image):
    arr = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    PILImage.fromarray(np.floor(arr * 255.0 + 0.5).astype(np.uint8)).save(path)


def read_image(path):
    img = PILImage.open(path).convert("RGB")
    return np.asarray(img, dtype=np.float64) / 255.0


def write_fixations(path, fixations_by_subject, image_id, width, height):
    doc = {
        "image": image_id,
        "width": int(width),
        "height": int(height),
        "subjects": [[[int(x), int(y)] for x, y in subject] for subject in fixations_by_subject],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)


def read_fixations(path):
    """Parse a fixation JSON file into a subject-pooled FixationSet."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    width, height = int(doc["width"]), int(doc["height"])
    points = []
    for si, subject in enumerate(doc["subjects"]):
        for fi, (x, y) in enumerate(subject):
            if not (0 <= x < width and 0 <= y < height):
                raise ValueError(
                    f"{path}: subject {si} fixation {fi} at ({x}, {y}) is outside {width}x{height}"
                )
            points.append((x, y))
    if not points:
        raise ValueError(f"{path}: no fixations")
    return FixationSet(
        image_id=doc["image"], width=width, height=height, points=np.array(points, dtype=np.intp)
    )


# Color ramp for heatmaps: value 0 -> dark blue, 0.35 -> cyan, 0.65 ->
# yellow, 1 -> red; linear in between.
_RAMP_STOPS = np.array([0.0, 0.35, 0.65, 1.0])
_RAMP_COLORS = np.array(
    [
        [0.05, 0.05, 0.40],
        [0.00, 0.75, 0.85],
        [0.95, 0.90, 0.10],
        [0.85, 0.05, 0.05],
    ]
)


def apply_colormap(saliency):
    v = np.clip(np.asarray(saliency, dtype=np.float64), 0.0, 1.0)
    out = np.empty(v.shape + (3,))
    for c in range(3):
        out[:, :, c] = np.interp(v, _RAMP_STOPS, _RAMP_COLORS[:, c])
    return out


def render_heatmap(image, saliency, alpha=0.5, dot_radius=3):
    """Alpha-blend the colormapped saliency over the image and mark the
    maximum with a red dot (raster-order first on ties). The dot follows
    the overlay opacity, so alpha=0 reproduces the image exactly."""
    img = np.asarray(image, dtype=np.float64)
    sal = np.asarray(saliency, dtype=np.float64)
    if img.shape[:2] != sal.shape:
        raise ValueError(f"image {img.shape[:2]} and map {sal.shape} dimensions differ")
    out = (1.0 - alpha) * img + alpha * apply_colormap(sal)
    peak_r, peak_c = np.unravel_index(np.argmax(sal), sal.shape)
    yy, xx = np.ogrid[: sal.shape[0], : sal.shape[1]]
    dot = (yy - peak_r) ** 2 + (xx - peak_c) ** 2 <= dot_radius**2
    out[dot] = (1.0 - alpha) * img[dot] + alpha * np.array([1.0, 0.0, 0.0])
    return np.clip(out, 0.0, 1.0)
