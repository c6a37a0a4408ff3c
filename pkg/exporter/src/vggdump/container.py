"""SFM1 container writer.

Byte layout (little-endian): magic "SFM1", uint32 header length, UTF-8
JSON header {"image_width", "image_height", "layers": [{"name", "maps",
"height", "width"}, ...]}, then per layer in declared order the float32
payload, map-major then row-major. This layout is shared with the
saliency toolchain that consumes these containers.
"""

import json
import struct

import numpy as np

MAGIC = b"SFM1"


def write_container(path, image_width, image_height, groups):
    """``groups`` is an ordered {name: (maps, h, w) float array} mapping."""
    layers = [
        {"name": name, "maps": int(a.shape[0]), "height": int(a.shape[1]), "width": int(a.shape[2])}
        for name, a in groups.items()
    ]
    header = json.dumps(
        {"image_width": int(image_width), "image_height": int(image_height), "layers": layers},
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for a in groups.values():
            fh.write(np.ascontiguousarray(a, dtype="<f4").tobytes())
