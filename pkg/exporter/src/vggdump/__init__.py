"""Feature-map exporter: VGG-16 post-ReLU activations to SFM1 containers."""

__version__ = "0.1.0"

from .container import write_container
from .exporter import EXPECTED_COUNTS, GROUPS, extract_feature_groups, load_image, load_model

__all__ = [
    "EXPECTED_COUNTS",
    "GROUPS",
    "extract_feature_groups",
    "load_image",
    "load_model",
    "write_container",
]
