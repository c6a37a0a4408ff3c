"""Run VGG-16 on an image and capture every post-ReLU convolutional map.

The forward pass happens at 224x224 with the standard ImageNet
preprocessing (RGB in [0,1], per-channel mean/std normalization). Feature
maps are grouped by stage:

    stage   ReLU indices   maps        native size
    conv1   1, 3           2 x 64      224 x 224
    conv2   6, 8           2 x 128     112 x 112
    conv3   11, 13, 15     3 x 256     56 x 56
    conv4   18, 20, 22     3 x 512     28 x 28
    conv5   25, 27, 29     3 x 512     14 x 14

The container header records the *original* image dimensions so consumers
can rescale maps back to the input resolution.
"""

import numpy as np
import torch
from PIL import Image
from torchvision.models import vgg16

GROUPS = ("conv1", "conv2", "conv3", "conv4", "conv5")

RELU_INDICES = {
    "conv1": (1, 3),
    "conv2": (6, 8),
    "conv3": (11, 13, 15),
    "conv4": (18, 20, 22),
    "conv5": (25, 27, 29),
}

EXPECTED_COUNTS = {"conv1": 128, "conv2": 256, "conv3": 768, "conv4": 1536, "conv5": 1536}

INPUT_SIZE = 224
MEAN = (0.485, 0.456, 0.406)
STD = (0.229, 0.224, 0.225)

WEIGHTS_URL = "https://download.pytorch.org/models/vgg16-397923af.pth"


class WeightsUnavailable(RuntimeError):
    pass


def load_model(weights_path=None, random_init=False):
    """Build VGG-16 in eval mode.

    ``weights_path`` loads a local state dict; ``random_init`` builds a
    seeded untrained network (container structure is identical, activations
    are meaningless); otherwise the torchvision pretrained weights are
    loaded from its cache or downloaded.
    """
    if random_init:
        torch.manual_seed(0)
        model = vgg16(weights=None)
    elif weights_path is not None:
        model = vgg16(weights=None)
        try:
            state = torch.load(weights_path, map_location="cpu", weights_only=True)
        except (OSError, RuntimeError) as exc:
            raise WeightsUnavailable(f"cannot load weights from {weights_path}: {exc}") from exc
        model.load_state_dict(state)
    else:
        try:
            from torchvision.models import VGG16_Weights

            model = vgg16(weights=VGG16_Weights.IMAGENET1K_V1)
        except Exception as exc:
            raise WeightsUnavailable(
                "pretrained weights are not available locally and could not be "
                f"downloaded ({exc}); fetch {WEIGHTS_URL} on a connected machine "
                "and pass it via --weights"
            ) from exc
    model.eval()
    return model


def load_image(path):
    """Returns (tensor ready for the network, original width, original height)."""
    img = Image.open(path).convert("RGB")
    width, height = img.size
    resized = img.resize((INPUT_SIZE, INPUT_SIZE), Image.BILINEAR)
    arr = np.asarray(resized, dtype=np.float32) / 255.0
    arr = (arr - np.array(MEAN, dtype=np.float32)) / np.array(STD, dtype=np.float32)
    tensor = torch.from_numpy(arr.transpose(2, 0, 1)).unsqueeze(0)
    return tensor, width, height


def extract_feature_groups(model, tensor, groups=GROUPS):
    """Forward pass collecting post-ReLU activations, stacked per group.

    Returns {group: float32 array (maps, h, w)} in declared group order.
    """
    wanted = set()
    for g in groups:
        if g not in RELU_INDICES:
            raise ValueError(f"unknown group {g!r}")
        wanted.update(RELU_INDICES[g])
    captured = {}
    x = tensor
    with torch.no_grad():
        for idx, layer in enumerate(model.features):
            x = layer(x)
            if idx in wanted:
                captured[idx] = x.squeeze(0).numpy().astype(np.float32)
            if idx >= max(wanted):
                break
    out = {}
    for g in GROUPS:
        if g in groups:
            out[g] = np.concatenate([captured[i] for i in RELU_INDICES[g]], axis=0)
    return out
