"""CLI: export feature maps from an image into an SFM1 container.

    scafi-export --image photo.jpg --out photo.sfm [--groups conv5 ...]
"""

import argparse
import os
import sys

from .container import write_container
from .exporter import GROUPS, WeightsUnavailable, extract_feature_groups, load_image, load_model


def build_parser():
    parser = argparse.ArgumentParser(prog="scafi-export", description=__doc__.splitlines()[0])
    parser.add_argument("--image", required=True, help="input image path")
    parser.add_argument("--out", required=True, help="output .sfm path")
    parser.add_argument("--groups", nargs="+", choices=list(GROUPS), default=list(GROUPS),
                        help="stages to export (default: all)")
    parser.add_argument("--weights", help="local VGG-16 state dict (.pth)")
    parser.add_argument("--random-init", action="store_true",
                        help="seeded untrained network; for structural tests only")
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    if not os.path.exists(args.image):
        print(f"error: image not found: {args.image}", file=sys.stderr)
        return 2
    if args.weights is not None and not os.path.exists(args.weights):
        print(
            f"error: weights file not found: {args.weights}\n"
            "download https://download.pytorch.org/models/vgg16-397923af.pth "
            "and pass its path via --weights",
            file=sys.stderr,
        )
        return 2
    try:
        model = load_model(weights_path=args.weights, random_init=args.random_init)
    except WeightsUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    tensor, width, height = load_image(args.image)
    groups = extract_feature_groups(model, tensor, groups=tuple(args.groups))
    write_container(args.out, width, height, groups)
    total = sum(a.shape[0] for a in groups.values())
    print(f"wrote {args.out}: {len(groups)} groups, {total} maps, source {width}x{height}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
