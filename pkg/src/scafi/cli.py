"""Command-line front end.

Subcommands: cas, sas, scafi, mn, eval, fixtures. Every output map gets a
sidecar JSON (same path + ".json") echoing the command, configuration and
seed, so results are reproducible from their metadata alone.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

import argparse
import glob
import json
import os
import sys

import numpy as np
import PIL
import scipy

from . import __version__
from .cas import CasConfig, cas_saliency
from .core import resize_bilinear
from .evaluation import SaucConfig, dataset_eval
from .fixtures import generate_all
from .formats import (
    read_fixations,
    read_image,
    read_map,
    read_sfm1,
    render_heatmap,
    write_image_png,
    write_map,
)
from .fusion import MnConfig, fuse, maxima_normalize
from .sas import sas_saliency

DEFAULT_SEED = 42


class UsageError(Exception):
    pass


def _versions():
    return {
        "scafi": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pillow": PIL.__version__,
    }


def _write_output(path, saliency, meta):
    write_map(path, saliency)
    meta = dict(meta)
    meta["versions"] = _versions()
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)


def _require(path, what):
    if not os.path.exists(path):
        raise UsageError(f"{what} not found: {path}")


def _cas_config(args):
    return CasConfig(
        scales=tuple(args.scales),
        rng_seed=args.seed,
        max_ica_iterations=args.ica_iterations,
        training_patch_cap=args.patch_cap,
    )


def cmd_cas(args):
    _require(args.image, "image")
    image = read_image(args.image)
    cfg = _cas_config(args)
    saliency = cas_saliency(image, cfg)
    meta = {
        "command": "cas",
        "image": args.image,
        "seed": args.seed,
        "config": {
            "scales": list(cfg.scales),
            "max_ica_iterations": cfg.max_ica_iterations,
            "training_patch_cap": cfg.training_patch_cap,
            "working_max_width": cfg.working_max_width,
        },
    }
    _write_output(args.out, saliency, meta)
    if args.heatmap:
        write_image_png(args.heatmap, render_heatmap(image, saliency, alpha=args.alpha))
    return 0


def cmd_sas(args):
    _require(args.features, "features")
    stack = read_sfm1(args.features)
    saliency = sas_saliency(stack, weights=args.weights, mode=args.eq3)
    meta = {
        "command": "sas",
        "features": args.features,
        "weights": args.weights,
        "eq3": args.eq3,
    }
    _write_output(args.out, saliency, meta)
    return 0


def cmd_scafi(args):
    _require(args.image, "image")
    _require(args.features, "features")
    image = read_image(args.image)
    stack = read_sfm1(args.features)
    cfg = _cas_config(args)
    cas_map = cas_saliency(image, cfg)
    sas_map = sas_saliency(stack, weights=args.weights, mode=args.eq3)
    h, w = image.shape[:2]
    if sas_map.shape != (h, w):
        sas_map = resize_bilinear(sas_map, w, h)
    if cas_map.shape != (h, w):
        cas_map = resize_bilinear(cas_map, w, h)
    saliency = fuse(sas_map, cas_map, strategy=args.fusion, cfg=MnConfig(args.thresh))
    meta = {
        "command": "scafi",
        "image": args.image,
        "features": args.features,
        "weights": args.weights,
        "eq3": args.eq3,
        "fusion": args.fusion,
        "mn_threshold": args.thresh,
        "seed": args.seed,
        "config": {"scales": list(cfg.scales), "max_ica_iterations": cfg.max_ica_iterations,
                   "training_patch_cap": cfg.training_patch_cap},
    }
    _write_output(args.out, saliency, meta)
    if args.heatmap:
        write_image_png(args.heatmap, render_heatmap(image, saliency, alpha=args.alpha))
    return 0


def cmd_mn(args):
    _require(args.map, "map")
    saliency = read_map(args.map)
    out = maxima_normalize(saliency, MnConfig(args.thresh))
    _write_output(args.out, out, {"command": "mn", "map": args.map, "thresh": args.thresh})
    return 0


def cmd_eval(args):
    _require(args.dataset, "dataset")
    _require(args.maps, "maps")
    fixation_files = sorted(glob.glob(os.path.join(args.dataset, "*.json")))
    if not fixation_files:
        raise UsageError(f"no fixation files in {args.dataset}")
    entries = []
    skipped = []
    for path in fixation_files:
        fx = read_fixations(path)
        map_path = None
        for ext in (".f32", ".png"):
            candidate = os.path.join(args.maps, fx.image_id + ext)
            if os.path.exists(candidate):
                map_path = candidate
                break
        if map_path is None:
            skipped.append(fx.image_id)
            print(f"warning: no map for {fx.image_id}, skipping", file=sys.stderr)
            continue
        saliency = read_map(map_path)
        if saliency.shape != (fx.height, fx.width):
            saliency = resize_bilinear(saliency, fx.width, fx.height)
        entries.append((fx.image_id, saliency, fx))
    if not entries:
        raise ValueError("all images were skipped; nothing to evaluate")
    sigmas = [float(s) for s in args.sigmas.split(",")] if args.sigmas else None
    report = dataset_eval(entries, sigmas, SaucConfig(repetitions=args.reps, rng_seed=args.seed))
    report["skipped"] = skipped
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
    print(f"best mean sAUC {report['best_score']:.4f} at sigma {report['best_sigma']:.2f}")
    return 0


def cmd_fixtures(args):
    generate_all(args.out, seed=args.seed)
    print(f"fixtures written to {args.out}")
    return 0


def _add_cas_flags(p):
    p.add_argument("--scales", type=int, nargs="+", default=[1, 3, 5, 7])
    p.add_argument("--ica-iterations", type=int, default=200)
    p.add_argument("--patch-cap", type=int, default=20000)


def _add_sas_flags(p):
    p.add_argument("--weights", choices=["w1", "w2", "w3", "w4", "w5", "all"], default="w5")
    p.add_argument("--eq3", choices=["standard", "literal"], default="standard")


def build_parser():
    parser = argparse.ArgumentParser(prog="scafi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cas", help="contrast-aware saliency of an image")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.add_argument("--heatmap")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_cas_flags(p)
    p.set_defaults(func=cmd_cas)

    p = sub.add_parser("sas", help="semantic saliency from a feature container")
    p.add_argument("features")
    p.add_argument("--out", required=True)
    _add_sas_flags(p)
    p.set_defaults(func=cmd_sas)

    p = sub.add_parser("scafi", help="both pathways fused")
    p.add_argument("image")
    p.add_argument("features")
    p.add_argument("--out", required=True)
    p.add_argument("--heatmap")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--fusion", choices=["mn", "ap", "mp"], default="mn")
    p.add_argument("--thresh", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_cas_flags(p)
    _add_sas_flags(p)
    p.set_defaults(func=cmd_scafi)

    p = sub.add_parser("mn", help="maxima-normalize a stored map")
    p.add_argument("map")
    p.add_argument("--out", required=True)
    p.add_argument("--thresh", type=float, default=0.1)
    p.set_defaults(func=cmd_mn)

    p = sub.add_parser("eval", help="shuffled-AUC evaluation with blur sweep")
    p.add_argument("--dataset", required=True, help="directory of fixation JSON files")
    p.add_argument("--maps", required=True, help="directory of predicted maps (.f32/.png)")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--sigmas", help="comma-separated blur sigmas as fractions of width")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fixtures", help="generate synthetic test fixtures")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
