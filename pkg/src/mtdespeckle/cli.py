"""Command-line entry point: ``mtdespeckle <subcommand> ...``.

Exit codes
----------
0  success
2  usage error (unknown flag, missing argument)
3  missing input file
4  malformed file (raster, model or manifest)
5  incompatible image dimensions
6  invalid configuration value
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .denoise.baseline import BoxDenoiser, downsample2
from .denoise.network import load_model, save_model
from .denoise.training import TrainConfig, train_self_supervised
from .errors import ConfigurationError, DimensionError, FormatError
from .metrics import evaluate
from .ratio import despeckle_ratio, despeckle_single
from .scene import reference_scene_description, render_scene, scene_changes
from .speckle import check_same_shape
from .stack import build_super_image, simulate_stack

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_FORMAT = 4
EXIT_DIMENSION = 5
EXIT_CONFIG = 6


def _rect(values):
    return tuple(int(x) for x in values) if values else None


def _load_scene(spec: str, size: int) -> dict:
    if spec == "reference":
        return reference_scene_description(size)
    path = Path(spec)
    if not path.exists():
        raise FileNotFoundError(f"scene file {spec} not found")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{spec}: {exc}") from None


def cmd_simulate(args) -> int:
    desc = _load_scene(args.scene, args.size)
    v = render_scene(desc)
    stack = simulate_stack(v, args.frames, args.looks, scene_changes(desc),
                           args.kernel_radius, args.seed)
    out = Path(args.out)
    region = _rect(desc.get("homogeneous_region"))
    manifest = io.save_stack(out, stack, stack_id=out.name, homogeneous_region=region)
    io.write_raster(out / "truth.rdim", v)
    print(manifest)
    return EXIT_OK


def cmd_superimage(args) -> int:
    manifest = io.load_manifest(args.stack)
    stack = io.load_stack(manifest)
    region = _rect(args.region) or manifest.homogeneous_region
    smooth = BoxDenoiser(args.smooth) if args.smooth else None
    s = build_super_image(stack, smooth, region)
    io.write_raster(args.out, s.data)
    print(f"enl={s.enl:.6g}")
    return EXIT_OK


def _denoiser(spec: str, radius: int):
    if spec == "baseline":
        return BoxDenoiser(radius)
    if spec.startswith("model:"):
        return load_model(spec[len("model:"):])
    raise ConfigurationError(f"unknown denoiser {spec!r} (use 'baseline' or 'model:<path>')")


def cmd_despeckle(args) -> int:
    w = io.read_raster(args.input)
    d = _denoiser(args.denoiser, args.radius)
    s = io.read_raster(args.super) if args.super else None
    if s is not None:
        check_same_shape(w, s)
    if args.downsample2:
        w = downsample2(w)
        s = downsample2(s) if s is not None else None
    if s is None:
        out = despeckle_single(w, d, args.looks)
    else:
        out = despeckle_ratio(w, s, d, args.looks)
    io.write_raster(args.out, out)
    return EXIT_OK


def cmd_train(args) -> int:
    stack = io.load_stack(io.load_manifest(args.stack))
    cfg = TrainConfig(epochs=args.epochs, seed=args.seed, batch_size=args.batch_size,
                      patch_size=args.patch_size, learning_rate=args.learning_rate,
                      batches_per_epoch=args.batches_per_epoch, channels=args.channels,
                      layers=args.layers, validation_fraction=args.validation_fraction)
    model = train_self_supervised(stack, cfg)
    save_model(model, args.out)
    val = model.meta["val_loss"]
    if val:
        print(f"val_loss_initial={val[0]:.6g}\nval_loss_final={val[-1]:.6g}")
    return EXIT_OK


def cmd_eval(args) -> int:
    est = io.read_raster(args.estimate)
    truth = io.read_raster(args.truth)
    noisy = io.read_raster(args.noisy) if args.noisy else None
    report = evaluate(est, truth, noisy, _rect(args.region))
    text = report.to_text()
    Path(args.report).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_preview(args) -> int:
    io.export_preview(io.read_raster(args.input), args.out, args.gamma)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mtdespeckle",
                                description="Ratio-based multi-temporal SAR despeckling.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate a speckled stack from a scene")
    s.add_argument("--scene", default="reference", help="'reference' or a JSON scene file")
    s.add_argument("--size", type=int, default=128, help="size of the reference scene")
    s.add_argument("--frames", type=int, default=25)
    s.add_argument("--looks", type=float, default=1.0)
    s.add_argument("--kernel-radius", type=int, default=0, help="speckle correlation radius")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("superimage", help="temporal mean of a stack")
    s.add_argument("--stack", required=True)
    s.add_argument("--smooth", type=int, default=0, help="box smoothing radius (0 = none)")
    s.add_argument("--region", type=int, nargs=4, metavar=("R0", "C0", "R1", "C1"))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_superimage)

    s = sub.add_parser("despeckle", help="restore one image")
    s.add_argument("--input", required=True)
    s.add_argument("--denoiser", default="baseline", help="'baseline' or 'model:<path>'")
    s.add_argument("--radius", type=int, default=3, help="baseline window radius")
    s.add_argument("--super", help="super-image raster; enables ratio despeckling")
    s.add_argument("--downsample2", action="store_true")
    s.add_argument("--looks", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_despeckle)

    s = sub.add_parser("train", help="self-supervised training on a stack")
    s.add_argument("--stack", required=True)
    s.add_argument("--epochs", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--batch-size", type=int, default=8)
    s.add_argument("--patch-size", type=int, default=32)
    s.add_argument("--learning-rate", type=float, default=1e-3)
    s.add_argument("--batches-per-epoch", type=int, default=32)
    s.add_argument("--channels", type=int, default=32)
    s.add_argument("--layers", type=int, default=5)
    s.add_argument("--validation-fraction", type=float, default=0.25)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="log-domain metrics against a reference")
    s.add_argument("--estimate", required=True)
    s.add_argument("--truth", required=True)
    s.add_argument("--noisy")
    s.add_argument("--region", type=int, nargs=4, metavar=("R0", "C0", "R1", "C1"))
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("preview", help="8-bit PGM amplitude preview")
    s.add_argument("--input", required=True)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_preview)
    return p


def cli_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        code, msg = EXIT_MISSING, exc
    except FormatError as exc:
        code, msg = EXIT_FORMAT, exc
    except DimensionError as exc:
        code, msg = EXIT_DIMENSION, exc
    except (ConfigurationError, ValueError, IndexError) as exc:
        code, msg = EXIT_CONFIG, exc
    print(f"mtdespeckle {args.command}: error: {msg}", file=sys.stderr)
    print(parser.format_usage().rstrip(), file=sys.stderr)
    return code


def main():
    sys.exit(cli_dispatch())
