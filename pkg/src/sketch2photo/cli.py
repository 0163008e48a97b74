"""Command-line interface.

Every subcommand reads the sectioned config file (``--config`` or the
``SKETCH2PHOTO_CONFIG`` environment variable), applies flag overrides on top,
and writes its outputs under ``--out`` together with the fully resolved
config, so a run can always be re-created from its output directory alone.

``synthesize`` and ``photo2sketch`` run either locally from checkpoint files
or as thin clients of a running service (``--server URL``). Training commands
are exclusive per output directory, enforced with a lockfile.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import contextlib
import logging
import os
import sys

from .config import ENV_CONFIG_VAR, TrainingConfig, load_config
from .errors import ConfigurationError, DataError, Sketch2PhotoError

logger = logging.getLogger(__name__)

LOCKFILE_NAME = ".lock"
SHAPE_CHECKPOINT_NAME = "shape.ckpt"
CONTENT_CHECKPOINT_NAME = "content.ckpt"
MASK_POOL_NAME = "noise_masks.npz"

_IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")


# --------------------------------------------------------------------- helpers

@contextlib.contextmanager
def _exclusive_lock(out_dir: str):
    """Single-instance guard: training owns its output directory exclusively."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, LOCKFILE_NAME)
    try:
        fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ConfigurationError(
            f"lockfile {path} exists: another training run owns this "
            "directory (remove the file if that run is dead)") from None
    try:
        os.write(fd, f"{os.getpid()}\n".encode("ascii"))
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(OSError):
            os.unlink(path)


def _image_paths(directory: str) -> list[str]:
    if not os.path.isdir(directory):
        raise DataError(f"not a directory: {directory}")
    paths = sorted(
        os.path.join(directory, name) for name in os.listdir(directory)
        if os.path.splitext(name)[1].lower() in _IMAGE_EXTENSIONS)
    if not paths:
        raise DataError(f"no images found in {directory}")
    return paths


def _load_color_dir(directory: str, image_size: int | None) -> list:
    from .data.images import ColorPhoto
    return [ColorPhoto.from_file(p, image_size) for p in _image_paths(directory)]


def _write_report(path: str | None, values: dict) -> None:
    lines = [f"{key} = {value}" for key, value in values.items()]
    for line in lines:
        print(line)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _apply_overrides(config: TrainingConfig, args: argparse.Namespace) -> TrainingConfig:
    """Copy CLI flag values over their config fields (flags beat the file)."""
    mapping = {
        "data_root": ("data", "root"),
        "image_size": ("data", "image_size"),
        "seed": ("data", "seed"),
        "epochs": (None, "epochs"),
        "base_width": (None, "base_width"),
        "residual_blocks": (None, "residual_blocks"),
        "style_weights": ("content", "style_extractor_weights"),
        "extractor": ("eval", "extractor"),
        "metric": ("eval", "lpips_metric"),
        "host": ("serve", "host"),
        "port": ("serve", "port"),
        "shape_checkpoint": ("serve", "shape_checkpoint"),
        "content_checkpoint": ("serve", "content_checkpoint"),
        "gallery_dir": ("serve", "gallery_dir"),
    }
    stage = {"train-shape": "shape", "train-content": "content"}.get(args.command)
    for flag, (section, field) in mapping.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if section is None:
            section = stage
        if section is None:
            continue
        setattr(getattr(config, section), field, value)
    return config.validate()


def _build_eval_extractor(config: TrainingConfig, weights_field: str = "inception_weights"):
    from .metrics.extractors import (StubPixelExtractor,
                                     inception_pool3_extractor,
                                     resnet18_extractor)
    name = config.eval.extractor
    if name == "stub":
        return StubPixelExtractor(config.eval.stub_dim)
    if name == "inception":
        return inception_pool3_extractor(config.eval.inception_weights)
    if name == "resnet18":
        return resnet18_extractor(getattr(config.eval, weights_field))
    raise ConfigurationError(
        f"unknown eval.extractor {name!r} (expected stub, inception or resnet18)")


def _local_engine(args: argparse.Namespace):
    from .synthesis import SynthesisEngine
    if not args.shape_checkpoint:
        raise ConfigurationError(
            "--shape-checkpoint is required when not using --server")
    return SynthesisEngine(args.shape_checkpoint,
                           getattr(args, "content_checkpoint", None) or None)


# ----------------------------------------------------------------- subcommands

def _cmd_prepare_data(args: argparse.Namespace, config: TrainingConfig) -> int:
    from .data.dataset import load_dataset
    from .data.noise import build_noise_mask_pool

    dataset = load_dataset(config.data.root, config.data.image_size,
                           pen_width=config.data.pen_width)
    pool = build_noise_mask_pool(
        dataset.sketches,
        crop_size=config.data.mask_crop_size,
        density_threshold=config.data.mask_density_threshold,
        pool_size=config.data.mask_pool_size,
        seed=config.seed)
    os.makedirs(args.out, exist_ok=True)
    pool_path = os.path.join(args.out, MASK_POOL_NAME)
    pool.save(pool_path)
    config.write_resolved(args.out)
    _write_report(None, {
        "sketches": dataset.n_sketches,
        "photos": dataset.n_photos,
        "noise_masks": len(pool.masks),
        "pool_complete": pool.complete,
        "pool_path": pool_path,
    })
    return 0


def _cmd_train_shape(args: argparse.Namespace, config: TrainingConfig) -> int:
    from .checkpoint import save_checkpoint
    from .data.dataset import load_dataset
    from .data.noise import NoiseMaskPool
    from .shape.trainer import ShapeTrainer

    dataset = load_dataset(config.data.root, config.data.image_size,
                           pen_width=config.data.pen_width)
    pool = NoiseMaskPool.load(args.pool) if args.pool else None
    with _exclusive_lock(args.out):
        config.write_resolved(args.out)
        trainer = ShapeTrainer(dataset, config, pool=pool)
        reports = trainer.run(out_dir=args.out, max_steps=args.max_steps)
        ckpt_path = os.path.join(args.out, SHAPE_CHECKPOINT_NAME)
        save_checkpoint(trainer.make_checkpoint(), ckpt_path)
    _write_report(None, {
        "steps": len(reports),
        "final_total_loss": reports[-1].total if reports else float("nan"),
        "checkpoint": ckpt_path,
    })
    return 0


def _cmd_train_content(args: argparse.Namespace, config: TrainingConfig) -> int:
    from .checkpoint import save_checkpoint
    from .content.trainer import ContentTrainer
    from .data.dataset import load_dataset

    dataset = load_dataset(config.data.root, config.data.image_size,
                           pen_width=config.data.pen_width)
    with _exclusive_lock(args.out):
        config.write_resolved(args.out)
        trainer = ContentTrainer(dataset, config)
        reports = trainer.run(out_dir=args.out, max_steps=args.max_steps)
        ckpt_path = os.path.join(args.out, CONTENT_CHECKPOINT_NAME)
        save_checkpoint(trainer.make_checkpoint(), ckpt_path)
    _write_report(None, {
        "steps": len(reports),
        "final_total_loss": reports[-1].total if reports else float("nan"),
        "checkpoint": ckpt_path,
    })
    return 0


def _cmd_synthesize(args: argparse.Namespace, config: TrainingConfig) -> int:
    os.makedirs(args.out, exist_ok=True)
    gray_path = os.path.join(args.out, "gray.png")
    color_path = os.path.join(args.out, "color.png")

    if args.server:
        from .client import ServiceClient, save_png
        with ServiceClient(args.server) as client:
            result = client.synthesize(args.sketch, reference_path=args.ref,
                                       reference_id=args.reference_id)
        save_png(result.grayscale_png, gray_path)
        save_png(result.color_png, color_path)
        version = result.model_version
    else:
        if args.reference_id:
            raise ConfigurationError("--reference-id needs --server (the "
                                     "gallery lives on the service)")
        from .data.images import ColorPhoto, SketchImage
        engine = _local_engine(args)
        sketch = SketchImage.from_file(args.sketch, engine.image_size)
        reference = (ColorPhoto.from_file(args.ref, engine.image_size)
                     if args.ref else None)
        gray, color = engine.synthesize(sketch, reference)
        gray.save(gray_path)
        color.save(color_path)
        version = engine.model_version

    _write_report(None, {
        "grayscale": gray_path,
        "color": color_path,
        "model_version": version,
    })
    return 0


def _cmd_photo2sketch(args: argparse.Namespace, config: TrainingConfig) -> int:
    os.makedirs(args.out, exist_ok=True)
    sketch_path = os.path.join(args.out, "sketch.png")

    if args.server:
        from .client import ServiceClient, save_png
        with ServiceClient(args.server) as client:
            result = client.photo_to_sketch(args.photo)
        save_png(result.color_png, sketch_path)
        version = result.model_version
    else:
        from .data.images import ColorPhoto
        engine = _local_engine(args)
        photo = ColorPhoto.from_file(args.photo, engine.image_size)
        engine.photo_to_sketch(photo).save(sketch_path)
        version = engine.model_version

    _write_report(None, {"sketch": sketch_path, "model_version": version})
    return 0


def _cmd_eval_fid(args: argparse.Namespace, config: TrainingConfig) -> int:
    from .metrics.fid import compute_fid

    extractor = _build_eval_extractor(config)
    real = _load_color_dir(args.real, config.data.image_size)
    fake = _load_color_dir(args.fake, config.data.image_size)
    value = compute_fid(real, fake, extractor)
    report_path = os.path.join(args.out, "fid_report.txt") if args.out else None
    if args.out:
        config.write_resolved(args.out)
    _write_report(report_path, {
        "fid": value,
        "extractor": extractor.identifier,
        "n_real": len(real),
        "n_fake": len(fake),
    })
    return 0


def _cmd_eval_lpips(args: argparse.Namespace, config: TrainingConfig) -> int:
    from .metrics.diversity import DIVERSITY_METRICS, lpips_diversity

    metric_name = config.eval.lpips_metric
    if metric_name not in DIVERSITY_METRICS:
        raise ConfigurationError(
            f"unknown eval.lpips_metric {metric_name!r} "
            f"(expected one of {sorted(DIVERSITY_METRICS)})")
    outputs = _load_color_dir(args.outputs, config.data.image_size)
    value = lpips_diversity(outputs, DIVERSITY_METRICS[metric_name])
    report_path = os.path.join(args.out, "lpips_report.txt") if args.out else None
    if args.out:
        config.write_resolved(args.out)
    _write_report(report_path, {
        "lpips_diversity": value,
        "metric": metric_name,
        "n_outputs": len(outputs),
    })
    return 0


def _cmd_retrieve(args: argparse.Namespace, config: TrainingConfig) -> int:
    from .data.images import ColorPhoto, SketchImage, to_grayscale
    from .metrics.retrieval import retrieve

    size = config.data.image_size
    query_paths = _image_paths(args.queries)
    gallery_paths = _image_paths(args.gallery)

    def stem(path: str) -> str:
        return os.path.splitext(os.path.basename(path))[0]

    translate = None
    if args.direction == "sketch2photo":
        queries = [(stem(p), SketchImage.from_file(p, size)) for p in query_paths]
        gallery = [(stem(p), ColorPhoto.from_file(p, size)) for p in gallery_paths]
        if args.shape_checkpoint:
            engine = _local_engine(args)
            translate = engine.translate_to_grayscale
    else:
        queries = [(stem(p), ColorPhoto.from_file(p, size)) for p in query_paths]
        gallery = [(stem(p), SketchImage.from_file(p, size)) for p in gallery_paths]
        if args.shape_checkpoint:
            engine = _local_engine(args)
            translate = engine.photo_to_sketch

    extractor = _build_eval_extractor(config, weights_field="retrieval_sketch_weights")
    gallery_extractor = None
    if (config.eval.extractor == "resnet18"
            and config.eval.retrieval_photo_weights
            and config.eval.retrieval_photo_weights != config.eval.retrieval_sketch_weights):
        from .metrics.extractors import resnet18_extractor
        gallery_extractor = resnet18_extractor(config.eval.retrieval_photo_weights)

    result = retrieve(queries, gallery, extractor,
                      k_list=config.eval.parsed_k_list(),
                      translate=translate,
                      gallery_extractor=gallery_extractor)
    report_path = os.path.join(args.out, "retrieval_report.txt") if args.out else None
    if args.out:
        config.write_resolved(args.out)
    values = {"direction": args.direction,
              "n_queries": len(queries),
              "n_gallery": len(gallery),
              "extractor": extractor.identifier}
    for k, acc in sorted(result.accuracy.items()):
        values[f"top{k}_accuracy"] = acc
    _write_report(report_path, values)
    return 0


def _cmd_serve(args: argparse.Namespace, config: TrainingConfig) -> int:
    from .service.app import serve
    serve(config)
    return 0


# ----------------------------------------------------------------- arg parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketch2photo",
        description="Unsupervised sketch-to-photo synthesis: training, "
                    "inference, evaluation and serving.")
    parser.add_argument("--config", default=None,
                        help=f"config file (default: ${ENV_CONFIG_VAR} if set)")
    parser.add_argument("--verbose", action="store_true",
                        help="debug-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("prepare-data", _cmd_prepare_data,
            "scan the sketch corpus and build the noise-mask pool")
    p.add_argument("--data-root", help="dataset root with sketch/ and photo/")
    p.add_argument("--image-size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output directory")

    for name, handler, help_text in (
            ("train-shape", _cmd_train_shape,
             "train the sketch-to-grayscale translation stage"),
            ("train-content", _cmd_train_content,
             "train the grayscale-to-color enrichment stage")):
        p = add(name, handler, help_text)
        p.add_argument("--data-root")
        p.add_argument("--image-size", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--epochs", type=int)
        p.add_argument("--base-width", type=int)
        p.add_argument("--residual-blocks", type=int)
        p.add_argument("--max-steps", type=int, default=None,
                       help="stop after this many optimizer steps (smoke runs)")
        p.add_argument("--out", required=True, help="output directory")
        if name == "train-shape":
            p.add_argument("--pool", help="pre-built noise-mask pool (.npz)")
        else:
            p.add_argument("--style-weights",
                           help="local VGG-19 state dict for the style loss")

    p = add("synthesize", _cmd_synthesize,
            "sketch -> grayscale + color photo")
    p.add_argument("--sketch", required=True, help="input sketch PNG")
    p.add_argument("--ref", default=None, help="reference photo PNG")
    p.add_argument("--reference-id", default=None,
                   help="gallery reference id (server mode)")
    p.add_argument("--shape-checkpoint")
    p.add_argument("--content-checkpoint")
    p.add_argument("--server", default=None,
                   help="run against a service URL instead of local checkpoints")
    p.add_argument("--out", default=".", help="output directory")

    p = add("photo2sketch", _cmd_photo2sketch, "photo -> sketch")
    p.add_argument("--photo", required=True, help="input photo PNG")
    p.add_argument("--shape-checkpoint")
    p.add_argument("--server", default=None)
    p.add_argument("--out", default=".", help="output directory")

    p = add("eval-fid", _cmd_eval_fid,
            "Frechet distance between two image directories")
    p.add_argument("--real", required=True, help="directory of real photos")
    p.add_argument("--fake", required=True, help="directory of generated photos")
    p.add_argument("--extractor", choices=("stub", "inception", "resnet18"))
    p.add_argument("--out", default=None, help="report directory")

    p = add("eval-lpips", _cmd_eval_lpips,
            "pairwise diversity of generated outputs")
    p.add_argument("--outputs", required=True, help="directory of generated photos")
    p.add_argument("--metric", choices=("l1", "gray-l1"))
    p.add_argument("--out", default=None, help="report directory")

    p = add("retrieve", _cmd_retrieve,
            "cross-domain retrieval: rank a gallery for each query")
    p.add_argument("--queries", required=True, help="query image directory")
    p.add_argument("--gallery", required=True, help="gallery image directory")
    p.add_argument("--direction", choices=("sketch2photo", "photo2sketch"),
                   default="sketch2photo")
    p.add_argument("--shape-checkpoint", default=None,
                   help="translate queries through the trained model first")
    p.add_argument("--extractor", choices=("stub", "inception", "resnet18"))
    p.add_argument("--out", default=None, help="report directory")

    p = add("serve", _cmd_serve, "run the HTTP inference service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--shape-checkpoint")
    p.add_argument("--content-checkpoint")
    p.add_argument("--gallery-dir")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        # httpx logs every request at INFO, which drowns the command output.
        logging.getLogger("httpx").setLevel(logging.WARNING)
    try:
        config = _apply_overrides(load_config(args.config), args)
        return args.handler(args, config)
    except Sketch2PhotoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
