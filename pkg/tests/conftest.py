"""Shared fixtures: a small deterministic corpus and desk-scale checkpoints.

Everything is sized for a single CPU core: 64×64 images, narrow networks.
The corpus is synthetic but structured — stroke-rasterized sketches (with
sidecars) and smooth gradient photos — so training losses actually move.
"""

import os
import sys

import numpy as np
import pytest
import torch
from hypothesis import settings

from sketch2photo.config import TrainingConfig
from sketch2photo.data.dataset import load_dataset
from sketch2photo.data.images import ColorPhoto
from sketch2photo.data.strokes import StrokeSequence, rasterize_strokes

settings.register_profile("desk", max_examples=25, deadline=None)
settings.load_profile("desk")

torch.set_num_threads(1)

CORPUS_SIZE = 64
N_SKETCHES = 8
N_PHOTOS = 8


def make_stroke_sketch(rng: np.random.Generator, size: int, n_strokes: int = 4,
                       pen_width: int = 2) -> StrokeSequence:
    """Random polyline strokes, plus one dense zig-zag so mask crops qualify."""
    strokes = []
    for _ in range(n_strokes - 1):
        pts = [(float(rng.uniform(4, size - 4)), float(rng.uniform(4, size - 4)))
               for _ in range(int(rng.integers(3, 6)))]
        strokes.append(tuple(pts))
    x0 = float(rng.uniform(4, size // 2))
    y0 = float(rng.uniform(4, size // 2))
    zigzag = []
    for k in range(8):
        zigzag.append((x0 + 2.0 * k, y0 + (0.0 if k % 2 == 0 else 10.0)))
    strokes.append(tuple(zigzag))
    return StrokeSequence(tuple(strokes), size, size, pen_width)


def make_photo(rng: np.random.Generator, size: int) -> ColorPhoto:
    """Smooth banded gradient with a bright blob; deterministic per rng state."""
    yy, xx = np.meshgrid(np.linspace(0, 1, size), np.linspace(0, 1, size),
                         indexing="ij")
    channels = []
    for _ in range(3):
        a, b = rng.uniform(1.0, 4.0, size=2)
        phase = rng.uniform(0, np.pi)
        wave = 0.5 + 0.35 * np.sin(2 * np.pi * (a * xx + b * yy) + phase)
        cy, cx = rng.uniform(0.2, 0.8, size=2)
        blob = 0.25 * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / 0.02)
        channels.append(np.clip(wave + blob, 0.02, 0.98))
    return ColorPhoto(np.stack(channels).astype(np.float32))


def write_corpus(root, n_sketches: int = N_SKETCHES, n_photos: int = N_PHOTOS,
                 size: int = CORPUS_SIZE, seed: int = 0,
                 sidecars: bool = True) -> str:
    root = os.fspath(root)
    os.makedirs(os.path.join(root, "sketch"), exist_ok=True)
    os.makedirs(os.path.join(root, "photo"), exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(n_sketches):
        seq = make_stroke_sketch(rng, size)
        rasterize_strokes(seq).save(os.path.join(root, "sketch", f"item{i:02d}.png"))
        if sidecars:
            sidecar = os.path.join(root, "sketch", f"item{i:02d}.strokes.txt")
            with open(sidecar, "w", encoding="utf-8") as fh:
                for si, stroke in enumerate(seq.strokes):
                    for x, y in stroke:
                        fh.write(f"{si} {x:.2f} {y:.2f}\n")
    for i in range(n_photos):
        make_photo(rng, size).save(os.path.join(root, "photo", f"item{i:02d}.png"))
    return root


def desk_config(root: str = "", size: int = CORPUS_SIZE) -> TrainingConfig:
    """Full-scale training defaults shrunk to run quickly on one CPU core."""
    cfg = TrainingConfig()
    cfg.data.root = root
    cfg.data.image_size = size
    cfg.data.patch_size = 24
    cfg.data.mask_crop_size = 16
    cfg.data.mask_density_threshold = 0.05
    cfg.data.mask_pool_size = 32
    for section in (cfg.shape, cfg.content):
        section.base_width = 8
        section.disc_width = 8
        section.disc_layers = 2
        section.residual_blocks = 3
    cfg.content.p_reference = 0.0
    return cfg.validate()


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> str:
    return write_corpus(tmp_path_factory.mktemp("corpus"))


@pytest.fixture(scope="session")
def dataset(corpus_dir):
    return load_dataset(corpus_dir, CORPUS_SIZE)


@pytest.fixture(scope="session")
def desk_checkpoints(tmp_path_factory, dataset):
    """A few optimizer steps per stage, saved — enough for inference plumbing."""
    from sketch2photo.checkpoint import save_checkpoint
    from sketch2photo.content.trainer import ContentTrainer
    from sketch2photo.shape.trainer import ShapeTrainer

    out = tmp_path_factory.mktemp("ckpts")
    cfg = desk_config()
    cfg.shape.epochs = 1
    cfg.content.epochs = 1

    shape_trainer = ShapeTrainer(dataset, cfg)
    shape_trainer.run(max_steps=4)
    shape_path = os.path.join(out, "shape.ckpt")
    save_checkpoint(shape_trainer.make_checkpoint(), shape_path)

    content_trainer = ContentTrainer(dataset, cfg)
    content_trainer.run(max_steps=4)
    content_path = os.path.join(out, "content.ckpt")
    save_checkpoint(content_trainer.make_checkpoint(), content_path)

    return {"shape": shape_path, "content": content_path, "config": cfg}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one verdict line per release criterion after the run."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, status, detail in results:
        line = f"[ACCEPTANCE] {name}: {status}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
