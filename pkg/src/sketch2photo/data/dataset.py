"""Unpaired sketch/photo corpus loading.

Layout on disk::

    root/
      sketch/  *.png   (+ optional <stem>.strokes.txt sidecars)
      photo/   *.png

Sketches and photos are deliberately unpaired: nothing here records any
correspondence between the two lists. Items are ordered lexicographically by
filename so loading is reproducible.
"""

import os
from dataclasses import dataclass

from PIL import Image

from ..errors import ConfigurationError, DataError
from .images import ColorPhoto, SketchImage, to_grayscale
from .strokes import DEFAULT_PEN_WIDTH, StrokeSequence

_IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")

SKETCH_DIR = "sketch"
PHOTO_DIR = "photo"
STROKE_SIDECAR_SUFFIX = ".strokes.txt"


@dataclass(frozen=True)
class UnpairedDataset:
    """Immutable unpaired corpus; grayscale versions are precomputed."""

    sketches: tuple
    photos: tuple
    grayscales: tuple
    sketch_names: tuple
    photo_names: tuple
    sketch_sources: tuple
    photo_sources: tuple
    # Aligned with ``sketches``; ``None`` where the sketch has no sidecar.
    stroke_sequences: tuple = ()
    image_size: int = 128

    def __post_init__(self):
        if len(self.photos) != len(self.grayscales):
            raise ValueError("photos and grayscales must align")
        if len(self.sketches) != len(self.sketch_names):
            raise ValueError("sketches and sketch_names must align")
        if self.stroke_sequences and len(self.stroke_sequences) != len(self.sketches):
            raise ValueError("stroke_sequences and sketches must align")

    @property
    def n_sketches(self) -> int:
        return len(self.sketches)

    @property
    def n_photos(self) -> int:
        return len(self.photos)


def _list_images(directory: str) -> list[str]:
    names = [n for n in os.listdir(directory)
             if n.lower().endswith(_IMAGE_EXTENSIONS)]
    return sorted(names)


def load_dataset(root, image_size: int = 128, source: str | None = None,
                 pen_width: int = DEFAULT_PEN_WIDTH) -> UnpairedDataset:
    """Load ``root/sketch`` and ``root/photo`` at the given square resolution.

    Stroke sidecars (``<stem>.strokes.txt`` next to the sketch) are parsed and
    rescaled to the loaded resolution. Undecodable files abort the load with
    the offending filename rather than being skipped.
    """
    root = os.fspath(root)
    sketch_dir = os.path.join(root, SKETCH_DIR)
    photo_dir = os.path.join(root, PHOTO_DIR)
    for d in (sketch_dir, photo_dir):
        if not os.path.isdir(d):
            raise ConfigurationError(f"dataset directory missing: {d}")
    if image_size <= 0 or image_size % 4 != 0:
        raise ConfigurationError(f"image_size must be a positive multiple of 4, got {image_size}")

    source = source if source is not None else os.path.basename(os.path.normpath(root))

    sketches, sketch_names, stroke_sequences = [], [], []
    for name in _list_images(sketch_dir):
        path = os.path.join(sketch_dir, name)
        # Record the source resolution before resizing so sidecars can be rescaled.
        try:
            with Image.open(path) as probe:
                src_w, src_h = probe.size
        except OSError as exc:
            raise DataError(f"{path}: cannot decode image ({exc})") from exc
        sketches.append(SketchImage.from_file(path, image_size))
        sketch_names.append(name)
        sidecar = os.path.join(sketch_dir, os.path.splitext(name)[0] + STROKE_SIDECAR_SUFFIX)
        if os.path.exists(sidecar):
            seq = StrokeSequence.from_sidecar(sidecar, src_h, src_w, pen_width)
            stroke_sequences.append(seq.scaled(image_size, image_size))
        else:
            stroke_sequences.append(None)

    photos, photo_names = [], []
    for name in _list_images(photo_dir):
        photos.append(ColorPhoto.from_file(os.path.join(photo_dir, name), image_size))
        photo_names.append(name)

    if not sketches:
        raise DataError(f"no sketch images found under {sketch_dir}")
    if not photos:
        raise DataError(f"no photo images found under {photo_dir}")

    grayscales = tuple(to_grayscale(p) for p in photos)
    n_s, n_p = len(sketches), len(photos)
    return UnpairedDataset(
        sketches=tuple(sketches),
        photos=tuple(photos),
        grayscales=grayscales,
        sketch_names=tuple(sketch_names),
        photo_names=tuple(photo_names),
        sketch_sources=(source,) * n_s,
        photo_sources=(source,) * n_p,
        stroke_sequences=tuple(stroke_sequences),
        image_size=image_size,
    )


def merge_datasets(a: UnpairedDataset, b: UnpairedDataset) -> UnpairedDataset:
    """Concatenate two corpora (e.g. one sketch source plus extra photo sources).

    Per-item source tags are preserved so downstream reports can attribute
    items to their origin. Image sizes must match.
    """
    if a.image_size != b.image_size:
        raise ValueError(f"image sizes differ: {a.image_size} vs {b.image_size}")
    return UnpairedDataset(
        sketches=a.sketches + b.sketches,
        photos=a.photos + b.photos,
        grayscales=a.grayscales + b.grayscales,
        sketch_names=a.sketch_names + b.sketch_names,
        photo_names=a.photo_names + b.photo_names,
        sketch_sources=a.sketch_sources + b.sketch_sources,
        photo_sources=a.photo_sources + b.photo_sources,
        stroke_sequences=a.stroke_sequences + b.stroke_sequences,
        image_size=a.image_size,
    )
