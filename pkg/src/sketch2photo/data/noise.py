"""Noise-sketch composition for self-supervised denoising.

Training sketches are augmented on the fly into two noise flavors:

* complex   — a dense-stroke mask from a pre-built pool stamped onto the sketch,
* distractive — a square patch copied from a different sketch.

Ink composites by pixel-wise minimum, so composition can only darken. The
clean original is kept alongside the composed sketch; the denoising loss
reconstructs the clean original from the composed input.
"""

import io
import json
import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, UnsupportedVersionError
from .images import SketchImage

logger = logging.getLogger(__name__)

TAG_CLEAN = "clean"
TAG_COMPLEX = "complex"
TAG_DISTRACTIVE = "distractive"

POOL_FORMAT_VERSION = 1

DEFAULT_CROP_SIZE = 32
DEFAULT_DENSITY_THRESHOLD = 0.15
DEFAULT_POOL_SIZE = 256
DEFAULT_PATCH_SIZE = 50


@dataclass(frozen=True)
class NoiseMaskPool:
    """Pool of dense-stroke crops with their provenance.

    ``complete`` is False when the corpus yielded fewer qualifying crops than
    requested. ``density_threshold``/``crop_size``/``seed`` record how the
    pool was built so it can be reproduced.
    """

    masks: tuple
    provenance: tuple
    seed: int
    density_threshold: float
    crop_size: int
    complete: bool = True

    def __post_init__(self):
        if len(self.masks) != len(self.provenance):
            raise ValueError("NoiseMaskPool: masks and provenance lengths differ")
        for m in self.masks:
            if not isinstance(m, SketchImage):
                raise TypeError("NoiseMaskPool: masks must be SketchImage crops")
            if m.pixels.shape != (self.crop_size, self.crop_size):
                raise ValueError("NoiseMaskPool: mask shape differs from crop_size")

    def __len__(self) -> int:
        return len(self.masks)

    @classmethod
    def empty(cls, crop_size: int = DEFAULT_CROP_SIZE,
              density_threshold: float = DEFAULT_DENSITY_THRESHOLD,
              seed: int = 0) -> "NoiseMaskPool":
        return cls((), (), seed, density_threshold, crop_size, complete=False)

    def save(self, path) -> None:
        meta = {
            "format_version": POOL_FORMAT_VERSION,
            "seed": self.seed,
            "density_threshold": self.density_threshold,
            "crop_size": self.crop_size,
            "complete": self.complete,
        }
        stack = (np.stack([m.pixels for m in self.masks])
                 if self.masks else np.zeros((0, self.crop_size, self.crop_size), np.float32))
        with open(path, "wb") as fh:
            np.savez_compressed(
                fh,
                masks=stack,
                provenance=np.array(self.provenance, dtype=np.str_),
                meta=np.array(json.dumps(meta)),
            )

    @classmethod
    def load(cls, path) -> "NoiseMaskPool":
        with open(path, "rb") as fh:
            archive = np.load(io.BytesIO(fh.read()), allow_pickle=False)
        try:
            meta = json.loads(str(archive["meta"]))
        except (KeyError, json.JSONDecodeError) as exc:
            raise DataError(f"{path}: not a noise-mask pool archive") from exc
        version = meta.get("format_version")
        if version != POOL_FORMAT_VERSION:
            raise UnsupportedVersionError(
                f"{path}: pool format version {version!r} not supported")
        masks = tuple(SketchImage(m) for m in archive["masks"])
        return cls(
            masks=masks,
            provenance=tuple(str(p) for p in archive["provenance"]),
            seed=int(meta["seed"]),
            density_threshold=float(meta["density_threshold"]),
            crop_size=int(meta["crop_size"]),
            complete=bool(meta["complete"]),
        )


def _ink_density_map(pixels: np.ndarray, crop: int, stride: int) -> tuple:
    """Densities of all stride-aligned crop windows, via an integral image."""
    ink = (pixels < 0.5).astype(np.float64)
    integral = np.zeros((ink.shape[0] + 1, ink.shape[1] + 1))
    integral[1:, 1:] = ink.cumsum(0).cumsum(1)
    ys = np.arange(0, ink.shape[0] - crop + 1, stride)
    xs = np.arange(0, ink.shape[1] - crop + 1, stride)
    if ys.size == 0 or xs.size == 0:
        return ys, xs, np.zeros((0, 0))
    sums = (integral[np.ix_(ys + crop, xs + crop)]
            - integral[np.ix_(ys, xs + crop)]
            - integral[np.ix_(ys + crop, xs)]
            + integral[np.ix_(ys, xs)])
    return ys, xs, sums / (crop * crop)


def build_noise_mask_pool(sketches, crop_size: int = DEFAULT_CROP_SIZE,
                          density_threshold: float = DEFAULT_DENSITY_THRESHOLD,
                          pool_size: int = DEFAULT_POOL_SIZE,
                          seed: int = 0,
                          stride: int | None = None) -> NoiseMaskPool:
    """Scan sketches for dense-stroke crops and keep a seeded random subset.

    Crops whose ink density (fraction of pixels < 0.5) reaches
    ``density_threshold`` qualify. Selection order and content are fully
    determined by ``seed``. Raises DataError when nothing qualifies.
    """
    if crop_size <= 0 or pool_size <= 0:
        raise ValueError("crop_size and pool_size must be positive")
    if not 0.0 < density_threshold <= 1.0:
        raise ValueError("density_threshold must be in (0, 1]")
    stride = stride or max(1, crop_size // 2)

    candidates: list[tuple[int, int, int]] = []
    for sketch_idx, sketch in enumerate(sketches):
        ys, xs, density = _ink_density_map(sketch.pixels, crop_size, stride)
        for iy, ix in zip(*np.nonzero(density >= density_threshold)):
            candidates.append((sketch_idx, int(ys[iy]), int(xs[ix])))

    if not candidates:
        raise DataError(
            f"no crops with ink density >= {density_threshold} found; "
            "the corpus has no dense stroke regions at this crop size")

    rng = np.random.default_rng(seed)
    if len(candidates) > pool_size:
        chosen = [candidates[i] for i in rng.choice(len(candidates), pool_size, replace=False)]
        complete = True
    else:
        chosen = candidates
        complete = len(candidates) == pool_size
        if not complete:
            logger.warning("noise-mask pool smaller than requested: %d < %d",
                           len(candidates), pool_size)

    masks, provenance = [], []
    for sketch_idx, y, x in chosen:
        crop = sketches[sketch_idx].pixels[y:y + crop_size, x:x + crop_size]
        masks.append(SketchImage(crop.copy()))
        provenance.append(f"{sketch_idx}:{y}:{x}")
    return NoiseMaskPool(tuple(masks), tuple(provenance), seed,
                         density_threshold, crop_size, complete)


def _check_placement(sketch: SketchImage, h: int, w: int, y: int, x: int, what: str):
    if y < 0 or x < 0 or y + h > sketch.height or x + w > sketch.width:
        raise ValueError(
            f"{what}: placement ({y}, {x}) of {h}×{w} region exceeds "
            f"{sketch.height}×{sketch.width} sketch")


def compose_complex(sketch: SketchImage, mask: SketchImage,
                    location: tuple[int, int]) -> SketchImage:
    """Stamp a dense-stroke mask at (y, x); ink merges by pixel-wise min."""
    y, x = location
    _check_placement(sketch, mask.height, mask.width, y, x, "compose_complex")
    out = sketch.pixels.copy()
    region = out[y:y + mask.height, x:x + mask.width]
    np.minimum(region, mask.pixels, out=region)
    return SketchImage(out)


def compose_distractive(sketch: SketchImage, donor: SketchImage,
                        src: tuple[int, int], dst: tuple[int, int],
                        patch_size: int = DEFAULT_PATCH_SIZE) -> SketchImage:
    """Copy a patch_size square from a donor sketch onto this one (min-blend)."""
    sy, sx = src
    dy, dx = dst
    _check_placement(donor, patch_size, patch_size, sy, sx, "compose_distractive (src)")
    _check_placement(sketch, patch_size, patch_size, dy, dx, "compose_distractive (dst)")
    out = sketch.pixels.copy()
    patch = donor.pixels[sy:sy + patch_size, sx:sx + patch_size]
    region = out[dy:dy + patch_size, dx:dx + patch_size]
    np.minimum(region, patch, out=region)
    return SketchImage(out)


def _uniform_placement(rng: np.random.Generator, height: int, width: int,
                       h: int, w: int) -> tuple[int, int]:
    return int(rng.integers(0, height - h + 1)), int(rng.integers(0, width - w + 1))


def sample_noise_sketch(sketch: SketchImage, pool: NoiseMaskPool, donors,
                        p_complex: float = 0.2, p_distractive: float = 0.3,
                        patch_size: int = DEFAULT_PATCH_SIZE,
                        rng: np.random.Generator | None = None) -> tuple[SketchImage, str]:
    """Draw one augmentation decision and return (possibly composed sketch, tag).

    Tags are mutually exclusive per draw: complex with probability p_complex,
    distractive with p_distractive, otherwise clean. Falls back to clean with
    a warning when the chosen branch has no material to work with.
    """
    if p_complex < 0 or p_distractive < 0 or p_complex + p_distractive > 1.0 + 1e-12:
        raise ValueError("noise probabilities must be non-negative and sum to <= 1")
    rng = rng if rng is not None else np.random.default_rng()

    u = rng.random()
    if u < p_complex:
        if len(pool) == 0:
            logger.warning("complex branch drawn but noise-mask pool is empty; "
                           "falling back to clean")
            return sketch, TAG_CLEAN
        mask = pool.masks[int(rng.integers(0, len(pool)))]
        if mask.height > sketch.height or mask.width > sketch.width:
            raise ValueError("noise mask larger than sketch")
        loc = _uniform_placement(rng, sketch.height, sketch.width, mask.height, mask.width)
        return compose_complex(sketch, mask, loc), TAG_COMPLEX
    if u < p_complex + p_distractive:
        if not donors:
            logger.warning("distractive branch drawn but donor list is empty; "
                           "falling back to clean")
            return sketch, TAG_CLEAN
        donor = donors[int(rng.integers(0, len(donors)))]
        if (patch_size > donor.height or patch_size > donor.width
                or patch_size > sketch.height or patch_size > sketch.width):
            raise ValueError(f"patch_size {patch_size} exceeds sketch or donor size")
        src = _uniform_placement(rng, donor.height, donor.width, patch_size, patch_size)
        dst = _uniform_placement(rng, sketch.height, sketch.width, patch_size, patch_size)
        return compose_distractive(sketch, donor, src, dst, patch_size), TAG_DISTRACTIVE
    return sketch, TAG_CLEAN
