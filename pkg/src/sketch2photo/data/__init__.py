from .images import ColorPhoto, GrayscalePhoto, SketchImage, to_grayscale
from .strokes import StrokeSequence, rasterize_strokes, truncate_strokes
from .noise import (
    NoiseMaskPool,
    TAG_CLEAN,
    TAG_COMPLEX,
    TAG_DISTRACTIVE,
    build_noise_mask_pool,
    compose_complex,
    compose_distractive,
    sample_noise_sketch,
)
from .dataset import UnpairedDataset, load_dataset, merge_datasets

__all__ = [
    "ColorPhoto",
    "GrayscalePhoto",
    "SketchImage",
    "to_grayscale",
    "StrokeSequence",
    "rasterize_strokes",
    "truncate_strokes",
    "NoiseMaskPool",
    "TAG_CLEAN",
    "TAG_COMPLEX",
    "TAG_DISTRACTIVE",
    "build_noise_mask_pool",
    "compose_complex",
    "compose_distractive",
    "sample_noise_sketch",
    "UnpairedDataset",
    "load_dataset",
    "merge_datasets",
]
