"""Raster image types used at module boundaries.

All pixel data is float32 in [0, 1]. Sketches and grayscale photos are H×W,
color photos are channel-first 3×H×W. Construction validates range and shape;
anything that produced values outside [0, 1] is a bug upstream, not something
to silently clamp.
"""

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from ..errors import DataError

# Tolerance for float round-off when validating the unit range.
_RANGE_SLACK = 1e-6

# BT.601 luma weights.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def _validate_unit_array(pixels, ndim: int, what: str) -> np.ndarray:
    arr = np.asarray(pixels, dtype=np.float32)
    if arr.ndim != ndim:
        raise ValueError(f"{what}: expected {ndim}-d pixel array, got shape {arr.shape}")
    if ndim == 3 and arr.shape[0] != 3:
        raise ValueError(f"{what}: expected channel-first 3×H×W, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{what}: empty pixel array")
    if not np.isfinite(arr).all():
        raise ValueError(f"{what}: non-finite pixel values")
    lo, hi = float(arr.min()), float(arr.max())
    if lo < -_RANGE_SLACK or hi > 1.0 + _RANGE_SLACK:
        raise ValueError(f"{what}: pixel values outside [0, 1] (min {lo:.4g}, max {hi:.4g})")
    return np.clip(arr, 0.0, 1.0)


def _open_image(path, mode: str) -> Image.Image:
    try:
        img = Image.open(path)
        img.load()
    except (OSError, ValueError) as exc:
        raise DataError(f"{path}: cannot decode image ({exc})") from exc
    return img.convert(mode)


def _resize(img: Image.Image, size: int | None) -> Image.Image:
    if size is None or img.size == (size, size):
        return img
    # Bilinear keeps resampled values inside the source range.
    return img.resize((size, size), Image.BILINEAR)


def _save_png(path, arr_uint8: np.ndarray) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    Image.fromarray(arr_uint8).save(path, format="PNG")


@dataclass(frozen=True)
class SketchImage:
    """Single-channel line drawing: white background (1.0), dark ink (0.0)."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _validate_unit_array(self.pixels, 2, "SketchImage"))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def ink_fraction(self) -> float:
        """Fraction of pixels darker than mid-gray."""
        return float((self.pixels < 0.5).mean())

    def is_background_majority(self) -> bool:
        """True when the raster is mostly background, as free-hand sketches are."""
        return float(self.pixels.mean()) > 0.5

    @classmethod
    def blank(cls, height: int, width: int | None = None) -> "SketchImage":
        return cls(np.ones((height, width or height), dtype=np.float32))

    @classmethod
    def from_file(cls, path, image_size: int | None = None) -> "SketchImage":
        img = _resize(_open_image(path, "L"), image_size)
        return cls(np.asarray(img, dtype=np.float32) / 255.0)

    def save(self, path) -> None:
        _save_png(path, np.round(self.pixels * 255.0).astype(np.uint8))


@dataclass(frozen=True)
class GrayscalePhoto:
    """Single-channel photograph, H×W in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _validate_unit_array(self.pixels, 2, "GrayscalePhoto"))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def from_file(cls, path, image_size: int | None = None) -> "GrayscalePhoto":
        img = _resize(_open_image(path, "L"), image_size)
        return cls(np.asarray(img, dtype=np.float32) / 255.0)

    def save(self, path) -> None:
        _save_png(path, np.round(self.pixels * 255.0).astype(np.uint8))


@dataclass(frozen=True)
class ColorPhoto:
    """RGB photograph, channel-first 3×H×W in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _validate_unit_array(self.pixels, 3, "ColorPhoto"))

    @property
    def height(self) -> int:
        return self.pixels.shape[1]

    @property
    def width(self) -> int:
        return self.pixels.shape[2]

    @classmethod
    def from_file(cls, path, image_size: int | None = None) -> "ColorPhoto":
        img = _resize(_open_image(path, "RGB"), image_size)
        hwc = np.asarray(img, dtype=np.float32) / 255.0
        return cls(np.transpose(hwc, (2, 0, 1)))

    def save(self, path) -> None:
        hwc = np.transpose(np.round(self.pixels * 255.0).astype(np.uint8), (1, 2, 0))
        _save_png(path, hwc)


def to_grayscale(photo: ColorPhoto) -> GrayscalePhoto:
    """BT.601 luma: 0.299 R + 0.587 G + 0.114 B."""
    gray = np.tensordot(_LUMA_WEIGHTS, photo.pixels.astype(np.float64), axes=(0, 0))
    return GrayscalePhoto(gray.astype(np.float32))
