"""Stroke sequences and partial-sketch rasterization.

A sketch may carry an ordered stroke record (one text sidecar per sketch,
lines of ``stroke_index x y``). Truncating the record to a leading fraction of
strokes and re-rasterizing yields the partial sketches used to probe
robustness to incomplete drawings.
"""

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from ..errors import DataError
from .images import SketchImage

DEFAULT_PEN_WIDTH = 2


@dataclass(frozen=True)
class StrokeSequence:
    """Ordered polyline strokes in pixel coordinates of a H×W canvas."""

    strokes: tuple
    height: int
    width: int
    pen_width: int = DEFAULT_PEN_WIDTH

    def __post_init__(self):
        if not self.strokes:
            raise ValueError("StrokeSequence: at least one stroke required")
        norm = []
        for stroke in self.strokes:
            pts = tuple((float(x), float(y)) for x, y in stroke)
            if not pts:
                raise ValueError("StrokeSequence: empty stroke")
            norm.append(pts)
        object.__setattr__(self, "strokes", tuple(norm))
        if self.height <= 0 or self.width <= 0 or self.pen_width <= 0:
            raise ValueError("StrokeSequence: sizes and pen width must be positive")

    def __len__(self) -> int:
        return len(self.strokes)

    def scaled(self, height: int, width: int) -> "StrokeSequence":
        """Rescale coordinates into a new canvas size."""
        sy = height / self.height
        sx = width / self.width
        strokes = tuple(tuple((x * sx, y * sy) for x, y in s) for s in self.strokes)
        return StrokeSequence(strokes, height, width, self.pen_width)

    @classmethod
    def from_sidecar(cls, path, height: int, width: int,
                     pen_width: int = DEFAULT_PEN_WIDTH) -> "StrokeSequence":
        """Parse a ``stroke_index x y`` sidecar file.

        Stroke indices must be non-decreasing; coordinates are taken verbatim
        (callers rescale via :meth:`scaled` when the raster was resized).
        """
        strokes: list[list[tuple[float, float]]] = []
        last_index = None
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise DataError(f"{path}:{lineno}: expected 'stroke_index x y'")
                try:
                    idx = int(parts[0])
                    x, y = float(parts[1]), float(parts[2])
                except ValueError as exc:
                    raise DataError(f"{path}:{lineno}: malformed number ({exc})") from exc
                if last_index is not None and idx < last_index:
                    raise DataError(f"{path}:{lineno}: stroke_index decreased")
                if last_index is None or idx != last_index:
                    strokes.append([])
                    last_index = idx
                strokes[-1].append((x, y))
        if not strokes:
            raise DataError(f"{path}: no strokes found")
        return cls(tuple(tuple(s) for s in strokes), height, width, pen_width)


def rasterize_strokes(seq: StrokeSequence, n_strokes: int | None = None) -> SketchImage:
    """Draw the first ``n_strokes`` strokes (all when None) on a white canvas."""
    n = len(seq) if n_strokes is None else n_strokes
    if not 0 <= n <= len(seq):
        raise ValueError(f"n_strokes {n} outside [0, {len(seq)}]")
    img = Image.new("L", (seq.width, seq.height), 255)
    draw = ImageDraw.Draw(img)
    radius = seq.pen_width / 2.0
    for stroke in seq.strokes[:n]:
        if len(stroke) == 1:
            x, y = stroke[0]
            draw.ellipse([x - radius, y - radius, x + radius, y + radius], fill=0)
        else:
            draw.line(list(stroke), fill=0, width=seq.pen_width, joint="curve")
    return SketchImage(np.asarray(img, dtype=np.float32) / 255.0)


def truncate_strokes(seq: StrokeSequence, fraction: float) -> SketchImage:
    """Rasterize the leading ceil(fraction * n) strokes.

    fraction=0 gives a blank canvas, fraction=1 the full sketch. Ink only
    accumulates with fraction: every ink pixel at a lower fraction is still
    ink at any higher one.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction {fraction} outside [0, 1]")
    n = math.ceil(fraction * len(seq))
    return rasterize_strokes(seq, n)
