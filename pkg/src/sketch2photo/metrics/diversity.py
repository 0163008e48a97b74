"""Output-diversity metric: mean pairwise perceptual distance.

The distance function is injected. True learned perceptual metrics need
pretrained weights that cannot be fetched here, so the built-ins are honest
pixel-space proxies; anything with the same (a, b) → float signature plugs in.
"""

import itertools

import numpy as np

from ..data.images import ColorPhoto, to_grayscale


def l1_distance(a: ColorPhoto, b: ColorPhoto) -> float:
    """Mean absolute RGB difference."""
    if a.pixels.shape != b.pixels.shape:
        raise ValueError("photo shapes differ")
    return float(np.abs(a.pixels - b.pixels).mean())


def gray_l1_distance(a: ColorPhoto, b: ColorPhoto) -> float:
    """Mean absolute luma difference (ignores hue, tracks structure)."""
    return float(np.abs(to_grayscale(a).pixels - to_grayscale(b).pixels).mean())


DIVERSITY_METRICS = {
    "l1": l1_distance,
    "gray-l1": gray_l1_distance,
}


def lpips_diversity(outputs, metric) -> float:
    """Mean of metric(a, b) over all unordered output pairs.

    ``outputs`` are the variants generated for a single input; at least two
    are required for a pair to exist.
    """
    outputs = list(outputs)
    if len(outputs) < 2:
        raise ValueError(f"need at least 2 outputs, got {len(outputs)}")
    distances = [metric(a, b) for a, b in itertools.combinations(outputs, 2)]
    values = np.asarray(distances, dtype=np.float64)
    if not np.isfinite(values).all():
        raise ValueError("metric produced non-finite distances")
    return float(values.mean())
