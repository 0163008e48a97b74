"""Differentiable sRGB → CIE Lab conversion (D65 white point).

Implemented with tensor ops end to end so the lightness-matching loss can
backpropagate through the conversion. L lands in [0, 100]; a/b are signed and
vanish for achromatic inputs.
"""

import numpy as np
import torch

# sRGB (linear) to XYZ, D65.
_RGB_TO_XYZ = torch.tensor([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
], dtype=torch.float64)

_WHITE_POINT = torch.tensor([0.95047, 1.0, 1.08883], dtype=torch.float64)

_DELTA = 6.0 / 29.0
_DELTA_CUBED = _DELTA ** 3


def _srgb_to_linear(srgb: torch.Tensor) -> torch.Tensor:
    # Gamma expansion; the power branch's base stays positive for inputs >= 0.
    return torch.where(
        srgb > 0.04045,
        ((srgb + 0.055) / 1.055) ** 2.4,
        srgb / 12.92,
    )


def _lab_f(t: torch.Tensor) -> torch.Tensor:
    # Clamp inside the unused cube-root branch to keep its gradient finite.
    cube_root = t.clamp(min=_DELTA_CUBED) ** (1.0 / 3.0)
    linear = t / (3.0 * _DELTA ** 2) + 4.0 / 29.0
    return torch.where(t > _DELTA_CUBED, cube_root, linear)


def rgb_to_lab(rgb: torch.Tensor) -> torch.Tensor:
    """Convert (..., 3, H, W) sRGB in [0, 1] to (..., 3, H, W) Lab."""
    if rgb.dim() < 3 or rgb.shape[-3] != 3:
        raise ValueError(f"expected (..., 3, H, W) input, got shape {tuple(rgb.shape)}")
    matrix = _RGB_TO_XYZ.to(dtype=rgb.dtype, device=rgb.device)
    white = _WHITE_POINT.to(dtype=rgb.dtype, device=rgb.device)

    linear = _srgb_to_linear(rgb)
    xyz = torch.einsum("ij,...jhw->...ihw", matrix, linear)
    xyz = xyz / white.view(3, 1, 1)

    f = _lab_f(xyz)
    fx = f[..., 0, :, :]
    fy = f[..., 1, :, :]
    fz = f[..., 2, :, :]
    lightness = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return torch.stack([lightness, a, b], dim=-3)


def rgb_to_lab_array(pixels: np.ndarray) -> np.ndarray:
    """NumPy convenience wrapper: (3, H, W) float in [0, 1] → Lab (float64)."""
    tensor = torch.from_numpy(np.ascontiguousarray(pixels, dtype=np.float64))
    return rgb_to_lab(tensor).numpy()
