"""Feature extractors for the evaluation metrics.

An extractor is any callable mapping a list of images to an n×d array, with
an ``identifier`` string for reports. The stub needs no weights and keeps the
metric machinery testable; the pretrained ones build torchvision models and
load a local state dict (no download path exists here), raising a
configuration error when the weights file is absent.
"""

import math
import os

import numpy as np
from PIL import Image

from ..data.images import ColorPhoto, GrayscalePhoto, SketchImage
from ..errors import ConfigurationError

_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)


def _to_gray_array(image) -> np.ndarray:
    if isinstance(image, ColorPhoto):
        return image.pixels.mean(axis=0)
    if isinstance(image, (GrayscalePhoto, SketchImage)):
        return image.pixels
    arr = np.asarray(image, dtype=np.float32)
    if arr.ndim == 3 and arr.shape[0] in (1, 3):
        return arr.mean(axis=0)
    if arr.ndim == 2:
        return arr
    raise ValueError(f"cannot interpret image with shape {arr.shape}")


def _to_rgb_array(image) -> np.ndarray:
    if isinstance(image, ColorPhoto):
        return image.pixels
    gray = _to_gray_array(image)
    return np.stack([gray, gray, gray])


class StubPixelExtractor:
    """Deterministic weight-free features: bilinear thumbnail of the luma plane."""

    def __init__(self, dim: int = 64):
        side = math.isqrt(dim)
        if side * side != dim:
            raise ValueError(f"stub dim must be a perfect square, got {dim}")
        self.side = side
        self.dim = dim
        self.identifier = f"stub-pixels-{dim}"

    def __call__(self, images) -> np.ndarray:
        rows = []
        for image in images:
            gray = _to_gray_array(image)
            thumb = Image.fromarray(gray.astype(np.float32), mode="F").resize(
                (self.side, self.side), Image.BILINEAR)
            rows.append(np.asarray(thumb, dtype=np.float64).reshape(-1))
        return np.stack(rows)


class _TorchvisionExtractor:
    def __init__(self, model, transform, identifier: str, batch_size: int = 16):
        import torch

        self._torch = torch
        self._model = model.eval()
        for p in self._model.parameters():
            p.requires_grad_(False)
        self._transform = transform
        self.identifier = identifier
        self.batch_size = batch_size

    def __call__(self, images) -> np.ndarray:
        torch = self._torch
        tensors = [self._transform(_to_rgb_array(img)) for img in images]
        outputs = []
        with torch.no_grad():
            for start in range(0, len(tensors), self.batch_size):
                batch = torch.stack(tensors[start:start + self.batch_size])
                outputs.append(self._model(batch).numpy())
        return np.concatenate(outputs).astype(np.float64)


def _require_weights(weights_path, what: str):
    if not weights_path or not os.path.exists(weights_path):
        raise ConfigurationError(
            f"{what} weights not found at {weights_path!r}; supply a local "
            "pretrained state dict (there is no download path)")


def _imagenet_transform(size: int):
    import torch

    mean = torch.tensor(_IMAGENET_MEAN).view(3, 1, 1)
    std = torch.tensor(_IMAGENET_STD).view(3, 1, 1)

    def transform(rgb: np.ndarray):
        t = torch.from_numpy(np.ascontiguousarray(rgb, dtype=np.float32))
        t = torch.nn.functional.interpolate(
            t[None], size=(size, size), mode="bilinear", align_corners=False)[0]
        return (t - mean) / std

    return transform


def inception_pool3_extractor(weights_path, batch_size: int = 8):
    """Inception-v3 pooled features (2048-d), weights from a local file."""
    _require_weights(weights_path, "Inception-v3")
    import torch
    from torchvision.models import inception_v3

    model = inception_v3(weights=None, init_weights=False, aux_logits=True)
    state = torch.load(weights_path, map_location="cpu", weights_only=True)
    model.load_state_dict(state)
    model.fc = torch.nn.Identity()
    model.eval()
    return _TorchvisionExtractor(
        model, _imagenet_transform(299),
        f"inception-v3-pool3-{os.path.basename(weights_path)}", batch_size)


def resnet18_extractor(weights_path, batch_size: int = 16):
    """ResNet-18 penultimate features (512-d), weights from a local file."""
    _require_weights(weights_path, "ResNet-18")
    import torch
    from torchvision.models import resnet18

    model = resnet18(weights=None)
    state = torch.load(weights_path, map_location="cpu", weights_only=True)
    model.load_state_dict(state)
    model.fc = torch.nn.Identity()
    model.eval()
    return _TorchvisionExtractor(
        model, _imagenet_transform(224),
        f"resnet18-{os.path.basename(weights_path)}", batch_size)
