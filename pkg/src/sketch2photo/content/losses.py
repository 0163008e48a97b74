"""Loss terms for the content-enrichment stage.

* intensity: the decoded photo's Lab lightness (scaled to [0, 1]) must match
  the input grayscale — colorization may invent color but not brightness.
* style: per-channel feature mean/std of the output should match the
  reference under a fixed feature extractor (used only when a reference
  was drawn).
* content: encoding the decoded image should reproduce the AdaIN-transformed
  features that the decoder consumed.
"""

import os

import torch

from ..errors import ConfigurationError
from .adain import channel_stats
from .colorspace import rgb_to_lab


def intensity_loss(gray: torch.Tensor, output: torch.Tensor) -> torch.Tensor:
    """mean |G − L(output)/100| with G in [0, 1] and output sRGB in [0, 1]."""
    if output.shape[-3] != 3:
        raise ValueError(f"output must be (..., 3, H, W), got {tuple(output.shape)}")
    lightness = rgb_to_lab(output)[..., :1, :, :] / 100.0
    if gray.dim() == lightness.dim() - 1:
        gray = gray.unsqueeze(-3)
    if gray.shape[-2:] != lightness.shape[-2:]:
        raise ValueError("grayscale and output spatial sizes differ")
    return (gray - lightness).abs().mean()


def _stat_norm(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    # (N, C, 1, 1) stats → Euclidean norm over channels, mean over batch.
    diff = (a - b).flatten(start_dim=1) if a.dim() == 4 else (a - b).flatten()[None]
    return diff.norm(dim=1).mean()


def style_loss(output: torch.Tensor, reference: torch.Tensor, extractor) -> torch.Tensor:
    """Sum over extractor layers of ‖Δmean‖₂ + ‖Δstd‖₂ (equal layer weights)."""
    feats_out = extractor(output)
    feats_ref = extractor(reference)
    if len(feats_out) != len(feats_ref):
        raise ValueError("extractor returned differing layer counts")
    total = None
    for fo, fr in zip(feats_out, feats_ref):
        mu_o, sd_o = channel_stats(fo)
        mu_r, sd_r = channel_stats(fr)
        term = _stat_norm(mu_o, mu_r) + _stat_norm(sd_o, sd_r)
        total = term if total is None else total + term
    if total is None:
        raise ValueError("extractor returned no layers")
    return total


def content_reconstruction_loss(encoder, decoder, t: torch.Tensor) -> torch.Tensor:
    """mean |E(D(t)) − t|: the decoded image must still encode to its source."""
    return (encoder(decoder(t)) - t).abs().mean()


# VGG-19 feature indices (after the ReLU) used for style statistics.
_VGG19_STYLE_LAYERS = (1, 6, 11, 20)

_IMAGENET_MEAN = (0.485, 0.456, 0.406)
_IMAGENET_STD = (0.229, 0.224, 0.225)


class VggStyleExtractor:
    """Frozen VGG-19 slice emitting the four early-block ReLU feature maps.

    Weights must be supplied as a local state-dict file; there is no network
    download path. Inputs are sRGB in [0, 1].
    """

    def __init__(self, weights_path: str, device: str = "cpu"):
        if not weights_path or not os.path.exists(weights_path):
            raise ConfigurationError(
                f"VGG-19 weights not found at {weights_path!r}; style loss needs "
                "a local pretrained state dict")
        from torchvision.models import vgg19

        model = vgg19(weights=None)
        state = torch.load(weights_path, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
        cut = max(_VGG19_STYLE_LAYERS) + 1
        self.features = model.features[:cut].to(device).eval()
        for p in self.features.parameters():
            p.requires_grad_(False)
        self.identifier = f"vgg19-style-{os.path.basename(weights_path)}"
        self._mean = torch.tensor(_IMAGENET_MEAN, device=device).view(1, 3, 1, 1)
        self._std = torch.tensor(_IMAGENET_STD, device=device).view(1, 3, 1, 1)

    def __call__(self, x: torch.Tensor) -> list:
        if x.shape[-3] == 1:
            x = x.repeat(1, 3, 1, 1) if x.dim() == 4 else x.repeat(3, 1, 1)
        x = (x - self._mean.to(x.dtype)) / self._std.to(x.dtype)
        outputs = []
        for idx, layer in enumerate(self.features):
            x = layer(x)
            if idx in _VGG19_STYLE_LAYERS:
                outputs.append(x)
        return outputs
