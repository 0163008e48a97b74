"""Encoder/decoder pair for the content-enrichment stage.

The encoder follows the VGG-19 layer recipe through its ninth conv with two
max-pool stages, so a 128×128 input bottoms out at 32×32. Grayscale inputs are
replicated to three channels at entry. The decoder is a norm-free residual
trunk with two upsampling blocks: normalization layers there would erase the
per-channel statistics injected by the AdaIN step, so the blocks stay plain.
Decoder outputs live in [0, 1].
"""

import torch
import torch.nn as nn

from .adain import adain


def _conv_relu(in_ch: int, out_ch: int) -> list:
    return [nn.Conv2d(in_ch, out_ch, 3, padding=1), nn.ReLU(inplace=True)]


def _init_norm_free(module: nn.Module) -> None:
    """He-init for the norm-free content stacks.

    A small fixed-std init (as used in the normalized shape networks) relies
    on a normalization layer after each conv to restore activation scale;
    without one it shrinks activations roughly tenfold per conv, and a
    nine-conv stack collapses to numerical zero along with its gradients.
    Kaiming init keeps activation variance near-constant under ReLU.
    """
    if isinstance(module, nn.Conv2d):
        nn.init.kaiming_normal_(module.weight, nonlinearity="relu")
        if module.bias is not None:
            nn.init.zeros_(module.bias)


class ContentEncoder(nn.Module):
    """Nine 3×3 convs with two max-pools; channels w,w | 2w,2w | 4w×4 | 8w."""

    def __init__(self, base_width: int = 64):
        super().__init__()
        w = base_width
        layers = []
        layers += _conv_relu(3, w)
        layers += _conv_relu(w, w)
        layers.append(nn.MaxPool2d(2))
        layers += _conv_relu(w, 2 * w)
        layers += _conv_relu(2 * w, 2 * w)
        layers.append(nn.MaxPool2d(2))
        layers += _conv_relu(2 * w, 4 * w)
        layers += _conv_relu(4 * w, 4 * w)
        layers += _conv_relu(4 * w, 4 * w)
        layers += _conv_relu(4 * w, 4 * w)
        layers += _conv_relu(4 * w, 8 * w)
        self.features = nn.Sequential(*layers)
        self.out_channels = 8 * w
        self.apply(_init_norm_free)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.dim() != 4:
            raise ValueError(f"expected N×C×H×W input, got shape {tuple(x.shape)}")
        if x.shape[-1] % 4 != 0 or x.shape[-2] % 4 != 0:
            raise ValueError(f"spatial size {tuple(x.shape[-2:])} must be divisible by 4")
        if x.shape[1] == 1:
            x = x.repeat(1, 3, 1, 1)
        elif x.shape[1] != 3:
            raise ValueError(f"expected 1 or 3 input channels, got {x.shape[1]}")
        return self.features(x)


class PlainResidualBlock(nn.Module):
    """Residual block without normalization (keeps AdaIN statistics intact)."""

    def __init__(self, channels: int):
        super().__init__()
        self.block = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, 3),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, 3),
        )

    def forward(self, x):
        return x + self.block(x)


class ContentDecoder(nn.Module):
    """Twelve residual blocks, two upsampling stages, 3-channel head in [0, 1]."""

    def __init__(self, base_width: int = 64, n_residual_blocks: int = 12):
        super().__init__()
        w = base_width
        self.in_channels = 8 * w
        self.blocks = nn.Sequential(
            *[PlainResidualBlock(8 * w) for _ in range(n_residual_blocks)])
        self.up = nn.Sequential(
            nn.Upsample(scale_factor=2, mode="nearest"),
            nn.Conv2d(8 * w, 4 * w, 3, padding=1),
            nn.ReLU(inplace=True),
            nn.Upsample(scale_factor=2, mode="nearest"),
            nn.Conv2d(4 * w, 2 * w, 3, padding=1),
            nn.ReLU(inplace=True),
        )
        self.head = nn.Sequential(
            nn.ReflectionPad2d(3),
            nn.Conv2d(2 * w, 3, 7),
            nn.Tanh(),
        )
        self.apply(_init_norm_free)

    def forward(self, t: torch.Tensor) -> torch.Tensor:
        if t.dim() != 4 or t.shape[1] != self.in_channels:
            raise ValueError(
                f"expected N×{self.in_channels}×H×W features, got shape {tuple(t.shape)}")
        y = self.head(self.up(self.blocks(t)))
        return (y + 1.0) * 0.5


def enrich(encoder: ContentEncoder, decoder: ContentDecoder,
           gray: torch.Tensor, reference: torch.Tensor | None = None) -> torch.Tensor:
    """Colorize a grayscale tensor, optionally steering statistics to a reference.

    gray: N×1×H×W (or N×3×H×W) in [0, 1]; reference: N×3×H×W in [0, 1] or None.
    Returns N×3×H×W in [0, 1].
    """
    features = encoder(gray)
    ref_features = encoder(reference) if reference is not None else None
    return decoder(adain(features, ref_features))
