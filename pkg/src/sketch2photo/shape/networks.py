"""Generators and discriminators for the shape-translation stage.

Both translation directions share one architecture: a 7×7 stem, two stride-2
downsampling convs, a residual trunk at the 4×-downsampled bottleneck, two
upsampling blocks and a 7×7 tanh head. The sketch→grayscale generator
additionally carries a suppressive attention head at the bottleneck: a
two-channel per-location softmax whose first channel A re-weights features as
(1 − A) ⊙ f, so regions the head attends to are damped rather than amplified.
"""

import torch
import torch.nn as nn


def init_weights(module: nn.Module, std: float = 0.02) -> None:
    """DCGAN-style init: conv weights from N(0, std), biases zero."""
    if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d)):
        nn.init.normal_(module.weight, 0.0, std)
        if module.bias is not None:
            nn.init.zeros_(module.bias)


class ResidualBlock(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.block = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, 3),
            nn.InstanceNorm2d(channels),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, 3),
            nn.InstanceNorm2d(channels),
            nn.ReLU(inplace=True),
        )

    def forward(self, x):
        return x + self.block(x)


class AttentionHead(nn.Module):
    """Two convs (no normalization), two-channel softmax over each location.

    The final conv starts near zero so the initial mask is approximately a
    uniform 0.5 — suppression begins close to neutral — while every layer
    still receives gradient from the very first step (an exactly-zero head
    would cut the first conv out of the graph). The mask is clamped to the
    open interval (0, 1): a saturated softmax otherwise rounds to exactly
    0 or 1 in floating point, which would erase a feature map outright or
    disable suppression with no gradient left to recover.
    """

    def __init__(self, channels: int):
        super().__init__()
        self.conv1 = nn.Conv2d(channels, channels, 3, padding=1)
        self.conv2 = nn.Conv2d(channels, 2, 3, padding=1)
        self.reset_head()

    def reset_head(self) -> None:
        nn.init.normal_(self.conv2.weight, std=1e-3)
        nn.init.zeros_(self.conv2.bias)

    def forward(self, feature: torch.Tensor) -> torch.Tensor:
        logits = self.conv2(torch.relu(self.conv1(feature)))
        mask = torch.softmax(logits, dim=-3)[..., :1, :, :]
        eps = torch.finfo(mask.dtype).eps
        return mask.clamp(eps, 1.0 - eps)


def apply_attention(feature: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Suppressive re-weighting: (1 − mask) ⊙ feature, mask broadcast over channels."""
    if feature.shape[-2:] != mask.shape[-2:]:
        raise ValueError(
            f"attention mask spatial size {tuple(mask.shape[-2:])} does not match "
            f"feature {tuple(feature.shape[-2:])}")
    if mask.shape[-3] != 1:
        raise ValueError("attention mask must have a single channel")
    return (1.0 - mask) * feature


class Generator(nn.Module):
    """Image-to-image generator; optionally carries the attention head."""

    def __init__(self, in_channels: int = 1, out_channels: int = 1,
                 base_width: int = 64, n_residual_blocks: int = 9,
                 attention: bool = False):
        super().__init__()
        w = base_width
        self.stem = nn.Sequential(
            nn.ReflectionPad2d(3),
            nn.Conv2d(in_channels, w, 7),
            nn.InstanceNorm2d(w),
            nn.ReLU(inplace=True),
        )
        self.down = nn.Sequential(
            nn.Conv2d(w, 2 * w, 3, stride=2, padding=1),
            nn.InstanceNorm2d(2 * w),
            nn.ReLU(inplace=True),
            nn.Conv2d(2 * w, 4 * w, 3, stride=2, padding=1),
            nn.InstanceNorm2d(4 * w),
            nn.ReLU(inplace=True),
        )
        self.blocks = nn.Sequential(*[ResidualBlock(4 * w) for _ in range(n_residual_blocks)])
        self.up = nn.Sequential(
            nn.Upsample(scale_factor=2, mode="nearest"),
            nn.Conv2d(4 * w, 2 * w, 3, padding=1),
            nn.InstanceNorm2d(2 * w),
            nn.ReLU(inplace=True),
            nn.Upsample(scale_factor=2, mode="nearest"),
            nn.Conv2d(2 * w, w, 3, padding=1),
            nn.InstanceNorm2d(w),
            nn.ReLU(inplace=True),
        )
        self.head = nn.Sequential(
            nn.ReflectionPad2d(3),
            nn.Conv2d(w, out_channels, 7),
            nn.Tanh(),
        )
        self.apply(init_weights)
        self.attention = AttentionHead(4 * w) if attention else None

    def bottleneck(self, x: torch.Tensor) -> torch.Tensor:
        """Features after downsampling, before the residual trunk."""
        if x.shape[-1] % 4 != 0 or x.shape[-2] % 4 != 0:
            raise ValueError(
                f"spatial size {tuple(x.shape[-2:])} must be divisible by 4")
        return self.down(self.stem(x))

    def forward(self, x: torch.Tensor, use_attention: bool | None = None,
                return_attention: bool = False):
        f = self.bottleneck(x)
        attend = self.attention is not None if use_attention is None else use_attention
        mask = None
        if attend:
            if self.attention is None:
                raise ValueError("generator was built without an attention head")
            mask = self.attention(f)
            f = apply_attention(f, mask)
        y = self.head(self.up(self.blocks(f)))
        if return_attention:
            return y, mask
        return y


class PatchDiscriminator(nn.Module):
    """Patch discriminator: stride-2 convs, a stride-1 conv, then a 1-channel
    score conv. InstanceNorm+LeakyReLU everywhere except the first layer.
    Emits a 14×14 score map for 128×128 inputs at the default depth.
    """

    def __init__(self, in_channels: int = 1, base_width: int = 64, n_layers: int = 4):
        super().__init__()
        if n_layers < 2:
            raise ValueError("discriminator needs at least 2 layers")
        layers = [nn.Conv2d(in_channels, base_width, 4, stride=2, padding=1),
                  nn.LeakyReLU(0.2, inplace=True)]
        ch = base_width
        for i in range(1, n_layers):
            stride = 2 if i < n_layers - 1 else 1
            out_ch = min(ch * 2, base_width * 8)
            layers += [nn.Conv2d(ch, out_ch, 4, stride=stride, padding=1),
                       nn.InstanceNorm2d(out_ch),
                       nn.LeakyReLU(0.2, inplace=True)]
            ch = out_ch
        layers.append(nn.Conv2d(ch, 1, 4, stride=1, padding=1))
        self.model = nn.Sequential(*layers)
        self.apply(init_weights)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.model(x)
