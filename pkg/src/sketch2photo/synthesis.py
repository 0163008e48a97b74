"""Inference façade over trained checkpoints.

Rebuilds the networks from the architecture recorded in each checkpoint's
config snapshot, loads parameters, and exposes the three user-facing
operations: sketch → grayscale, grayscale → color (optionally
reference-steered), and photo → sketch. The grayscale result depends only on
the sketch and the shape checkpoint, so it is byte-identical across reference
choices.
"""

import numpy as np
import torch

from .checkpoint import file_digest, load_checkpoint
from .config import TrainingConfig
from .content.networks import ContentDecoder, ContentEncoder, enrich
from .data.images import ColorPhoto, GrayscalePhoto, SketchImage, to_grayscale
from .errors import ConfigurationError
from .shape.networks import Generator


def _to_signed(pixels: np.ndarray) -> torch.Tensor:
    t = torch.from_numpy(np.ascontiguousarray(pixels, dtype=np.float32))
    return t[None, None] * 2.0 - 1.0


def _from_signed(tensor: torch.Tensor) -> np.ndarray:
    return ((tensor.detach()[0, 0].numpy() + 1.0) * 0.5).clip(0.0, 1.0)


class SynthesisEngine:
    """Loads shape (and optionally content) checkpoints for inference."""

    def __init__(self, shape_checkpoint, content_checkpoint=None):
        shape_ck = load_checkpoint(shape_checkpoint)
        if shape_ck.stage != "shape":
            raise ConfigurationError(
                f"{shape_checkpoint}: expected a shape-stage checkpoint, "
                f"got stage {shape_ck.stage!r}")
        cfg = TrainingConfig.from_dict(shape_ck.config)
        self.image_size = cfg.data.image_size

        self.t = Generator(1, 1, cfg.shape.base_width, cfg.shape.residual_blocks,
                           attention=True)
        self.t_prime = Generator(1, 1, cfg.shape.base_width, cfg.shape.residual_blocks,
                                 attention=False)
        self.t.load_state_dict(shape_ck.params["t"])
        self.t_prime.load_state_dict(shape_ck.params["t_prime"])
        self.t.eval()
        self.t_prime.eval()
        version = f"shape-e{shape_ck.epoch}-{file_digest(shape_checkpoint)}"

        self.encoder = None
        self.decoder = None
        if content_checkpoint:
            content_ck = load_checkpoint(content_checkpoint)
            if content_ck.stage != "content":
                raise ConfigurationError(
                    f"{content_checkpoint}: expected a content-stage checkpoint, "
                    f"got stage {content_ck.stage!r}")
            ccfg = TrainingConfig.from_dict(content_ck.config).content
            self.encoder = ContentEncoder(ccfg.base_width)
            self.decoder = ContentDecoder(ccfg.base_width, ccfg.residual_blocks)
            self.encoder.load_state_dict(content_ck.params["encoder"])
            self.decoder.load_state_dict(content_ck.params["decoder"])
            self.encoder.eval()
            self.decoder.eval()
            version += f"+content-e{content_ck.epoch}-{file_digest(content_checkpoint)}"
        self.model_version = version

    @property
    def has_content_stage(self) -> bool:
        return self.decoder is not None

    @torch.no_grad()
    def translate_to_grayscale(self, sketch: SketchImage) -> GrayscalePhoto:
        out = self.t(_to_signed(sketch.pixels))
        return GrayscalePhoto(_from_signed(out))

    @torch.no_grad()
    def enrich_grayscale(self, gray: GrayscalePhoto,
                         reference: ColorPhoto | None = None) -> ColorPhoto:
        if not self.has_content_stage:
            raise ConfigurationError(
                "content checkpoint not loaded; colorization unavailable")
        gray_t = torch.from_numpy(gray.pixels.astype(np.float32))[None, None]
        ref_t = None
        if reference is not None:
            ref_t = torch.from_numpy(reference.pixels.astype(np.float32))[None]
        out = enrich(self.encoder, self.decoder, gray_t, ref_t)
        return ColorPhoto(out[0].numpy().clip(0.0, 1.0))

    def synthesize(self, sketch: SketchImage,
                   reference: ColorPhoto | None = None) -> tuple[GrayscalePhoto, ColorPhoto]:
        """Full pipeline: grayscale shape, then reference-aware colorization."""
        gray = self.translate_to_grayscale(sketch)
        return gray, self.enrich_grayscale(gray, reference)

    @torch.no_grad()
    def photo_to_sketch(self, photo: ColorPhoto) -> SketchImage:
        gray = to_grayscale(photo)
        out = self.t_prime(_to_signed(gray.pixels))
        return SketchImage(_from_signed(out))
