"""Training loop for the content-enrichment stage.

Each step colorizes the grayscale rendition of one photo. With a seeded small
probability a random reference photo steers the AdaIN statistics, activating
the style and feature-reconstruction terms; otherwise the sentinel statistics
apply and those two terms are zero. The discriminator sees random real photos
versus decoded outputs.
"""

import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import torch
from torch import optim

from ..config import TrainingConfig
from ..data.dataset import UnpairedDataset
from ..errors import ConfigurationError, TrainingDivergedError
from ..shape.losses import ImageBuffer
from ..shape.networks import PatchDiscriminator
from .adain import adain
from .losses import VggStyleExtractor, intensity_loss, style_loss
from .networks import ContentDecoder, ContentEncoder

logger = logging.getLogger(__name__)

CONTENT_LOSS_LOG = "content_losses.csv"
_LOG_HEADER = "step,adversarial,intensity,style,content,total,lr\n"


@dataclass(frozen=True)
class ContentLossReport:
    adversarial: float
    intensity: float
    style: float
    content: float
    total: float

    def as_csv_row(self, step: int, lr: float) -> str:
        vals = [self.adversarial, self.intensity, self.style, self.content,
                self.total, lr]
        return f"{step}," + ",".join(f"{v:.10g}" for v in vals) + "\n"


class ContentTrainer:
    """Owns encoder, decoder and photo discriminator plus sampling state."""

    def __init__(self, dataset: UnpairedDataset, config: TrainingConfig,
                 style_extractor=None, device: str = "cpu"):
        config.validate()
        self.dataset = dataset
        self.config = config
        self.device = torch.device(device)
        cfg = config.content

        torch.manual_seed(config.seed)
        self.encoder = ContentEncoder(cfg.base_width).to(self.device)
        self.decoder = ContentDecoder(cfg.base_width, cfg.residual_blocks).to(self.device)
        self.d_i = PatchDiscriminator(3, cfg.disc_width, cfg.disc_layers).to(self.device)

        betas = (cfg.adam_beta1, cfg.adam_beta2)
        gen_params = list(self.encoder.parameters()) + list(self.decoder.parameters())
        self.opt_g = optim.Adam(gen_params, lr=cfg.base_lr, betas=betas)
        self.opt_d = optim.Adam(self.d_i.parameters(), lr=cfg.base_lr, betas=betas)

        if style_extractor is None and cfg.style_extractor_weights:
            style_extractor = VggStyleExtractor(cfg.style_extractor_weights, device)
        self.style_extractor = style_extractor
        if self.style_extractor is None and cfg.p_reference > 0:
            logger.warning(
                "no style extractor available: reference-mode training disabled "
                "(p_reference %.2f ignored); inference with references still works",
                cfg.p_reference)

        self.rng = np.random.default_rng(config.seed)
        self.buffer = ImageBuffer(cfg.buffer_size)
        self.step_count = 0
        self.epoch = 0
        self.lr = cfg.base_lr
        self.snapshot_dir: str | None = None

    # ------------------------------------------------------------------ data

    def _gray_tensor(self, pixels: np.ndarray) -> torch.Tensor:
        t = torch.from_numpy(np.ascontiguousarray(pixels, dtype=np.float32))
        return t[None, None].to(self.device)

    def _photo_tensor(self, pixels: np.ndarray) -> torch.Tensor:
        t = torch.from_numpy(np.ascontiguousarray(pixels, dtype=np.float32))
        return t[None].to(self.device)

    def sample_batch(self):
        """(grayscale input, random real photo, optional reference photo)."""
        ds = self.dataset
        cfg = self.config.content
        i = int(self.rng.integers(0, ds.n_photos))
        j = int(self.rng.integers(0, ds.n_photos))
        gray = self._gray_tensor(ds.grayscales[i].pixels)
        real = self._photo_tensor(ds.photos[j].pixels)
        reference = None
        use_reference = self.rng.random() < cfg.p_reference
        if use_reference and self.style_extractor is not None:
            k = int(self.rng.integers(0, ds.n_photos))
            reference = self._photo_tensor(ds.photos[k].pixels)
        return gray, real, reference

    # ----------------------------------------------------------------- steps

    def set_lr(self, lr: float) -> None:
        self.lr = lr
        for opt in (self.opt_g, self.opt_d):
            for group in opt.param_groups:
                group["lr"] = lr

    def train_step(self, gray: torch.Tensor, real: torch.Tensor,
                   reference: torch.Tensor | None = None) -> ContentLossReport:
        cfg = self.config.content
        if reference is not None and self.style_extractor is None:
            raise ConfigurationError(
                "reference-mode training requires a style extractor")

        self.opt_g.zero_grad(set_to_none=True)
        features = self.encoder(gray)
        ref_features = self.encoder(reference) if reference is not None else None
        t = adain(features, ref_features)
        output = self.decoder(t)

        adversarial = ((self.d_i(output * 2.0 - 1.0) - 1.0) ** 2).mean()
        intensity = intensity_loss(gray, output)
        if reference is not None:
            style = style_loss(output, reference, self.style_extractor)
            content = (self.encoder(output) - t).abs().mean()
        else:
            style = output.new_zeros(())
            content = output.new_zeros(())

        total = (cfg.lambda_adv * adversarial
                 + cfg.lambda_intensity * intensity
                 + cfg.lambda_style * style
                 + cfg.lambda_content * content)
        report = ContentLossReport(
            adversarial=adversarial.item(), intensity=intensity.item(),
            style=style.item(), content=content.item(), total=total.item(),
        )
        if not math.isfinite(report.total):
            self._abort_diverged(report)
        total.backward()
        self.opt_g.step()

        self.opt_d.zero_grad(set_to_none=True)
        hist_fake = self.buffer.query((output * 2.0 - 1.0).detach(), self.rng)
        loss_d = (((self.d_i(real * 2.0 - 1.0) - 1.0) ** 2).mean()
                  + (self.d_i(hist_fake) ** 2).mean())
        loss_d.backward()
        self.opt_d.step()
        if not math.isfinite(loss_d.item()):
            self._abort_diverged(report)

        self.step_count += 1
        return report

    def _abort_diverged(self, report: ContentLossReport) -> None:
        snapshot = None
        if self.snapshot_dir:
            from ..checkpoint import save_checkpoint
            snapshot = os.path.join(self.snapshot_dir, "diverged_snapshot.ckpt")
            try:
                save_checkpoint(self.make_checkpoint(), snapshot)
            except OSError:
                snapshot = None
        raise TrainingDivergedError(
            f"non-finite loss at step {self.step_count + 1}: {report}"
            + (f" (snapshot: {snapshot})" if snapshot else ""))

    # ------------------------------------------------------------------ runs

    def run(self, out_dir=None, max_steps: int | None = None) -> list[ContentLossReport]:
        from ..shape.trainer import lr_schedule

        cfg = self.config.content
        log_fh = None
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            self.snapshot_dir = os.fspath(out_dir)
            log_path = os.path.join(os.fspath(out_dir), CONTENT_LOSS_LOG)
            write_header = not os.path.exists(log_path)
            log_fh = open(log_path, "a", encoding="utf-8")
            if write_header:
                log_fh.write(_LOG_HEADER)
        steps_per_epoch = self.dataset.n_photos
        reports: list[ContentLossReport] = []
        try:
            for epoch in range(self.epoch + 1, cfg.epochs + 1):
                self.epoch = epoch
                self.set_lr(lr_schedule(epoch, cfg.epochs, cfg.base_lr,
                                        cfg.lr_constant_epochs))
                for _ in range(steps_per_epoch):
                    gray, real, reference = self.sample_batch()
                    report = self.train_step(gray, real, reference)
                    reports.append(report)
                    if log_fh is not None:
                        log_fh.write(report.as_csv_row(self.step_count, self.lr))
                    if max_steps is not None and len(reports) >= max_steps:
                        return reports
        finally:
            if log_fh is not None:
                log_fh.close()
        return reports

    # ----------------------------------------------------------- persistence

    def make_checkpoint(self):
        from ..checkpoint import Checkpoint
        return Checkpoint(
            stage="content",
            epoch=self.epoch,
            params={
                "encoder": self.encoder.state_dict(),
                "decoder": self.decoder.state_dict(),
                "d_i": self.d_i.state_dict(),
                "opt_g": self.opt_g.state_dict(),
                "opt_d": self.opt_d.state_dict(),
            },
            config=self.config.to_dict(),
            rng_state={
                "numpy": self.rng.bit_generator.state,
                "torch": torch.get_rng_state(),
            },
        )
