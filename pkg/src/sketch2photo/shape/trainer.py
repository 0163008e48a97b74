"""Training loop for the shape-translation stage.

Each step consumes one unpaired (sketch, grayscale photo) pair where the
sketch carries a seeded augmentation tag. Clean batches use the full
bidirectional cycle; noise-composed batches swap the sketch-side cycle for the
denoising reconstruction of the clean original. One joint generator update is
followed by one update per discriminator, with a history buffer of past fakes.
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
from ..data.images import GrayscalePhoto, SketchImage
from ..data.noise import NoiseMaskPool, TAG_CLEAN, build_noise_mask_pool, sample_noise_sketch
from ..errors import DataError, TrainingDivergedError
from .losses import ImageBuffer
from .networks import Generator, PatchDiscriminator

logger = logging.getLogger(__name__)

SHAPE_LOSS_LOG = "shape_losses.csv"
_LOG_HEADER = "step,adv_t,adv_t_prime,cycle,identity,self_supervised,total,lr\n"


def lr_schedule(epoch: int, total_epochs: int, base_lr: float,
                constant_epochs: int = 100) -> float:
    """Constant for the first ``constant_epochs`` epochs, then linear to zero.

    Epochs are 1-indexed; the final epoch trains at exactly 0. Runs shorter
    than the constant horizon stay at ``base_lr`` throughout.
    """
    if epoch < 1 or epoch > total_epochs:
        raise ValueError(f"epoch {epoch} outside [1, {total_epochs}]")
    if total_epochs <= constant_epochs or epoch <= constant_epochs:
        return base_lr
    return base_lr * (total_epochs - epoch) / (total_epochs - constant_epochs)


@dataclass(frozen=True)
class ShapeBatch:
    """One training item: composed sketch, its clean original, tag, photo."""

    sketch: SketchImage
    clean: SketchImage
    tag: str
    gray: GrayscalePhoto


@dataclass(frozen=True)
class ShapeLossReport:
    adv_t: float
    adv_t_prime: float
    cycle: float
    identity: float
    self_supervised: float
    total: float

    def as_csv_row(self, step: int, lr: float) -> str:
        vals = [self.adv_t, self.adv_t_prime, self.cycle, self.identity,
                self.self_supervised, self.total, lr]
        return f"{step}," + ",".join(f"{v:.10g}" for v in vals) + "\n"


def _l1(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    return (a - b).abs().mean()


class ShapeTrainer:
    """Owns the four shape-stage networks, their optimizers and sampling state."""

    def __init__(self, dataset: UnpairedDataset, config: TrainingConfig,
                 pool: NoiseMaskPool | None = None, device: str = "cpu"):
        config.validate()
        self.dataset = dataset
        self.config = config
        self.device = torch.device(device)
        cfg = config.shape

        torch.manual_seed(config.seed)
        self.t = Generator(1, 1, cfg.base_width, cfg.residual_blocks, attention=True)
        self.t_prime = Generator(1, 1, cfg.base_width, cfg.residual_blocks, attention=False)
        self.d_g = PatchDiscriminator(1, cfg.disc_width, cfg.disc_layers)
        self.d_s = PatchDiscriminator(1, cfg.disc_width, cfg.disc_layers)
        for net in (self.t, self.t_prime, self.d_g, self.d_s):
            net.to(self.device)

        betas = (cfg.adam_beta1, cfg.adam_beta2)
        gen_params = list(self.t.parameters()) + list(self.t_prime.parameters())
        self.opt_g = optim.Adam(gen_params, lr=cfg.base_lr, betas=betas)
        self.opt_dg = optim.Adam(self.d_g.parameters(), lr=cfg.base_lr, betas=betas)
        self.opt_ds = optim.Adam(self.d_s.parameters(), lr=cfg.base_lr, betas=betas)

        self.rng = np.random.default_rng(config.seed)
        self.pool = pool if pool is not None else self._build_pool()
        self.buffer_g = ImageBuffer(cfg.buffer_size)
        self.buffer_s = ImageBuffer(cfg.buffer_size)

        self.step_count = 0
        self.epoch = 0
        self.lr = cfg.base_lr
        self.snapshot_dir: str | None = None

    def _build_pool(self) -> NoiseMaskPool:
        d = self.config.data
        try:
            return build_noise_mask_pool(
                self.dataset.sketches,
                crop_size=d.mask_crop_size,
                density_threshold=d.mask_density_threshold,
                pool_size=d.mask_pool_size,
                seed=d.seed,
            )
        except DataError as exc:
            logger.warning("noise-mask pool unavailable (%s); complex "
                           "augmentation will fall back to clean", exc)
            return NoiseMaskPool.empty(d.mask_crop_size, d.mask_density_threshold, d.seed)

    # ------------------------------------------------------------------ data

    def _to_tensor(self, pixels: np.ndarray) -> torch.Tensor:
        """[0,1] H×W array to a 1×1×H×W tensor in [-1, 1]."""
        t = torch.from_numpy(np.ascontiguousarray(pixels, dtype=np.float32))
        return (t[None, None] * 2.0 - 1.0).to(self.device)

    def sample_batch(self) -> ShapeBatch:
        ds = self.dataset
        d = self.config.data
        i = int(self.rng.integers(0, ds.n_sketches))
        j = int(self.rng.integers(0, ds.n_photos))
        sketch = ds.sketches[i]
        donors = [s for k, s in enumerate(ds.sketches) if k != i]
        composed, tag = sample_noise_sketch(
            sketch, self.pool, donors,
            p_complex=d.p_complex, p_distractive=d.p_distractive,
            patch_size=d.patch_size, rng=self.rng,
        )
        return ShapeBatch(sketch=composed, clean=sketch, tag=tag, gray=ds.grayscales[j])

    # ----------------------------------------------------------------- steps

    def set_lr(self, lr: float) -> None:
        self.lr = lr
        for opt in (self.opt_g, self.opt_dg, self.opt_ds):
            for group in opt.param_groups:
                group["lr"] = lr

    def train_step(self, batch: ShapeBatch) -> ShapeLossReport:
        cfg = self.config.shape
        s_in = self._to_tensor(batch.sketch.pixels)
        s_clean = self._to_tensor(batch.clean.pixels)
        g = self._to_tensor(batch.gray.pixels)

        # Joint generator update (both directions plus the attention head).
        self.opt_g.zero_grad(set_to_none=True)
        fake_g = self.t(s_in)
        rec_s = self.t_prime(fake_g)
        fake_s = self.t_prime(g)
        rec_g = self.t(fake_s)

        adv_t = ((self.d_g(fake_g) - 1.0) ** 2).mean()
        adv_tp = ((self.d_s(fake_s) - 1.0) ** 2).mean()
        identity = _l1(s_clean, self.t_prime(s_clean)) + _l1(g, self.t(g))
        if batch.tag == TAG_CLEAN:
            cycle = _l1(s_in, rec_s) + _l1(g, rec_g)
            self_sup = fake_g.new_zeros(())
        else:
            cycle = _l1(g, rec_g)
            self_sup = _l1(s_clean, rec_s)

        total = (cfg.lambda_adv * (adv_t + adv_tp)
                 + cfg.lambda_cycle * cycle
                 + cfg.lambda_identity * identity
                 + self_sup)
        report = ShapeLossReport(
            adv_t=adv_t.item(), adv_t_prime=adv_tp.item(), cycle=cycle.item(),
            identity=identity.item(), self_supervised=self_sup.item(),
            total=total.item(),
        )
        if not math.isfinite(report.total):
            self._abort_diverged(report)
        total.backward()
        self.opt_g.step()

        # Discriminator updates against (possibly historical) fakes.
        self.opt_dg.zero_grad(set_to_none=True)
        hist_g = self.buffer_g.query(fake_g.detach(), self.rng)
        loss_dg = (((self.d_g(g) - 1.0) ** 2).mean()
                   + (self.d_g(hist_g) ** 2).mean())
        loss_dg.backward()
        self.opt_dg.step()

        self.opt_ds.zero_grad(set_to_none=True)
        hist_s = self.buffer_s.query(fake_s.detach(), self.rng)
        loss_ds = (((self.d_s(s_in) - 1.0) ** 2).mean()
                   + (self.d_s(hist_s) ** 2).mean())
        loss_ds.backward()
        self.opt_ds.step()

        if not (math.isfinite(loss_dg.item()) and math.isfinite(loss_ds.item())):
            self._abort_diverged(report)

        self.step_count += 1
        return report

    def _abort_diverged(self, report: ShapeLossReport) -> None:
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

    def run(self, out_dir=None, max_steps: int | None = None) -> list[ShapeLossReport]:
        """Train for config.shape.epochs epochs (or stop after max_steps)."""
        cfg = self.config.shape
        log_fh = None
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            self.snapshot_dir = os.fspath(out_dir)
            log_path = os.path.join(os.fspath(out_dir), SHAPE_LOSS_LOG)
            write_header = not os.path.exists(log_path)
            log_fh = open(log_path, "a", encoding="utf-8")
            if write_header:
                log_fh.write(_LOG_HEADER)
        steps_per_epoch = max(self.dataset.n_sketches, self.dataset.n_photos)
        reports: list[ShapeLossReport] = []
        try:
            for epoch in range(self.epoch + 1, cfg.epochs + 1):
                self.epoch = epoch
                self.set_lr(lr_schedule(epoch, cfg.epochs, cfg.base_lr,
                                        cfg.lr_constant_epochs))
                for _ in range(steps_per_epoch):
                    report = self.train_step(self.sample_batch())
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
            stage="shape",
            epoch=self.epoch,
            params={
                "t": self.t.state_dict(),
                "t_prime": self.t_prime.state_dict(),
                "d_g": self.d_g.state_dict(),
                "d_s": self.d_s.state_dict(),
                "opt_g": self.opt_g.state_dict(),
                "opt_dg": self.opt_dg.state_dict(),
                "opt_ds": self.opt_ds.state_dict(),
            },
            config=self.config.to_dict(),
            rng_state={
                "numpy": self.rng.bit_generator.state,
                "torch": torch.get_rng_state(),
            },
        )
