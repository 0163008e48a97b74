from .networks import AttentionHead, Generator, PatchDiscriminator, apply_attention
from .losses import (
    ImageBuffer,
    cycle_loss,
    identity_loss,
    lsgan_discriminator_loss,
    lsgan_generator_loss,
    self_supervised_loss,
)
from .trainer import ShapeBatch, ShapeLossReport, ShapeTrainer, lr_schedule

__all__ = [
    "AttentionHead",
    "Generator",
    "PatchDiscriminator",
    "apply_attention",
    "ImageBuffer",
    "cycle_loss",
    "identity_loss",
    "lsgan_discriminator_loss",
    "lsgan_generator_loss",
    "self_supervised_loss",
    "ShapeBatch",
    "ShapeLossReport",
    "ShapeTrainer",
    "lr_schedule",
]
