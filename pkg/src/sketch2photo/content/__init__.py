from .adain import adain, channel_stats
from .colorspace import rgb_to_lab, rgb_to_lab_array
from .networks import ContentDecoder, ContentEncoder, enrich
from .losses import (
    VggStyleExtractor,
    content_reconstruction_loss,
    intensity_loss,
    style_loss,
)
from .trainer import ContentLossReport, ContentTrainer

__all__ = [
    "adain",
    "channel_stats",
    "rgb_to_lab",
    "rgb_to_lab_array",
    "ContentDecoder",
    "ContentEncoder",
    "enrich",
    "VggStyleExtractor",
    "content_reconstruction_loss",
    "intensity_loss",
    "style_loss",
    "ContentLossReport",
    "ContentTrainer",
]
