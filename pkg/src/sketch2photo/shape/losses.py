"""Loss terms for the shape-translation stage.

Least-squares adversarial convention: the discriminator drives real samples
toward 1 and fakes toward 0; generators drive their fakes toward 1. The
reconstruction-style terms are plain L1 means. ``t`` maps sketch→grayscale,
``t_prime`` maps grayscale→sketch; both arguments are callables so tests can
substitute stubs.
"""

import torch

from ..data.noise import TAG_CLEAN


def _l1(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    return (a - b).abs().mean()


def lsgan_discriminator_loss(disc, real: torch.Tensor, fake: torch.Tensor) -> torch.Tensor:
    """mean (D(real) − 1)² + mean D(fake)²."""
    real_score = disc(real)
    fake_score = disc(fake)
    return ((real_score - 1.0) ** 2).mean() + (fake_score ** 2).mean()


def lsgan_generator_loss(disc, fake: torch.Tensor) -> torch.Tensor:
    """mean (D(fake) − 1)²."""
    return ((disc(fake) - 1.0) ** 2).mean()


def cycle_loss(t, t_prime, sketch: torch.Tensor, gray: torch.Tensor) -> torch.Tensor:
    """L1 round trips in both directions: S→G→S and G→S→G."""
    return _l1(sketch, t_prime(t(sketch))) + _l1(gray, t(t_prime(gray)))


def identity_loss(t, t_prime, sketch: torch.Tensor, gray: torch.Tensor) -> torch.Tensor:
    """Each generator should leave an image of its *output* domain unchanged."""
    return _l1(sketch, t_prime(sketch)) + _l1(gray, t(gray))


def self_supervised_loss(t, t_prime, clean: torch.Tensor, noisy: torch.Tensor,
                         tag: str | None = None) -> torch.Tensor:
    """Denoising round trip: reconstruct the clean sketch from the composed one.

    mean |clean − T′(T(noisy))|. Only meaningful for noise-composed inputs;
    passing tag='clean' is a dispatch bug upstream and raises.
    """
    if tag == TAG_CLEAN:
        raise ValueError("self-supervised loss is undefined for clean batches; "
                         "use cycle_loss")
    return _l1(clean, t_prime(t(noisy)))


class ImageBuffer:
    """History of generated images for discriminator updates.

    With probability 0.5 a query returns a stored past fake (and stores the
    new one in its place); otherwise it returns the new fake unchanged.
    size=0 disables the history. Draws come from the caller's seeded
    generator so training stays reproducible.
    """

    def __init__(self, size: int = 50):
        if size < 0:
            raise ValueError("buffer size must be >= 0")
        self.size = size
        self._images: list[torch.Tensor] = []

    def __len__(self) -> int:
        return len(self._images)

    def query(self, fake: torch.Tensor, rng) -> torch.Tensor:
        if self.size == 0:
            return fake
        fake = fake.detach()
        if len(self._images) < self.size:
            self._images.append(fake.clone())
            return fake
        if rng.random() < 0.5:
            idx = int(rng.integers(0, self.size))
            stored = self._images[idx]
            self._images[idx] = fake.clone()
            return stored
        return fake
