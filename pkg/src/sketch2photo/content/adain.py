"""Adaptive instance normalization.

Features are normalized per channel over their spatial extent and re-scaled
to the reference's per-channel statistics:

    adain(x, ref) = sigma(ref) * (x - mu(x)) / sigma(x) + mu(ref)

With no reference the sentinel statistics sigma=1, mu=0 apply, i.e. the
features are simply normalized. Sigma is the population (biased) standard
deviation with a small epsilon inside the square root.
"""

import torch

EPS = 1e-5


def channel_stats(x: torch.Tensor, eps: float = EPS) -> tuple[torch.Tensor, torch.Tensor]:
    """Per-channel spatial mean and (eps-stabilized, biased) std.

    Accepts C×H×W or N×C×H×W; statistics keep dims for broadcasting.
    """
    if x.dim() < 3:
        raise ValueError(f"expected at least C×H×W features, got shape {tuple(x.shape)}")
    mu = x.mean(dim=(-2, -1), keepdim=True)
    var = x.var(dim=(-2, -1), unbiased=False, keepdim=True)
    return mu, torch.sqrt(var + eps)


def adain(x: torch.Tensor, x_ref: torch.Tensor | None = None,
          eps: float = EPS) -> torch.Tensor:
    """Re-statistic x to x_ref's per-channel mean/std (sentinel 0/1 when None).

    Spatial sizes of x and x_ref may differ; channel counts must match.
    """
    mu, sigma = channel_stats(x, eps)
    normalized = (x - mu) / sigma
    if x_ref is None:
        return normalized
    if x_ref.shape[-3] != x.shape[-3]:
        raise ValueError(
            f"channel mismatch: x has {x.shape[-3]}, reference has {x_ref.shape[-3]}")
    mu_ref, sigma_ref = channel_stats(x_ref, eps)
    return sigma_ref * normalized + mu_ref
