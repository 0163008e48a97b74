"""Fréchet distance between feature distributions.

Features come from any injected extractor (a callable mapping a list of
images to an n×d array with an ``identifier`` attribute), so the pretrained
default can be swapped for a deterministic stub. Statistics use the sample
mean and the unbiased (n−1) covariance. The matrix square root is computed
by eigendecomposition of the symmetrized product sqrt(A)·B·sqrt(A); tiny
negative eigenvalues from round-off (> −1e-6) are clipped to zero, anything
more negative is treated as an input error.
"""

from dataclasses import dataclass

import numpy as np

NEGATIVE_EIGENVALUE_TOLERANCE = -1e-6


@dataclass(frozen=True)
class ActivationStats:
    """Gaussian summary of an activation set: mean vector, covariance, count."""

    mean: np.ndarray
    cov: np.ndarray
    n: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        cov = np.atleast_2d(np.asarray(self.cov, dtype=np.float64))
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"covariance shape {cov.shape} does not match "
                             f"mean dimension {mean.size}")
        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise ValueError("non-finite activation statistics")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def activation_stats(images, extractor) -> ActivationStats:
    """Extract features for a set of images and summarize them.

    Needs at least two images for the unbiased covariance to exist.
    """
    features = np.asarray(extractor(list(images)), dtype=np.float64)
    if features.ndim != 2:
        raise ValueError(f"extractor must return an n×d array, got shape {features.shape}")
    n = features.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 images for activation statistics, got {n}")
    if not np.isfinite(features).all():
        raise ValueError("extractor produced non-finite features")
    mean = features.mean(axis=0)
    cov = np.atleast_2d(np.cov(features, rowvar=False))
    return ActivationStats(mean=mean, cov=cov, n=n)


def _clipped_eigenvalues(matrix: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    values, vectors = np.linalg.eigh((matrix + matrix.T) / 2.0)
    if values.min(initial=0.0) < NEGATIVE_EIGENVALUE_TOLERANCE:
        raise ValueError(
            f"{what} has eigenvalue {values.min():.3e} below tolerance "
            f"{NEGATIVE_EIGENVALUE_TOLERANCE}; not a valid covariance")
    return np.clip(values, 0.0, None), vectors


def _psd_sqrt(matrix: np.ndarray, what: str) -> np.ndarray:
    values, vectors = _clipped_eigenvalues(matrix, what)
    return (vectors * np.sqrt(values)) @ vectors.T


def frechet_distance(a: ActivationStats, b: ActivationStats) -> float:
    """‖μ_a − μ_b‖² + Tr(Σ_a + Σ_b − 2·sqrt(Σ_a Σ_b))."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    diff = a.mean - b.mean
    sqrt_a = _psd_sqrt(a.cov, "first covariance")
    inner = sqrt_a @ b.cov @ sqrt_a
    values, _ = _clipped_eigenvalues(inner, "covariance product")
    trace_sqrt = np.sqrt(values).sum()
    fid = float(diff @ diff + np.trace(a.cov) + np.trace(b.cov) - 2.0 * trace_sqrt)
    if not np.isfinite(fid):
        raise ValueError("Fréchet distance is non-finite")
    return fid


def compute_fid(real_images, fake_images, extractor) -> float:
    """End-to-end FID between two image sets under one extractor."""
    real = activation_stats(real_images, extractor)
    fake = activation_stats(fake_images, extractor)
    return frechet_distance(real, fake)
