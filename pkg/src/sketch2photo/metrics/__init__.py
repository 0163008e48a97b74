from .extractors import StubPixelExtractor, inception_pool3_extractor, resnet18_extractor
from .fid import ActivationStats, activation_stats, compute_fid, frechet_distance
from .diversity import DIVERSITY_METRICS, gray_l1_distance, l1_distance, lpips_diversity
from .retrieval import RetrievalResult, cosine_distance, retrieve

__all__ = [
    "StubPixelExtractor",
    "inception_pool3_extractor",
    "resnet18_extractor",
    "ActivationStats",
    "activation_stats",
    "compute_fid",
    "frechet_distance",
    "DIVERSITY_METRICS",
    "gray_l1_distance",
    "l1_distance",
    "lpips_diversity",
    "RetrievalResult",
    "cosine_distance",
    "retrieve",
]
