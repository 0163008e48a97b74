"""Unsupervised sketch-to-photo synthesis.

Two independently trained stages: shape translation turns a free-hand sketch
into a grayscale photo (and back), content enrichment colorizes the grayscale
result, optionally steered by a reference photo.
"""

__version__ = "0.1.0"
