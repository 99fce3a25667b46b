"""Frozen random-projection temporal conv net embedding motion clips.

A stand-in for a pretrained gesture feature network: two causal conv layers
with tanh between, mean-pooled over time to a fixed-width vector. Weights are
drawn once from a named stream and never trained, so distances computed on
these features are stable across runs; absolute values are only meaningful
relative to other numbers from the same extractor seed.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from ..numerics import kernels
from ..rng import stream

FEATURE_DIM = 32
EXTRACTOR_KERNEL = 5


class FeatureExtractor:
    """Maps pose clips (T, pose_dim) to FEATURE_DIM-dim vectors."""

    def __init__(self, seed: int, pose_dim: int = 24,
                 feature_dim: int = FEATURE_DIM):
        rng = stream(seed, "fgd_extractor")
        k = EXTRACTOR_KERNEL
        self.pose_dim = pose_dim
        self.feature_dim = feature_dim
        scale_1 = 1.0 / np.sqrt(pose_dim * k)
        scale_2 = 1.0 / np.sqrt(feature_dim * k)
        self.w1 = rng.normal(size=(feature_dim, pose_dim, k)) * scale_1
        self.w2 = rng.normal(size=(feature_dim, feature_dim, k)) * scale_2
        for w in (self.w1, self.w2):
            w.flags.writeable = False

    def extract_clip(self, clip: np.ndarray) -> np.ndarray:
        """One clip (T, pose_dim) -> (feature_dim,) embedding."""
        clip = np.asarray(clip, dtype=np.float64)
        if clip.ndim != 2 or clip.shape[1] != self.pose_dim:
            raise ShapeError("extract_clip", "pose_dim",
                             self.pose_dim, clip.shape)
        x = np.ascontiguousarray(clip.T)
        k = EXTRACTOR_KERNEL
        h = np.tanh(kernels.conv1d_forward(x, self.w1, 1, 1, k - 1, 0))
        h = np.tanh(kernels.conv1d_forward(
            np.ascontiguousarray(h), self.w2, 1, 1, k - 1, 0))
        return h.mean(axis=1)

    def extract(self, clips) -> np.ndarray:
        """Stack of embeddings (n_clips, feature_dim)."""
        return np.stack([self.extract_clip(c) for c in clips])
