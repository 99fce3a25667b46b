"""Distribution-level gesture metrics: Frechet distance and diversity."""

from __future__ import annotations

import numpy as np

from ..errors import MetricError

COV_REGULARIZER = 1e-6


def sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition; negative
    eigenvalues from rounding are clamped to zero."""
    sym = (mat + mat.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    eigvals = np.maximum(eigvals, 0.0)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def frechet_distance(feat_a: np.ndarray, feat_b: np.ndarray) -> float:
    """||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2)) on feature rows.

    Both covariances get + 1e-6 I so singular feature sets stay computable;
    the trace term uses sqrt(s_a) S_b sqrt(s_a), which shares eigenvalues
    with S_a S_b but is symmetric.
    """
    feat_a = np.asarray(feat_a, dtype=np.float64)
    feat_b = np.asarray(feat_b, dtype=np.float64)
    for feat in (feat_a, feat_b):
        if feat.ndim != 2 or feat.shape[0] < 2:
            raise MetricError(
                f"need >= 2 feature rows per side, got shape {feat.shape}")
    if feat_a.shape[1] != feat_b.shape[1]:
        raise MetricError(
            f"feature dims differ: {feat_a.shape[1]} vs {feat_b.shape[1]}")
    dim = feat_a.shape[1]
    mu_a, mu_b = feat_a.mean(axis=0), feat_b.mean(axis=0)
    cov_a = np.cov(feat_a, rowvar=False).reshape(dim, dim) \
        + COV_REGULARIZER * np.eye(dim)
    cov_b = np.cov(feat_b, rowvar=False).reshape(dim, dim) \
        + COV_REGULARIZER * np.eye(dim)
    root_a = sqrtm_psd(cov_a)
    tr_cross = np.trace(sqrtm_psd(root_a @ cov_b @ root_a))
    value = float(((mu_a - mu_b) ** 2).sum() + np.trace(cov_a)
                  + np.trace(cov_b) - 2.0 * tr_cross)
    return max(value, 0.0)


def fgd(gen_clips, gt_clips, extractor) -> float:
    """Frechet gesture distance between generated and reference clip sets."""
    if len(gen_clips) < 2 or len(gt_clips) < 2:
        raise MetricError("fgd needs at least 2 clips per side")
    return frechet_distance(extractor.extract(gen_clips),
                            extractor.extract(gt_clips))


def diversity(clips) -> float:
    """Mean over unordered clip pairs of the mean absolute difference."""
    if len(clips) < 2:
        raise MetricError("diversity needs at least 2 clips")
    arrays = [np.asarray(c, dtype=np.float64) for c in clips]
    shape = arrays[0].shape
    if any(a.shape != shape for a in arrays):
        raise MetricError("diversity clips must share one shape")
    total = 0.0
    pairs = 0
    for i in range(len(arrays)):
        for j in range(i + 1, len(arrays)):
            total += float(np.abs(arrays[i] - arrays[j]).mean())
            pairs += 1
    return total / pairs
