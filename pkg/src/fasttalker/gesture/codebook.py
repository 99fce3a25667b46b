"""Frozen gesture codebook and the frozen toy pose decoder.

Both are generated from named seed streams at init and never trained: they
are plain numpy arrays, invisible to optimizers, bit-identical per seed.
"""

import numpy as np

from ..errors import MetricError, ShapeError
from ..numerics.kernels import conv1d_forward
from ..rng import stream

NUM_CODES = 256
CODE_DIM = 256
POSE_DIM = 24


def make_codebook(seed: int) -> np.ndarray:
    """Frozen code table (256, 256); min pairwise L2 gap checked > 1e-6."""
    rng = stream(seed, "codebook")
    c = rng.normal(size=(NUM_CODES, CODE_DIM))
    sq = (c * c).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (c @ c.T)
    np.fill_diagonal(d2, np.inf)
    if d2.min() <= 1e-12:  # (1e-6)^2 on squared distances
        raise MetricError("codebook rows are not pairwise distinct")
    c.flags.writeable = False
    return c


def quantize(latent: np.ndarray, codebook: np.ndarray) -> np.ndarray:
    """Nearest codebook row per frame by L2; ties take the lowest index."""
    latent = np.asarray(latent, dtype=np.float64)
    if latent.ndim != 2 or latent.shape[1] != codebook.shape[1]:
        raise ShapeError("quantize", "latent", ("T_g", codebook.shape[1]),
                         tuple(latent.shape))
    sq = (codebook * codebook).sum(axis=1)
    d2 = sq[None, :] - 2.0 * (latent @ codebook.T)  # ||l||^2 omitted: constant per row
    return np.argmin(d2, axis=1).astype(np.int64)


def dequantize(indices, codebook: np.ndarray) -> np.ndarray:
    """Code rows for each index, shape (T_g, code_dim)."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= len(codebook)):
        raise ShapeError("dequantize", "index", f"< {len(codebook)}",
                         int(indices.max()))
    return codebook[indices]


class FrozenGestureDecoder:
    """Immutable 2-layer conv net mapping code rows to poses (T_g, 24)."""

    def __init__(self, seed: int, hidden: int = 64, pose_dim: int = POSE_DIM):
        rng = stream(seed, "gesture_decoder")
        self.pose_dim = pose_dim
        k1 = 1.0 / np.sqrt(CODE_DIM * 3)
        k2 = 1.0 / np.sqrt(hidden * 3)
        self.w1 = rng.uniform(-k1, k1, size=(hidden, CODE_DIM, 3))
        self.b1 = rng.uniform(-k1, k1, size=hidden)
        self.w2 = rng.uniform(-k2, k2, size=(pose_dim, hidden, 3))
        self.b2 = rng.uniform(-k2, k2, size=pose_dim)
        for arr in (self.w1, self.b1, self.w2, self.b2):
            arr.flags.writeable = False

    def _conv(self, x, w, b):
        y = conv1d_forward(x, w, groups=1, dilation=1, pad_left=2, pad_right=0)
        return y + b[:, None]

    def decode(self, code_rows: np.ndarray) -> np.ndarray:
        """(T_g, code_dim) -> (T_g, pose_dim), causal and deterministic."""
        x = np.ascontiguousarray(np.asarray(code_rows, dtype=np.float64).T)
        h = np.tanh(self._conv(x, self.w1, self.b1))
        return self._conv(h, self.w2, self.b2).T

    def state_hash(self) -> str:
        """Stable digest of the frozen weights, for immutability checks."""
        import hashlib
        digest = hashlib.sha256()
        for arr in (self.w1, self.b1, self.w2, self.b2):
            digest.update(arr.tobytes())
        return digest.hexdigest()


def reconstruct_gesture(indices, codebook: np.ndarray,
                        decoder: FrozenGestureDecoder) -> np.ndarray:
    """Indices -> pose trajectory (T_g, pose_dim) through frozen components."""
    return decoder.decode(dequantize(indices, codebook))
