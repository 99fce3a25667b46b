"""Gesture branch: frozen codebook, semantics, rhythm fusion, decoder."""

from .codebook import CODE_DIM, NUM_CODES, POSE_DIM, FrozenGestureDecoder, \
    dequantize, make_codebook, quantize, reconstruct_gesture
from .decoder import GestureLatentDecoder, downsample_frames, loss_gesture
from .fusion import RhythmTranslator, TemporalGate
from .semantics import EMBED_DIM, SemanticTranslator, hash_embedding, \
    words_per_gesture_frame

__all__ = [
    "CODE_DIM", "NUM_CODES", "POSE_DIM", "FrozenGestureDecoder",
    "dequantize", "make_codebook", "quantize", "reconstruct_gesture",
    "GestureLatentDecoder", "downsample_frames", "loss_gesture",
    "RhythmTranslator", "TemporalGate", "EMBED_DIM", "SemanticTranslator",
    "hash_embedding", "words_per_gesture_frame",
]
