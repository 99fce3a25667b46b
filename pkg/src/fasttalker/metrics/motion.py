"""Frame-level motion metrics: beat consistency, vertex MSE, velocity distance."""

from __future__ import annotations

import numpy as np

from ..errors import MetricError, ShapeError
from .. import dsp

BEAT_SIGMA = 0.1


def beat_consistency(audio_beats, motion_beats,
                     sigma: float = BEAT_SIGMA) -> float:
    """Mean over motion beats of exp(-min_j (t - t_j)^2 / (2 sigma^2))."""
    audio_beats = np.asarray(audio_beats, dtype=np.float64)
    motion_beats = np.asarray(motion_beats, dtype=np.float64)
    if audio_beats.size == 0 or motion_beats.size == 0:
        raise MetricError("beat_consistency needs non-empty beat lists")
    if sigma <= 0.0:
        raise MetricError(f"sigma must be positive, got {sigma}")
    gaps = motion_beats[:, None] - audio_beats[None, :]
    nearest_sq = (gaps ** 2).min(axis=1)
    return float(np.exp(-nearest_sq / (2.0 * sigma ** 2)).mean())


def audio_beats_from_energy(energy,
                            frame_rate: float = dsp.AUDIO_FRAME_RATE):
    """Beat times at strict local maxima of the frame-energy track."""
    energy = np.asarray(energy, dtype=np.float64)
    beats = [i / frame_rate for i in range(1, energy.shape[0] - 1)
             if energy[i] > energy[i - 1] and energy[i] >= energy[i + 1]]
    return np.array(beats)


def motion_beats_from_poses(poses,
                            frame_rate: float = dsp.GESTURE_FRAME_RATE):
    """Beat times at strict local minima of pose speed (L2 of frame deltas)."""
    poses = np.asarray(poses, dtype=np.float64)
    if poses.ndim != 2:
        raise ShapeError("motion_beats_from_poses", "rank", 2, poses.ndim)
    speed = np.linalg.norm(np.diff(poses, axis=0), axis=1)
    beats = [i / frame_rate for i in range(1, speed.shape[0] - 1)
             if speed[i] < speed[i - 1] and speed[i] <= speed[i + 1]]
    return np.array(beats)


def vertex_mse(gen, gt) -> float:
    """Mean squared error between pose arrays of identical shape."""
    gen = np.asarray(gen, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if gen.shape != gt.shape:
        raise ShapeError("vertex_mse", "shape", gt.shape, gen.shape)
    return float(((gen - gt) ** 2).mean())


def lvd(gen, gt) -> float:
    """Mean absolute difference of per-frame velocities (frame deltas)."""
    gen = np.asarray(gen, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if gen.shape != gt.shape:
        raise ShapeError("lvd", "shape", gt.shape, gen.shape)
    if gen.shape[0] < 2:
        raise MetricError("lvd needs at least 2 frames")
    return float(np.abs(np.diff(gen, axis=0) - np.diff(gt, axis=0)).mean())
