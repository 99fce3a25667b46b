"""Reward aggregation and EMA baseline for architecture search.

R = alpha / max(fgd, 1e-6) + utmos_proxy + beta / params. The normalizers
alpha and beta default to 5x the median of the respective component over 16
uniformly sampled architectures, so each term starts near the [0, 5] range
of the quality proxy; both are logged per run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SearchError, ShapeError

FGD_FLOOR = 1e-6
UTMOS_CEILING = 5.0
UTMOS_CLAMP = 4.0
CALIBRATION_SAMPLES = 16
CALIBRATION_SCALE = 5.0


@dataclass(frozen=True)
class RewardRecord:
    """One candidate's reward and the pieces it was computed from."""

    reward: float
    fgd: float
    utmos_proxy: float
    params: int
    alpha: float
    beta: float

    def components(self) -> dict:
        return {"fgd": self.fgd, "utmos_proxy": self.utmos_proxy,
                "params": self.params}


def utmos_proxy(mel_hat: np.ndarray, mel_gt: np.ndarray) -> float:
    """Quality proxy in [1, 5]: 5 minus clamped mean per-frame log-mel L2."""
    mel_hat = np.asarray(mel_hat, dtype=np.float64)
    mel_gt = np.asarray(mel_gt, dtype=np.float64)
    if mel_hat.shape != mel_gt.shape or mel_hat.ndim != 2:
        raise ShapeError("utmos_proxy", "mel", mel_gt.shape, mel_hat.shape)
    distortion = float(np.linalg.norm(mel_hat - mel_gt, axis=0).mean())
    return UTMOS_CEILING - min(max(distortion, 0.0), UTMOS_CLAMP)


def compute_reward(fgd: float, utmos: float, params: int,
                   alpha: float, beta: float) -> RewardRecord:
    """Aggregate metric components into the scalar search reward."""
    if fgd < 0.0:
        raise SearchError(f"fgd must be >= 0, got {fgd}")
    if params <= 0:
        raise SearchError(f"params must be > 0, got {params}")
    reward = alpha / max(float(fgd), FGD_FLOOR) + float(utmos) \
        + beta / float(params)
    if not np.isfinite(reward):
        raise SearchError(f"non-finite reward {reward}")
    return RewardRecord(reward=float(reward), fgd=float(fgd),
                        utmos_proxy=float(utmos), params=int(params),
                        alpha=float(alpha), beta=float(beta))


def baseline_update(baseline: float, rewards, gamma: float) -> float:
    """Exponential moving average: b' = gamma*b + (1-gamma)*mean(rewards)."""
    if not 0.0 <= gamma < 1.0:
        raise SearchError(f"gamma must lie in [0, 1), got {gamma}")
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.size == 0:
        raise SearchError("baseline_update needs at least one reward")
    return gamma * float(baseline) + (1.0 - gamma) * float(rewards.mean())


def calibrate_normalizers(fgds, params_list,
                          scale: float = CALIBRATION_SCALE):
    """(alpha, beta) = scale x median of measured FGDs / parameter counts."""
    fgds = np.asarray(fgds, dtype=np.float64)
    params = np.asarray(params_list, dtype=np.float64)
    if fgds.size == 0 or params.size == 0:
        raise SearchError("calibration needs at least one measurement")
    return scale * float(np.median(fgds)), scale * float(np.median(params))
