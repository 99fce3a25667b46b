"""Wall-clock inference benchmark in seconds per generated audio second."""

from __future__ import annotations

import time

import numpy as np

from ..errors import MetricError
from .. import dsp

DEFAULT_SCRIPT = "the quick brown fox jumps over the lazy dog"
MIN_REPEATS = 3


def seconds_per_generated_second(times, audio_seconds: float) -> float:
    """Median measured time over the audio duration it produced."""
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0:
        raise MetricError("no timing measurements")
    if audio_seconds <= 0.0:
        raise MetricError(f"audio duration must be positive, got "
                          f"{audio_seconds}")
    return float(np.median(times) / audio_seconds)


def bench_speed(model, script: str = DEFAULT_SCRIPT,
                repeats: int = 5) -> float:
    """Time model.synthesize(script); one untimed warm-up run first."""
    if repeats < MIN_REPEATS:
        raise MetricError(f"repeats must be >= {MIN_REPEATS}, got {repeats}")
    out = model.synthesize(script)
    audio_seconds = out["waveform"].shape[0] / dsp.SAMPLE_RATE
    times = []
    for _ in range(repeats):
        started = time.perf_counter()
        model.synthesize(script)
        times.append(time.perf_counter() - started)
    return seconds_per_generated_second(times, audio_seconds)
