"""16-bit PCM mono WAV read/write on float64 signals in [-1, 1]."""

from __future__ import annotations

import wave

import numpy as np

from . import dsp
from .errors import FormatError

PCM16_SCALE = 32767


def write_wav(path, waveform: np.ndarray,
              rate: int = dsp.SAMPLE_RATE) -> None:
    """Clip to [-1, 1], quantize to int16, write mono PCM."""
    waveform = np.asarray(waveform, dtype=np.float64)
    if waveform.ndim != 1:
        raise FormatError(f"waveform must be 1-D, got {waveform.ndim}-D")
    pcm = np.round(np.clip(waveform, -1.0, 1.0) * PCM16_SCALE)
    pcm = pcm.astype(np.int16)
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(rate)
        fh.writeframes(pcm.tobytes())


def read_wav(path) -> tuple[np.ndarray, int]:
    """Returns (float64 samples in [-1, 1], sample rate)."""
    with wave.open(str(path), "rb") as fh:
        if fh.getnchannels() != 1 or fh.getsampwidth() != 2:
            raise FormatError("expected 16-bit mono PCM")
        rate = fh.getframerate()
        raw = fh.readframes(fh.getnframes())
    pcm = np.frombuffer(raw, dtype="<i2")
    return pcm.astype(np.float64) / PCM16_SCALE, rate
