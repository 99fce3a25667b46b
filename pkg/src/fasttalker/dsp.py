"""Signal-side feature extraction: STFT magnitudes, frame energy, log-mel
spectrograms, and a wavelet transform pair for pitch-contour targets.

Conventions used throughout the package:
  * sample rate 16 kHz, hop 160 samples (100 feature frames per second)
  * frames start at t*hop and are zero-padded on the right, so a signal of
    length m*hop always yields exactly m frames
  * magnitude spectra (not power) feed both the mel filterbank and energy
"""

from functools import lru_cache

import numpy as np

from .errors import ShapeError
from .numerics import Tensor, as_tensor, mul, pad1d, rfft_magnitude, take_flat

SAMPLE_RATE = 16000
HOP_LENGTH = 160
AUDIO_FRAME_RATE = SAMPLE_RATE // HOP_LENGTH  # 100 frames per second
GESTURE_FRAME_RATE = 30
N_MELS = 80
MEL_WIN = 320
MEL_FFT = 512
ENERGY_WIN = 512
NUM_PITCH_SCALES = 10
LOG_MEL_FLOOR = 1e-5


def hann_window(length: int) -> np.ndarray:
    """Periodic Hann window of the given length, shape (length,)."""
    if length < 1:
        raise ShapeError("hann_window", "length", ">= 1", length)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length)


def frame_count(n_samples: int, hop: int) -> int:
    """Number of frames covering n_samples with the given hop (ceil)."""
    if n_samples < 1:
        raise ShapeError("frame_count", "n_samples", ">= 1", n_samples)
    return -(-n_samples // hop)


def stft_magnitude(x: np.ndarray, fft_size: int, hop: int,
                   win_length: int | None = None) -> np.ndarray:
    """Magnitude spectrogram, shape (n_frames, fft_size//2+1).

    Frames start at t*hop, carry a periodic Hann window of win_length
    (default fft_size), and are right-padded with zeros up to fft_size.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError("stft_magnitude", "ndim", 1, x.ndim)
    win = fft_size if win_length is None else win_length
    if win > fft_size:
        raise ShapeError("stft_magnitude", "win_length", f"<= {fft_size}", win)
    n_frames = frame_count(x.shape[0], hop)
    pad_to = max(x.shape[0], (n_frames - 1) * hop + win)
    xp = np.pad(x, (0, pad_to - x.shape[0]))
    starts = np.arange(n_frames) * hop
    frames = xp[starts[:, None] + np.arange(win)[None, :]] * hann_window(win)
    return np.abs(np.fft.rfft(frames, n=fft_size, axis=-1))


def stft_magnitude_tensor(x: Tensor, fft_size: int, hop: int,
                          win_length: int | None = None) -> Tensor:
    """Differentiable stft_magnitude for a 1-D tensor, (n_frames, bins)."""
    x = as_tensor(x)
    if x.data.ndim != 1:
        raise ShapeError("stft_magnitude", "ndim", 1, x.data.ndim)
    win = fft_size if win_length is None else win_length
    if win > fft_size:
        raise ShapeError("stft_magnitude", "win_length", f"<= {fft_size}", win)
    n = x.data.shape[0]
    n_frames = frame_count(n, hop)
    pad_to = max(n, (n_frames - 1) * hop + win)
    xp = pad1d(x, 0, pad_to - n + 1)  # one sentinel zero at index pad_to
    idx = np.full((n_frames, fft_size), pad_to, dtype=np.int64)
    idx[:, :win] = np.arange(n_frames)[:, None] * hop + np.arange(win)
    window = np.zeros(fft_size)
    window[:win] = hann_window(win)
    return rfft_magnitude(mul(take_flat(xp, idx), Tensor(window)))


def frame_energy(x: np.ndarray, win: int = ENERGY_WIN,
                 hop: int = HOP_LENGTH) -> np.ndarray:
    """Per-frame L2 norm of the magnitude spectrum, shape (n_frames,)."""
    mag = stft_magnitude(x, win, hop)
    return np.sqrt((mag * mag).sum(axis=-1))


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=8)
def mel_filterbank(n_mels: int = N_MELS, fft_size: int = MEL_FFT,
                   sample_rate: int = SAMPLE_RATE, fmin: float = 0.0,
                   fmax: float | None = None) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mels, fft_size//2+1)."""
    fmax = sample_rate / 2.0 if fmax is None else fmax
    mel_pts = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
    hz_pts = mel_to_hz(mel_pts)
    freqs = np.fft.rfftfreq(fft_size, d=1.0 / sample_rate)
    left, center, right = hz_pts[:-2, None], hz_pts[1:-1, None], hz_pts[2:, None]
    up = (freqs[None, :] - left) / np.maximum(center - left, 1e-12)
    down = (right - freqs[None, :]) / np.maximum(right - center, 1e-12)
    fb = np.maximum(0.0, np.minimum(up, down))
    fb.flags.writeable = False
    return fb


def log_mel_spectrogram(x: np.ndarray, n_mels: int = N_MELS,
                        fft_size: int = MEL_FFT, win: int = MEL_WIN,
                        hop: int = HOP_LENGTH) -> np.ndarray:
    """Log-mel spectrogram of a waveform, shape (n_mels, n_frames)."""
    mag = stft_magnitude(x, fft_size, hop, win_length=win)
    mel = mel_filterbank(n_mels, fft_size) @ mag.T
    return np.log(mel + LOG_MEL_FLOOR)


@lru_cache(maxsize=4)
def mexican_hat_bank(num_scales: int = NUM_PITCH_SCALES) -> tuple:
    """Zero-mean, unit-L2 Mexican-hat kernels at dyadic scales 2^0..2^(K-1)."""
    bank = []
    for j in range(num_scales):
        scale = float(2 ** j)
        half = int(np.ceil(4.0 * scale))
        t = np.arange(-half, half + 1) / scale
        psi = (1.0 - t * t) * np.exp(-0.5 * t * t)
        psi = psi - psi.mean()
        psi = psi / np.linalg.norm(psi)
        psi.flags.writeable = False
        bank.append(psi)
    return tuple(bank)


def cwt(x: np.ndarray, num_scales: int = NUM_PITCH_SCALES) -> np.ndarray:
    """Wavelet coefficients of a 1-D track, shape (len(x), num_scales)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError("cwt", "ndim", 1, x.ndim)
    n = x.shape[0]
    out = np.empty((n, num_scales))
    for j, psi in enumerate(mexican_hat_bank(num_scales)):
        half = (psi.shape[0] - 1) // 2
        mode = "reflect" if n > 1 else "edge"
        xp = np.pad(x, half, mode=mode)
        out[:, j] = np.convolve(xp, psi, mode="valid")
    return out


@lru_cache(maxsize=4)
def _icwt_weights(num_scales: int) -> np.ndarray:
    """Least-squares scale weights for icwt, fit on a sinusoid bank."""
    n = 512
    t = np.arange(n)
    cols, target = [], []
    for period in np.geomspace(6.0, 384.0, 24):
        for phase in (0.0, 0.5 * np.pi):
            x = np.sin(2.0 * np.pi * t / period + phase)
            cols.append(cwt(x, num_scales))
            target.append(x - x.mean())
    a = np.concatenate(cols, axis=0)
    b = np.concatenate(target, axis=0)
    w, _, _, _ = np.linalg.lstsq(a, b, rcond=None)
    w.flags.writeable = False
    return w


def icwt(coeffs: np.ndarray, dc: float = 0.0) -> np.ndarray:
    """Approximate inverse of cwt: weighted scale sum plus a dc term."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 2:
        raise ShapeError("icwt", "ndim", 2, coeffs.ndim)
    return coeffs @ _icwt_weights(coeffs.shape[1]) + dc


def pitch_spectrogram(log_f0: np.ndarray,
                      num_scales: int = NUM_PITCH_SCALES) -> np.ndarray:
    """Wavelet decomposition of a log-pitch track, shape (m, num_scales)."""
    return cwt(log_f0, num_scales)
