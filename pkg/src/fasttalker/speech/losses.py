"""Audio-side training objectives, every reduction a mean.

loss_audio = multi-resolution STFT (spectral convergence + log-magnitude L1)
           + adversarial_weight * LSGAN generator term (optional)
           + MSE between predicted and reference mel frames
"""

import numpy as np

from ..dsp import stft_magnitude, stft_magnitude_tensor
from ..errors import ShapeError
from ..numerics import Conv1d, ConvSpec, Module, ModuleList, Tensor, add, \
    absval, as_tensor, log, mean, mul, power, relu, reshape, sum_, transpose

STFT_RESOLUTIONS = ((512, 256), (1024, 512), (2048, 1024))  # (fft, hop)
LOG_EPS = 1e-7
ADVERSARIAL_WEIGHT = 0.1


def mse_loss(pred: Tensor, target) -> Tensor:
    """Mean squared error against a constant target of identical shape."""
    target = np.asarray(target, dtype=np.float64)
    if tuple(pred.data.shape) != tuple(target.shape):
        raise ShapeError("mse_loss", "target", tuple(pred.data.shape),
                         tuple(target.shape))
    return mean(power(add(pred, Tensor(-target)), 2.0))


def l1_loss(pred: Tensor, target) -> Tensor:
    """Mean absolute error against a constant target of identical shape."""
    target = np.asarray(target, dtype=np.float64)
    if tuple(pred.data.shape) != tuple(target.shape):
        raise ShapeError("l1_loss", "target", tuple(pred.data.shape),
                         tuple(target.shape))
    return mean(absval(add(pred, Tensor(-target))))


def duration_loss(d_hat: Tensor, durations) -> Tensor:
    """MSE between predicted log-durations (n, 1) and log of frame counts."""
    durations = np.asarray(durations, dtype=np.float64)
    return mse_loss(reshape(d_hat, durations.shape), np.log(durations))


def stft_loss_single(a_hat: Tensor, a_gt: np.ndarray, fft: int,
                     hop: int) -> Tensor:
    """Spectral convergence + log-magnitude L1 at one resolution."""
    mag_hat = stft_magnitude_tensor(a_hat, fft, hop)
    mag_gt = stft_magnitude(a_gt, fft, hop)
    diff = add(mag_hat, Tensor(-mag_gt))
    gt_norm = max(float(np.linalg.norm(mag_gt)), 1e-12)
    sc = mul(power(sum_(power(diff, 2.0)), 0.5), 1.0 / gt_norm)
    log_l1 = mean(absval(add(log(add(mag_hat, LOG_EPS)),
                             Tensor(-np.log(mag_gt + LOG_EPS)))))
    return add(sc, log_l1)


def multi_resolution_stft_loss(a_hat: Tensor, a_gt,
                               resolutions=STFT_RESOLUTIONS) -> Tensor:
    """Sum of per-resolution STFT losses between waveforms of equal length."""
    a_gt = np.asarray(a_gt, dtype=np.float64)
    if tuple(a_hat.data.shape) != tuple(a_gt.shape):
        raise ShapeError("multi_resolution_stft_loss", "length",
                         tuple(a_hat.data.shape), tuple(a_gt.shape))
    total = None
    for fft, hop in resolutions:
        term = stft_loss_single(a_hat, a_gt, fft, hop)
        total = term if total is None else add(total, term)
    return total


def leaky_relu(x: Tensor, slope: float = 0.2) -> Tensor:
    return add(relu(x), mul(relu(mul(x, -1.0)), -slope))


class Discriminator(Module):
    """4-layer strided-conv LSGAN critic on raw waveforms: (L,) -> scalar."""

    def __init__(self, rng):
        super().__init__()
        chans = (1, 16, 32, 64)
        self.convs = ModuleList([
            Conv1d(ConvSpec(chans[i], chans[i + 1], kernel=15, groups=1),
                   rng, padding="same")
            for i in range(3)])
        self.out = Conv1d(ConvSpec(64, 1, kernel=3, groups=1), rng,
                          padding="same")
        self.stride = 4

    def forward(self, a: Tensor) -> Tensor:
        h = reshape(as_tensor(a), (a.data.shape[0], 1))
        for conv in self.convs:
            h = leaky_relu(conv(h))
            h = h[::self.stride]
        return mean(self.out(h))

    __call__ = forward


def lsgan_discriminator_loss(d_real: Tensor, d_fake: Tensor) -> Tensor:
    """(D(real) - 1)^2 + D(fake)^2, the least-squares critic objective."""
    return add(power(add(d_real, -1.0), 2.0), power(d_fake, 2.0))


def lsgan_generator_loss(d_fake: Tensor) -> Tensor:
    """(D(fake) - 1)^2, pushing generated audio toward the real label."""
    return power(add(d_fake, -1.0), 2.0)


def loss_audio(a_hat: Tensor, a_gt, s_hat: Tensor, s_gt,
               discriminator: Discriminator | None = None,
               adversarial_weight: float = ADVERSARIAL_WEIGHT) -> dict:
    """All audio terms; key 'total' sums them with the configured weight."""
    terms = {
        "stft": multi_resolution_stft_loss(a_hat, a_gt),
        "mel": mse_loss(s_hat, s_gt),
    }
    total = add(terms["stft"], terms["mel"])
    if discriminator is not None:
        terms["adversarial"] = lsgan_generator_loss(discriminator(a_hat))
        total = add(total, mul(terms["adversarial"], adversarial_weight))
    terms["total"] = total
    return terms
