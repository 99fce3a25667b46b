"""Speech branch: encoder, rhythm predictors, decoders, audio losses."""

from .decoders import MelDecoder, WaveformDecoder
from .encoder import PhonemeEncoder
from .losses import Discriminator, duration_loss, l1_loss, loss_audio, \
    lsgan_discriminator_loss, lsgan_generator_loss, mse_loss, \
    multi_resolution_stft_loss
from .predictors import PredictorCascade, RhythmPredictor, length_regulate

__all__ = [
    "MelDecoder", "WaveformDecoder", "PhonemeEncoder", "Discriminator",
    "duration_loss", "l1_loss", "loss_audio", "lsgan_discriminator_loss",
    "lsgan_generator_loss", "mse_loss", "multi_resolution_stft_loss",
    "PredictorCascade", "RhythmPredictor", "length_regulate",
]
