"""FastTalker: joint speech and gesture synthesis from phoneme sequences."""

import numpy as np

from . import dsp
from .frontend.phonemes import PHONEME_VOCAB, PhonemeSequence, phonemize
from .gesture.codebook import CODE_DIM, NUM_CODES, FrozenGestureDecoder, \
    dequantize, make_codebook, reconstruct_gesture
from .gesture.decoder import GestureLatentDecoder, downsample_frames, \
    loss_gesture
from .gesture.fusion import GATE_HIDDEN, RhythmTranslator
from .gesture.semantics import EMBED_DIM, SemanticTranslator, \
    words_per_gesture_frame
from .nas.space import ArchitectureConfig
from .numerics import Module, add, concat, reshape
from .rng import stream
from .speech.decoders import MEL_HIDDEN, UPSAMPLE_STRIDES, MelDecoder, \
    WaveformDecoder
from .speech.encoder import PhonemeEncoder
from .speech.losses import duration_loss, loss_audio, mse_loss
from .speech.predictors import PredictorCascade, length_regulate


class FastTalker(Module):
    """The assembled model; all searchable modules sized by the config."""

    def __init__(self, config: ArchitectureConfig,
                 vocab_size: int = PHONEME_VOCAB, seed: int = 0,
                 dropout: float = 0.1,
                 num_pitch_scales: int = dsp.NUM_PITCH_SCALES):
        super().__init__()
        self.config = config
        self.vocab_size = vocab_size
        self.seed = seed
        self.dropout = dropout
        self.num_pitch_scales = num_pitch_scales
        bus = config["phoneme_encoder"].channels
        self.bus = bus
        self.encoder = PhonemeEncoder(
            vocab_size, config["phoneme_encoder"],
            stream(seed, "model", "encoder"), dropout)
        self.cascade = PredictorCascade(
            bus, config["duration_pred"], config["pitch_pred"],
            config["energy_pred"], num_pitch_scales,
            stream(seed, "model", "predictors"), dropout)
        self.mel_decoder = MelDecoder(3 * bus, stream(seed, "model", "mel"))
        self.waveform_decoder = WaveformDecoder(
            3 * bus, config["waveform_decoder"],
            stream(seed, "model", "waveform"))
        self.translator = RhythmTranslator(
            bus, self.cascade, stream(seed, "model", "translator"))
        self.semantics = SemanticTranslator(
            config["semantic_translator"], stream(seed, "model", "semantics"))
        self.gesture_decoder = GestureLatentDecoder(
            3 * bus + config["semantic_translator"].channels,
            config["gesture_latent_decoder"],
            stream(seed, "model", "gesture"), dropout)
        # frozen, regenerated from the seed, never optimized
        self.codebook = make_codebook(seed)
        self.pose_decoder = FrozenGestureDecoder(seed)

    def _rhythm(self, tokens, durations, rng=None):
        f_pho = self.encoder.forward(tokens, rng)
        cas = self.cascade.forward(f_pho, durations, rng)
        f_r = concat([cas["f_d_frames"], cas["f_pitch"], cas["f_e"]], axis=1)
        return f_pho, cas, f_r

    def _gesture(self, f_pho, cas, sequence: PhonemeSequence, durations,
                 rng=None, gate_override=None):
        m = cas["m"]
        f_pho_frames = length_regulate(f_pho, durations)
        r_g = downsample_frames(
            self.translator.forward(f_pho_frames, cas, rng, gate_override), m)
        frame_words = words_per_gesture_frame(
            sequence.source_words, durations, m)
        s_g = self.semantics.forward(frame_words)
        logits, l_hat = self.gesture_decoder.forward(r_g, s_g, rng)
        return logits, l_hat

    def forward_train(self, sample, rng=None, discriminator=None,
                      adversarial_weight: float = 0.1, gate_override=None):
        """All training losses for one sample; 'total' is their plain sum."""
        tokens = np.asarray(sample.sequence.tokens, dtype=np.int64)
        durations = np.asarray(sample.alignment.durations, dtype=np.int64)
        f_pho, cas, f_r = self._rhythm(tokens, durations, rng)
        m = cas["m"]

        losses = {"duration": duration_loss(cas["d_hat"], durations)}
        pitch_target = dsp.pitch_spectrogram(np.log(sample.pitch),
                                             self.num_pitch_scales)
        losses["pitch"] = mse_loss(cas["p_hat"], pitch_target)
        losses["energy"] = mse_loss(reshape(cas["e_hat"], (m,)),
                                    sample.energy)

        s_hat = self.mel_decoder(f_r)
        a_hat = self.waveform_decoder(f_r)
        audio = loss_audio(a_hat, sample.waveform, s_hat, sample.mel,
                           discriminator, adversarial_weight)
        losses["audio"] = audio["total"]

        logits, l_hat = self._gesture(f_pho, cas, sample.sequence, durations,
                                      rng, gate_override)
        gesture = loss_gesture(logits, l_hat, sample.gesture_codes,
                               dequantize(sample.gesture_codes,
                                          self.codebook))
        losses["gesture"] = gesture["total"]

        total = losses["duration"]
        for key in ("pitch", "energy", "audio", "gesture"):
            total = add(total, losses[key])
        losses["total"] = total
        losses["detail"] = {"audio": audio, "gesture": gesture}
        losses["outputs"] = {"mel": s_hat, "waveform": a_hat,
                             "logits": logits, "d_hat": cas["d_hat"]}
        return losses

    def generate(self, sample, gate_override=None) -> dict:
        """Generation with the sample's reference durations, so outputs line
        up frame-for-frame with its targets. Used by evaluation."""
        tokens = np.asarray(sample.sequence.tokens, dtype=np.int64)
        durations = np.asarray(sample.alignment.durations, dtype=np.int64)
        f_pho, cas, f_r = self._rhythm(tokens, durations)
        waveform = self.waveform_decoder(f_r)
        logits, _ = self._gesture(f_pho, cas, sample.sequence, durations,
                                  gate_override=gate_override)
        indices = np.argmax(logits.data, axis=1)
        poses = reconstruct_gesture(indices, self.codebook, self.pose_decoder)
        return {"waveform": waveform.data.copy(), "gesture_indices": indices,
                "poses": poses}

    def synthesize(self, text_or_sequence, gate_override=None) -> dict:
        """Inference: predicted durations, waveform, poses. No mel decoder."""
        if isinstance(text_or_sequence, str):
            sequence = phonemize(text_or_sequence)
        else:
            sequence = text_or_sequence
        tokens = np.asarray(sequence.tokens, dtype=np.int64)
        f_pho = self.encoder.forward(tokens)
        _, d_hat = self.cascade.duration.forward(f_pho)
        durations = np.maximum(
            1, np.round(np.exp(d_hat.data[:, 0]))).astype(np.int64)
        _, cas, f_r = self._rhythm(tokens, durations)
        waveform = self.waveform_decoder(f_r)
        logits, _ = self._gesture(f_pho, cas, sequence, durations,
                                  gate_override=gate_override)
        indices = np.argmax(logits.data, axis=1)
        poses = reconstruct_gesture(indices, self.codebook, self.pose_decoder)
        return {
            "durations": durations,
            "m": int(durations.sum()),
            "waveform": waveform.data.copy(),
            "pitch": cas["p_hat"].data.copy(),
            "energy": cas["e_hat"].data[:, 0].copy(),
            "gesture_indices": indices,
            "poses": poses,
        }


def _linear_params(n_in: int, n_out: int) -> int:
    return n_in * n_out + n_out


def _conv_params(c_in: int, c_out: int, kernel: int, groups: int = 1) -> int:
    return c_out * (c_in // groups) * kernel + c_out


def count_params_analytic(config: ArchitectureConfig,
                          vocab_size: int = PHONEME_VOCAB,
                          num_pitch_scales: int = dsp.NUM_PITCH_SCALES,
                          n_mels: int = dsp.N_MELS) -> int:
    """Closed-form trainable parameter count of FastTalker(config)."""
    enc = config["phoneme_encoder"]
    bus = enc.channels
    total = vocab_size * bus  # embedding
    if enc.layers == 0:
        total += _linear_params(bus, bus)
    else:
        per_block = (2 * bus  # ln_attn
                     + 4 * _linear_params(bus, bus)  # attention projections
                     + 2 * bus  # ln_ffn
                     + 2 * _conv_params(bus, bus, enc.kernel, enc.groups))
        total += enc.layers * per_block + 2 * bus  # + ln_out

    def predictor(choice, head_dim):
        if choice.layers == 0:
            trunk = _linear_params(bus, bus)
        else:
            c = choice.channels
            trunk = (_linear_params(bus, c)
                     + choice.layers * (_conv_params(c, c, choice.kernel,
                                                     choice.groups) + 2 * c)
                     + _linear_params(c, bus))
        return trunk + _linear_params(bus, head_dim)

    total += predictor(config["duration_pred"], 1)
    total += predictor(config["pitch_pred"], num_pitch_scales)
    total += predictor(config["energy_pred"], 1)

    # mel decoder, fixed shape
    total += (_linear_params(3 * bus, MEL_HIDDEN)
              + 2 * (_conv_params(MEL_HIDDEN, MEL_HIDDEN, 5) + 2 * MEL_HIDDEN)
              + _linear_params(MEL_HIDDEN, n_mels))

    wav = config["waveform_decoder"]
    c = wav.channels
    total += _linear_params(3 * bus, c)
    total += wav.layers * (2 * _conv_params(c, c, wav.kernel, wav.groups)
                           + _conv_params(c, c, 1))
    total += sum(c * c * 2 * s + c for s in UPSAMPLE_STRIDES)
    total += _conv_params(c, 1, 1)

    # rhythm translator gates (3 stages, fixed shape)
    total += 3 * (_conv_params(2 * bus, GATE_HIDDEN, 3)
                  + _conv_params(GATE_HIDDEN, 1, 3))

    sem = config["semantic_translator"]
    total += _linear_params(EMBED_DIM, sem.channels)
    total += sem.layers * _linear_params(sem.channels, sem.channels)

    ges = config["gesture_latent_decoder"]
    gd_in = 3 * bus + sem.channels
    total += _linear_params(gd_in, ges.channels)
    total += ges.layers * (_conv_params(ges.channels, ges.channels,
                                        ges.kernel, ges.groups)
                           + 2 * ges.channels)
    total += _linear_params(ges.channels, NUM_CODES)
    total += _linear_params(ges.channels, CODE_DIM)
    return total
