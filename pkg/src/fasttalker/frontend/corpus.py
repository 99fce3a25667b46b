"""Deterministic synthetic corpus with known ground truth for every target."""

import json
from dataclasses import dataclass

import numpy as np

from .. import dsp
from ..errors import ConfigError, FormatError
from ..numerics.serialize import tensor_from_json, tensor_to_json
from ..rng import stream
from .alignment import AlignmentTable, round_half_up
from .phonemes import MAX_VOCAB, PHONEME_VOCAB, PhonemeSequence, \
    load_phoneme_table

NUM_GESTURE_CODES = 256


@dataclass(frozen=True)
class SyntheticSample:
    """One utterance with aligned audio, prosody, and gesture targets."""

    sample_id: str
    text: str
    sequence: PhonemeSequence
    alignment: AlignmentTable
    pitch: np.ndarray  # (m,) Hz
    energy: np.ndarray  # (m,) spectral L2 per frame
    mel: np.ndarray  # (80, m)
    waveform: np.ndarray  # (m * 160,)
    gesture_codes: np.ndarray  # (T_g,) ints < 256

    @property
    def m(self) -> int:
        return self.alignment.total_frames


def gesture_frame_count(m: int) -> int:
    """Gesture frames for m audio frames (30 vs 100 fps), at least 1."""
    return max(1, round_half_up(m * dsp.GESTURE_FRAME_RATE
                                / dsp.AUDIO_FRAME_RATE))


def gesture_source_frames(m: int) -> np.ndarray:
    """Audio-frame index sampled by each gesture frame, shape (T_g,)."""
    t_g = np.arange(gesture_frame_count(m))
    src = np.floor(t_g * (dsp.AUDIO_FRAME_RATE / dsp.GESTURE_FRAME_RATE)
                   + 0.5).astype(np.int64)
    return np.minimum(src, m - 1)


def _symbol_name(token: int, symbols: tuple) -> str:
    return symbols[token] if token < len(symbols) else f"u{token}"


def synth_sample(seed: int, index: int, vocab_size: int,
                 tables: dict) -> SyntheticSample:
    """Generate sample `index` of a corpus; bit-identical per (seed, index)."""
    rng = stream(seed, "corpus", f"sample{index}")
    symbols = load_phoneme_table().symbols
    n_tok = int(rng.integers(4, 13))
    tokens = rng.integers(0, vocab_size, size=n_tok)

    # group tokens into pseudo-words of 1-3 tokens for the text field
    spans, words, start = [], [], 0
    while start < n_tok:
        width = int(min(rng.integers(1, 4), n_tok - start))
        surface = "".join(
            "".join(c for c in _symbol_name(int(t), symbols) if c.isalpha())
            for t in tokens[start:start + width])
        spans.append((surface, (start, start + width)))
        words.append(surface)
        start += width
    sequence = PhonemeSequence(tokens=tuple(int(t) for t in tokens),
                               source_words=tuple(spans))

    durations = tables["duration"][tokens]
    m = int(durations.sum())
    alignment = AlignmentTable(
        labels=tuple(_symbol_name(int(t), symbols) for t in tokens),
        durations=tuple(int(d) for d in durations),
        frame_rate=float(dsp.AUDIO_FRAME_RATE))

    pitch = np.repeat(tables["pitch"][tokens], durations)
    pitch = np.maximum(50.0, pitch + rng.normal(0.0, 0.5, size=m))
    amp = np.repeat(tables["amplitude"][tokens], durations)
    amp = np.maximum(0.01, amp * (1.0 + rng.normal(0.0, 0.02, size=m)))

    f_per_sample = np.repeat(pitch, dsp.HOP_LENGTH)
    phase = 2.0 * np.pi * np.cumsum(f_per_sample) / dsp.SAMPLE_RATE
    carrier = (np.sin(phase) + 0.4 * np.sin(2.0 * phase)) / 1.4
    waveform = np.repeat(amp, dsp.HOP_LENGTH) * carrier

    phoneme_at = np.repeat(np.arange(n_tok), durations)
    codes = tables["code"][tokens[phoneme_at[gesture_source_frames(m)]]]

    return SyntheticSample(
        sample_id=f"s{index:05d}",
        text=" ".join(words),
        sequence=sequence,
        alignment=alignment,
        pitch=pitch,
        energy=dsp.frame_energy(waveform),
        mel=dsp.log_mel_spectrogram(waveform),
        waveform=waveform,
        gesture_codes=codes.astype(np.int64),
    )


def synth_corpus(seed: int, n_samples: int,
                 vocab_size: int = PHONEME_VOCAB) -> list:
    """Deterministic list of SyntheticSample; same seed -> identical bytes."""
    if n_samples < 1:
        raise ConfigError("n_samples must be >= 1")
    if vocab_size < 1 or vocab_size > MAX_VOCAB:
        raise ConfigError(f"vocab_size must be in [1, {MAX_VOCAB}]")
    rng = stream(seed, "corpus", "tables")
    tables = {
        "duration": rng.integers(1, 9, size=vocab_size),
        "pitch": rng.uniform(110.0, 300.0, size=vocab_size),
        "amplitude": rng.uniform(0.15, 0.6, size=vocab_size),
        "code": rng.integers(0, NUM_GESTURE_CODES, size=vocab_size),
    }
    return [synth_sample(seed, i, vocab_size, tables)
            for i in range(n_samples)]


def sample_to_json(sample: SyntheticSample) -> dict:
    return {
        "id": sample.sample_id,
        "text": sample.text,
        "tokens": list(sample.sequence.tokens),
        "words": [[w, s, e] for w, (s, e) in sample.sequence.source_words],
        "labels": list(sample.alignment.labels),
        "durations": list(sample.alignment.durations),
        "frame_rate": sample.alignment.frame_rate,
        "pitch": tensor_to_json(sample.pitch),
        "energy": tensor_to_json(sample.energy),
        "mel": tensor_to_json(sample.mel),
        "waveform": tensor_to_json(sample.waveform),
        "gesture_codes": [int(c) for c in sample.gesture_codes],
    }


def sample_from_json(obj: dict) -> SyntheticSample:
    try:
        return SyntheticSample(
            sample_id=obj["id"],
            text=obj["text"],
            sequence=PhonemeSequence(
                tokens=tuple(obj["tokens"]),
                source_words=tuple((w, (s, e)) for w, s, e in obj["words"])),
            alignment=AlignmentTable(
                labels=tuple(obj["labels"]),
                durations=tuple(obj["durations"]),
                frame_rate=obj["frame_rate"]),
            pitch=tensor_from_json(obj["pitch"]),
            energy=tensor_from_json(obj["energy"]),
            mel=tensor_from_json(obj["mel"]),
            waveform=tensor_from_json(obj["waveform"]),
            gesture_codes=np.asarray(obj["gesture_codes"], dtype=np.int64),
        )
    except KeyError as exc:
        raise FormatError(f"corpus record missing field {exc}") from exc


def save_corpus(samples, path) -> None:
    """Write samples as JSONL, one object per line."""
    with open(path, "w") as fh:
        for sample in samples:
            fh.write(json.dumps(sample_to_json(sample), sort_keys=True))
            fh.write("\n")


def load_corpus(path) -> list:
    with open(path) as fh:
        return [sample_from_json(json.loads(line))
                for line in fh if line.strip()]
