"""Text, alignment, and synthetic-corpus frontend."""

from .alignment import AlignmentTable, parse_alignment, round_half_up, \
    serialize_alignment
from .corpus import NUM_GESTURE_CODES, SyntheticSample, gesture_frame_count, \
    gesture_source_frames, load_corpus, sample_from_json, sample_to_json, \
    save_corpus, synth_corpus
from .phonemes import MAX_VOCAB, PHONEME_VOCAB, PhonemeSequence, \
    PhonemeTable, load_phoneme_table, phonemize, tokens_to_symbols

__all__ = [
    "AlignmentTable", "parse_alignment", "round_half_up",
    "serialize_alignment", "NUM_GESTURE_CODES", "SyntheticSample",
    "gesture_frame_count", "gesture_source_frames", "load_corpus",
    "sample_from_json", "sample_to_json", "save_corpus", "synth_corpus",
    "MAX_VOCAB", "PHONEME_VOCAB", "PhonemeSequence", "PhonemeTable",
    "load_phoneme_table", "phonemize", "tokens_to_symbols",
]
