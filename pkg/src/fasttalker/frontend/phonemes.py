"""Text normalization and table-driven phonemization."""

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..errors import PhonemeError

PHONEME_VOCAB = 64  # size of the shipped symbol table
MAX_VOCAB = 128  # hard ceiling on token ids in any PhonemeSequence


@dataclass(frozen=True)
class PhonemeTable:
    """Shipped lookup data: symbol inventory, lexicon, and fallback rules."""

    symbols: tuple
    index: dict
    lexicon: dict
    letters: dict
    punctuation: dict

    @property
    def vocab_size(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class PhonemeSequence:
    """Token ids plus (word, [start, end)) spans that partition them."""

    tokens: tuple
    source_words: tuple

    def __post_init__(self):
        if not self.tokens:
            raise PhonemeError("empty phoneme sequence")
        if any(t < 0 or t >= MAX_VOCAB for t in self.tokens):
            raise PhonemeError("token id outside vocabulary")
        cursor = 0
        for _, (start, end) in self.source_words:
            if start != cursor or end <= start:
                raise PhonemeError("word spans do not partition the tokens")
            cursor = end
        if cursor != len(self.tokens):
            raise PhonemeError("word spans do not partition the tokens")

    def __len__(self) -> int:
        return len(self.tokens)


@lru_cache(maxsize=1)
def load_phoneme_table() -> PhonemeTable:
    """Load the packaged 64-symbol table, shape-checked once per process."""
    raw = json.loads(resources.files("fasttalker.frontend")
                     .joinpath("data/phonemes.json").read_text())
    symbols = tuple(raw["symbols"])
    if len(symbols) != PHONEME_VOCAB:
        raise PhonemeError(f"phoneme table must list {PHONEME_VOCAB} symbols")
    return PhonemeTable(
        symbols=symbols,
        index={s: i for i, s in enumerate(symbols)},
        lexicon={k: tuple(v) for k, v in raw["lexicon"].items()},
        letters={k: tuple(v) for k, v in raw["letters"].items()},
        punctuation={k: tuple(v) for k, v in raw["punctuation"].items()},
    )


def _word_symbols(word: str, table: PhonemeTable) -> tuple:
    if word in table.lexicon:
        return table.lexicon[word]
    out = []
    for ch in word:
        if ch not in table.letters:
            raise PhonemeError(f"unsupported character {ch!r}")
        out.extend(table.letters[ch])
    return tuple(out)


def phonemize(text: str, table: PhonemeTable | None = None) -> PhonemeSequence:
    """Deterministic text -> PhonemeSequence via lexicon + letter fallback."""
    table = table or load_phoneme_table()
    if not text.isascii():
        raise PhonemeError("text must be ASCII")
    norm = text.lower().replace("-", " ")
    pieces = []  # (surface form, symbol tuple)
    word = []
    for ch in norm + " ":
        if ch.isalpha() or ch == "'":
            if ch != "'":
                word.append(ch)
            continue
        if word:
            surface = "".join(word)
            pieces.append((surface, _word_symbols(surface, table)))
            word = []
        if ch in table.punctuation:
            pieces.append((ch, table.punctuation[ch]))
        elif ch.isspace() or ch in "\"()[]":
            continue
        else:
            raise PhonemeError(f"unsupported character {ch!r}")
    if not pieces:
        raise PhonemeError("no phonemes after normalization")
    tokens, spans = [], []
    for surface, syms in pieces:
        start = len(tokens)
        tokens.extend(table.index[s] for s in syms)
        spans.append((surface, (start, len(tokens))))
    return PhonemeSequence(tokens=tuple(tokens), source_words=tuple(spans))


def tokens_to_symbols(tokens, table: PhonemeTable | None = None) -> list:
    """Map token ids back to their symbol strings."""
    table = table or load_phoneme_table()
    return [table.symbols[t] for t in tokens]
