"""Exception hierarchy. Every error raised on a documented contract violation
derives from FastTalkerError so the CLI can map it to a structured payload."""

from __future__ import annotations


class FastTalkerError(Exception):
    """Base class; `code` feeds the CLI's machine-readable error output."""

    code = "error"


class ShapeError(FastTalkerError):
    """Array dimension mismatch. Names the offending dimension."""

    code = "shape"

    def __init__(self, api: str, dimension: str, expected, got):
        self.dimension = dimension
        self.expected = expected
        self.got = got
        super().__init__(f"{api}: dimension '{dimension}' expected {expected}, got {got}")


class NumericsError(FastTalkerError):
    code = "numerics"


class GraphError(FastTalkerError):
    """Autodiff misuse (backward on non-scalar, etc.)."""

    code = "graph"


class PhonemeError(FastTalkerError):
    code = "phoneme"


class UnknownWordError(PhonemeError):
    """Words that produce no phonemes. Carries the offending words."""

    code = "unknown_words"

    def __init__(self, words):
        self.words = list(words)
        super().__init__("cannot phonemize words: " + ", ".join(repr(w) for w in self.words))


class AlignmentError(FastTalkerError):
    code = "alignment"


class ConfigError(FastTalkerError):
    code = "config"


class FormatError(FastTalkerError):
    """Malformed serialized payload (checkpoint, tensor container, corpus)."""

    code = "format"


class SearchError(FastTalkerError):
    code = "search"


class MetricError(FastTalkerError):
    code = "metric"
