"""Word-level semantic features: deterministic hash embeddings + MLP."""

import hashlib

import numpy as np

from ..errors import ShapeError
from ..frontend.corpus import gesture_source_frames
from ..nas.space import ModuleChoice
from ..numerics import Linear, Module, ModuleList, Tensor, relu

EMBED_DIM = 300


def hash_embedding(word: str, dim: int = EMBED_DIM) -> np.ndarray:
    """Deterministic unit-variance embedding derived from the word string."""
    digest = hashlib.sha256(word.encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "little")
    rng = np.random.default_rng(seed)
    return rng.normal(size=dim) / np.sqrt(dim)


def words_per_gesture_frame(source_words, durations, m: int) -> list:
    """Word string owning each gesture frame; '' where no span applies."""
    durations = np.asarray(durations, dtype=np.int64)
    owner = [""] * m
    frame = 0
    spans = {i: w for w, (s, e) in source_words for i in range(s, e)}
    for tok, d in enumerate(durations):
        word = spans.get(tok, "")
        for _ in range(int(d)):
            if frame < m:
                owner[frame] = word
            frame += 1
    return [owner[i] for i in gesture_source_frames(m)]


class SemanticTranslator(Module):
    """Per-frame words -> semantic features (T_g, channels).

    layers=0 is exactly one linear map on the hash embedding; layers=L adds
    L relu+linear refinements at the chosen width. Unknown frames (empty
    word) receive a zero embedding.
    """

    def __init__(self, choice: ModuleChoice, rng, embed_dim: int = EMBED_DIM):
        super().__init__()
        self.embed_dim = embed_dim
        self.out_dim = choice.channels
        self.in_proj = Linear(embed_dim, choice.channels, rng)
        self.hidden = ModuleList([
            Linear(choice.channels, choice.channels, rng)
            for _ in range(choice.layers)])

    def embed_words(self, frame_words) -> np.ndarray:
        rows = np.zeros((len(frame_words), self.embed_dim))
        cache = {}
        for i, word in enumerate(frame_words):
            if not word:
                continue
            if word not in cache:
                cache[word] = hash_embedding(word, self.embed_dim)
            rows[i] = cache[word]
        return rows

    def forward(self, frame_words) -> Tensor:
        if not frame_words:
            raise ShapeError("SemanticTranslator", "frames", ">= 1", 0)
        h = self.in_proj(Tensor(self.embed_words(frame_words)))
        for layer in self.hidden:
            h = layer(relu(h))
        return h
