"""Causal transformer encoder over phoneme embeddings."""

import numpy as np

from ..errors import PhonemeError
from ..numerics import CausalSelfAttention, Conv1d, ConvSpec, Dropout, \
    Embedding, LayerNorm, Linear, Module, ModuleList, Tensor, add, relu, \
    sinusoidal_positions
from ..nas.space import ModuleChoice

ATTENTION_HEADS = 2


class EncoderBlock(Module):
    """Pre-norm block: causal attention then a grouped causal conv FFN."""

    def __init__(self, choice: ModuleChoice, rng, dropout: float):
        super().__init__()
        c, g, k = choice.channels, choice.groups, choice.kernel
        self.ln_attn = LayerNorm(c)
        self.attn = CausalSelfAttention(c, ATTENTION_HEADS, rng)
        self.ln_ffn = LayerNorm(c)
        spec = ConvSpec(c, c, kernel=k, groups=g)
        self.conv_a = Conv1d(spec, rng, padding="causal")
        self.conv_b = Conv1d(spec, rng, padding="causal")
        self.drop = Dropout(dropout)

    def forward(self, x, rng=None):
        x = add(x, self.drop(self.attn(self.ln_attn(x)), rng))
        h = self.conv_b(relu(self.conv_a(self.ln_ffn(x))))
        return add(x, self.drop(h, rng))


class PhonemeEncoder(Module):
    """Token ids (n,) -> causal features (n, channels)."""

    def __init__(self, vocab_size: int, choice: ModuleChoice, rng,
                 dropout: float = 0.1):
        super().__init__()
        self.vocab_size = vocab_size
        self.channels = choice.channels
        self.layers = choice.layers
        self.embed = Embedding(vocab_size, choice.channels, rng)
        if choice.layers == 0:
            self.proj = Linear(choice.channels, choice.channels, rng)
            self.blocks = ModuleList([])
        else:
            self.proj = None
            self.blocks = ModuleList([
                EncoderBlock(choice, rng, dropout)
                for _ in range(choice.layers)])
            self.ln_out = LayerNorm(choice.channels)

    def forward(self, tokens, rng=None):
        tokens = np.asarray(tokens, dtype=np.int64)
        if tokens.ndim != 1 or tokens.size == 0:
            raise PhonemeError("tokens must be a nonempty 1-D id sequence")
        if tokens.min() < 0 or tokens.max() >= self.vocab_size:
            raise PhonemeError(
                f"token id {int(tokens.max())} outside vocab "
                f"{self.vocab_size}")
        pos = sinusoidal_positions(tokens.shape[0], self.channels)
        x = add(self.embed(tokens), Tensor(pos))
        if self.layers == 0:
            return self.proj(x)
        for block in self.blocks:
            x = block.forward(x, rng)
        return self.ln_out(x)
