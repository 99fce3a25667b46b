"""Causal gesture latent decoder and the gesture objective."""

import numpy as np

from ..errors import ShapeError
from ..frontend.corpus import gesture_source_frames
from ..nas.space import ModuleChoice
from ..numerics import Linear, Module, ModuleList, Tensor, add, concat, \
    cross_entropy, gather_rows
from ..speech.losses import l1_loss
from ..speech.predictors import ConvUnit
from .codebook import CODE_DIM, NUM_CODES


def downsample_frames(x: Tensor, m: int) -> Tensor:
    """Pick the audio-frame rows each gesture frame reads: (m, D) -> (T_g, D)."""
    if x.data.shape[0] != m:
        raise ShapeError("downsample_frames", "rows", m, x.data.shape[0])
    return gather_rows(x, gesture_source_frames(m))


class GestureLatentDecoder(Module):
    """concat(r_g, s_g) (T_g, in_dim) -> logits (T_g, 256), latent (T_g, 256).

    layers=0 collapses the trunk to a single linear map; otherwise causal
    conv units at the chosen width. Both heads read the same trunk output.
    """

    def __init__(self, in_dim: int, choice: ModuleChoice, rng,
                 dropout: float = 0.1):
        super().__init__()
        self.in_dim = in_dim
        self.layers = choice.layers
        width = choice.channels
        self.trunk_in = Linear(in_dim, width, rng)
        self.units = ModuleList([ConvUnit(choice, rng, dropout)
                                 for _ in range(choice.layers)])
        self.head_logits = Linear(width, NUM_CODES, rng)
        self.head_latent = Linear(width, CODE_DIM, rng)

    def forward(self, r_g: Tensor, s_g: Tensor, rng=None):
        if r_g.data.shape[0] != s_g.data.shape[0]:
            raise ShapeError("GestureLatentDecoder", "frames",
                             r_g.data.shape[0], s_g.data.shape[0])
        h = self.trunk_in(concat([r_g, s_g], axis=1))
        for unit in self.units:
            h = unit.forward(h, rng)
        return self.head_logits(h), self.head_latent(h)


def loss_gesture(logits: Tensor, l_g_hat: Tensor, indices_gt,
                 l_g_gt) -> dict:
    """Code classification CE plus mean-L1 latent reconstruction."""
    indices_gt = np.asarray(indices_gt, dtype=np.int64)
    terms = {
        "code_ce": cross_entropy(logits, indices_gt),
        "latent_l1": l1_loss(l_g_hat, l_g_gt),
    }
    terms["total"] = add(terms["code_ce"], terms["latent_l1"])
    return terms
