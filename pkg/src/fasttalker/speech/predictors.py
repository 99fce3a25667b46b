"""Cascaded rhythm predictors (duration -> pitch -> energy) on a shared bus.

Every predictor maps a bus-width sequence to a bus-width latent plus a small
prediction head. The latent feeds the next stage and the gesture branch; the
head emits the supervised quantity (log-duration, wavelet pitch, energy).
"""

import numpy as np

from ..errors import ShapeError
from ..nas.space import ModuleChoice
from ..numerics import Conv1d, ConvSpec, Dropout, LayerNorm, Linear, Module, \
    ModuleList, Tensor, add, relu, repeat_rows


def length_regulate(f: Tensor, durations) -> Tensor:
    """Repeat row i durations[i] times: (n, l) -> (sum(durations), l)."""
    durations = np.asarray(durations, dtype=np.int64)
    if f.data.ndim != 2 or durations.shape != (f.data.shape[0],):
        raise ShapeError("length_regulate", "durations",
                         (f.data.shape[0],), durations.shape)
    return repeat_rows(f, durations)


class ConvUnit(Module):
    """conv -> relu -> layer norm -> dropout, all width-preserving."""

    def __init__(self, choice: ModuleChoice, rng, dropout: float):
        super().__init__()
        spec = ConvSpec(choice.channels, choice.channels, kernel=choice.kernel,
                        groups=choice.groups)
        self.conv = Conv1d(spec, rng, padding="causal")
        self.norm = LayerNorm(choice.channels)
        self.drop = Dropout(dropout)

    def forward(self, x, rng=None):
        return self.drop(self.norm(relu(self.conv(x))), rng)


class PredictorTrunk(Module):
    """Bus-width sequence transform; layers=0 collapses to one linear map."""

    def __init__(self, bus: int, choice: ModuleChoice, rng,
                 dropout: float = 0.1):
        super().__init__()
        self.bus = bus
        self.layers = choice.layers
        if choice.layers == 0:
            self.linear = Linear(bus, bus, rng)
            self.units = ModuleList([])
        else:
            self.in_proj = Linear(bus, choice.channels, rng)
            self.units = ModuleList([
                ConvUnit(choice, rng, dropout)
                for _ in range(choice.layers)])
            self.out_proj = Linear(choice.channels, bus, rng)

    def forward(self, x: Tensor, rng=None) -> Tensor:
        if x.data.ndim != 2 or x.data.shape[1] != self.bus:
            raise ShapeError("PredictorTrunk", "features",
                             ("T", self.bus), tuple(x.data.shape))
        if self.layers == 0:
            return self.linear(x)
        h = self.in_proj(x)
        for unit in self.units:
            h = unit.forward(h, rng)
        return self.out_proj(h)


class RhythmPredictor(Module):
    """(T, bus) -> latent (T, bus) and prediction (T, head_dim)."""

    def __init__(self, bus: int, choice: ModuleChoice, head_dim: int, rng,
                 dropout: float = 0.1):
        super().__init__()
        self.trunk = PredictorTrunk(bus, choice, rng, dropout)
        self.head = Linear(bus, head_dim, rng)

    def forward(self, x: Tensor, rng=None):
        latent = self.trunk.forward(x, rng)
        return latent, self.head(latent)


class PredictorCascade(Module):
    """Wires duration -> pitch -> energy with elementwise-sum inputs.

    duration consumes f_pho (phoneme rate); pitch consumes the regulated
    f_d + f_pho; energy additionally adds f_pitch. Latents are bus-width.
    """

    def __init__(self, bus: int, duration: ModuleChoice, pitch: ModuleChoice,
                 energy: ModuleChoice, num_pitch_scales: int, rng,
                 dropout: float = 0.1):
        super().__init__()
        self.duration = RhythmPredictor(bus, duration, 1, rng, dropout)
        self.pitch = RhythmPredictor(bus, pitch, num_pitch_scales, rng,
                                     dropout)
        self.energy = RhythmPredictor(bus, energy, 1, rng, dropout)

    def forward(self, f_pho: Tensor, durations, rng=None):
        """Returns dict with latents, predictions, and frame count m."""
        f_d, d_hat = self.duration.forward(f_pho, rng)
        base = length_regulate(add(f_d, f_pho), durations)
        f_pitch, p_hat = self.pitch.forward(base, rng)
        f_e, e_hat = self.energy.forward(add(base, f_pitch), rng)
        return {
            "f_d": f_d, "d_hat": d_hat,
            "f_d_frames": length_regulate(f_d, durations),
            "f_pitch": f_pitch, "p_hat": p_hat,
            "f_e": f_e, "e_hat": e_hat,
            "m": int(np.asarray(durations).sum()),
        }
