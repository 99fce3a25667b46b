"""Gesture rhythm translation: reuse the speech predictors through gates.

The gesture stream starts from the regulated phoneme features and passes
through the SAME predictor trunk objects as the speech branch (weight
sharing, not copies). At each of the three stages a small temporal-conv
gate w in [0, 1] per frame blends the speech branch's reference latent with
the gesture-stream transform: out = w * f_ref + (1 - w) * f_gesture.
"""

import numpy as np

from ..errors import ShapeError
from ..numerics import Conv1d, ConvSpec, Linear, Module, ModuleList, Tensor, \
    add, concat, mul, relu, sigmoid
from ..speech.predictors import PredictorCascade

GATE_HIDDEN = 16


class TemporalGate(Module):
    """Two causal convs -> sigmoid scalar per frame, shape (T, 1)."""

    def __init__(self, bus: int, rng):
        super().__init__()
        self.conv_a = Conv1d(ConvSpec(2 * bus, GATE_HIDDEN, kernel=3,
                                      groups=1), rng, padding="causal")
        self.conv_b = Conv1d(ConvSpec(GATE_HIDDEN, 1, kernel=3, groups=1),
                             rng, padding="causal")

    def forward(self, f_ref: Tensor, f_gesture: Tensor) -> Tensor:
        return sigmoid(self.conv_b(relu(self.conv_a(
            concat([f_ref, f_gesture], axis=1)))))

    __call__ = forward


class RhythmTranslator(Module):
    """Produces the gesture rhythm feature r_g (m, 3 * bus).

    cascade is the speech branch's PredictorCascade; its trunks are invoked
    here on the gesture stream so both branches train the same parameters.
    gate_override, when given, is a sequence of three floats forcing each
    stage's blend weight (1.0 -> reference feature exactly).
    """

    def __init__(self, bus: int, cascade: PredictorCascade, rng):
        super().__init__()
        self.bus = bus
        self.cascade = cascade  # shared object, registered for param flow
        self.gates = ModuleList([TemporalGate(bus, rng) for _ in range(3)])

    def forward(self, f_pho_frames: Tensor, refs: dict, rng=None,
                gate_override=None):
        if f_pho_frames.data.ndim != 2 or f_pho_frames.data.shape[1] != self.bus:
            raise ShapeError("RhythmTranslator", "features",
                             ("m", self.bus), tuple(f_pho_frames.data.shape))
        m = f_pho_frames.data.shape[0]
        for key in ("f_d_frames", "f_pitch", "f_e"):
            if refs[key].data.shape[0] != m:
                raise ShapeError("RhythmTranslator", f"{key} frames", m,
                                 refs[key].data.shape[0])
        trunks = (self.cascade.duration.trunk, self.cascade.pitch.trunk,
                  self.cascade.energy.trunk)
        references = (refs["f_d_frames"], refs["f_pitch"], refs["f_e"])
        stream = f_pho_frames
        stages = []
        for i, (trunk, f_ref) in enumerate(zip(trunks, references)):
            f_gesture = trunk.forward(stream, rng)
            if gate_override is None:
                w = self.gates[i](f_ref, f_gesture)
            else:
                w = Tensor(np.full((m, 1), float(gate_override[i])))
            blended = add(mul(w, f_ref), mul(add(mul(w, -1.0), 1.0),
                                             f_gesture))
            stages.append(blended)
            stream = blended
        return concat(stages, axis=1)
