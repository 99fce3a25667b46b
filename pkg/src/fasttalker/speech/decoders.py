"""Frame-rate mel decoder and sample-rate waveform decoder."""

from ..dsp import HOP_LENGTH, N_MELS
from ..errors import ShapeError
from ..nas.space import ModuleChoice
from ..numerics import Conv1d, ConvSpec, ConvTranspose1d, LayerNorm, Linear, \
    Module, ModuleList, Tensor, add, mul, relu, reshape, sigmoid, tanh, \
    transpose

MEL_HIDDEN = 128
UPSAMPLE_STRIDES = (4, 5, 8)  # product == HOP_LENGTH
DILATION_CYCLE = (1, 2, 4, 8)


class MelDecoder(Module):
    """Rhythm features (m, in_dim) -> mel frames (80, m). Fixed shape."""

    def __init__(self, in_dim: int, rng, n_mels: int = N_MELS):
        super().__init__()
        self.in_proj = Linear(in_dim, MEL_HIDDEN, rng)
        spec = ConvSpec(MEL_HIDDEN, MEL_HIDDEN, kernel=5, groups=1)
        self.conv_a = Conv1d(spec, rng, padding="causal")
        self.norm_a = LayerNorm(MEL_HIDDEN)
        self.conv_b = Conv1d(spec, rng, padding="causal")
        self.norm_b = LayerNorm(MEL_HIDDEN)
        self.out_proj = Linear(MEL_HIDDEN, n_mels, rng)

    def forward(self, f_r: Tensor) -> Tensor:
        h = self.in_proj(f_r)
        h = self.norm_a(relu(self.conv_a(h)))
        h = self.norm_b(relu(self.conv_b(h)))
        return transpose(self.out_proj(h))

    __call__ = forward


class GatedBlock(Module):
    """Dilated gated conv with residual: tanh(f) * sigmoid(g) -> 1x1 conv."""

    def __init__(self, choice: ModuleChoice, dilation: int, rng):
        super().__init__()
        c, g, k = choice.channels, choice.groups, choice.kernel
        spec = ConvSpec(c, c, kernel=k, groups=g, dilation=dilation)
        self.conv_f = Conv1d(spec, rng, padding="causal")
        self.conv_g = Conv1d(spec, rng, padding="causal")
        self.conv_out = Conv1d(ConvSpec(c, c, kernel=1, groups=1), rng)

    def forward(self, x: Tensor) -> Tensor:
        h = mul(tanh(self.conv_f(x)), sigmoid(self.conv_g(x)))
        return add(x, self.conv_out(h))

    __call__ = forward


class WaveformDecoder(Module):
    """Rhythm features (m, in_dim) -> waveform (m * 160,), causal end to end.

    A dilated gated-conv stack at frame rate (layers=0 leaves just the input
    projection) feeds a fixed transposed-conv upsampler with strides 4,5,8.
    """

    def __init__(self, in_dim: int, choice: ModuleChoice, rng):
        super().__init__()
        c = choice.channels
        self.in_proj = Linear(in_dim, c, rng)
        self.blocks = ModuleList([
            GatedBlock(choice, DILATION_CYCLE[i % len(DILATION_CYCLE)], rng)
            for i in range(choice.layers)])
        self.ups = ModuleList([
            ConvTranspose1d(c, c, kernel=2 * s, stride=s, rng=rng)
            for s in UPSAMPLE_STRIDES])
        self.out_conv = Conv1d(ConvSpec(c, 1, kernel=1, groups=1), rng)

    def forward(self, f_r: Tensor) -> Tensor:
        h = self.in_proj(f_r)
        for block in self.blocks:
            h = block(h)
        y = transpose(h)  # (C, m) for the samplewise stack
        for up in self.ups:
            y = relu(up(y))
        y = tanh(self.out_conv(transpose(y)))  # (T, 1)
        samples = y.data.shape[0]
        if samples != f_r.data.shape[0] * HOP_LENGTH:
            raise ShapeError("WaveformDecoder", "samples",
                             f_r.data.shape[0] * HOP_LENGTH, samples)
        return reshape(y, (samples,))

    __call__ = forward
