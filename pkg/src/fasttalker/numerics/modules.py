"""Parameterized building blocks on top of the autodiff core.

Weights initialize from uniform(-k, k) with k = 1/sqrt(fan_in), drawn from the
generator passed in by the caller, so construction order plus the master seed
fully determines every parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from . import tensor as T
from .tensor import Tensor


@dataclass(frozen=True)
class ConvSpec:
    """Static description of a grouped/dilated conv layer."""

    in_channels: int
    out_channels: int
    kernel: int
    groups: int = 1
    dilation: int = 1

    def __post_init__(self):
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise ShapeError("ConvSpec", "kernel", "positive odd", self.kernel)
        if self.in_channels % self.groups or self.out_channels % self.groups:
            raise ShapeError(
                "ConvSpec", "groups",
                f"divides {self.in_channels} and {self.out_channels}", self.groups)
        if self.dilation < 1:
            raise ShapeError("ConvSpec", "dilation", ">= 1", self.dilation)

    @property
    def param_count(self) -> int:
        return (self.out_channels * (self.in_channels // self.groups) * self.kernel
                + self.out_channels)


def _uniform(rng: np.random.Generator, shape, fan_in: int) -> Tensor:
    k = 1.0 / math.sqrt(max(1, fan_in))
    return Tensor(rng.uniform(-k, k, size=shape), requires_grad=True)


class Module:
    """Tracks parameters and submodules through attribute assignment."""

    def __init__(self):
        object.__setattr__(self, "_params", {})
        object.__setattr__(self, "_modules", {})
        object.__setattr__(self, "training", False)

    def __setattr__(self, name, value):
        if isinstance(value, Tensor) and value.requires_grad:
            self._params[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def named_parameters(self, prefix: str = "", _seen=None):
        if _seen is None:
            _seen = set()
        for name, p in self._params.items():
            if id(p) not in _seen:
                _seen.add(id(p))
                yield (f"{prefix}{name}", p)
        for name, mod in self._modules.items():
            yield from mod.named_parameters(f"{prefix}{name}.", _seen)

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def param_count(self) -> int:
        return sum(p.data.size for p in self.parameters())

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None

    def train(self, flag: bool = True):
        object.__setattr__(self, "training", flag)
        for mod in self._modules.values():
            mod.train(flag)
        return self


class ModuleList(Module):
    def __init__(self, mods=()):
        super().__init__()
        self._items = []
        for m in mods:
            self.append(m)

    def append(self, mod: Module):
        setattr(self, f"m{len(self._items)}", mod)
        self._items.append(mod)

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __getitem__(self, i):
        return self._items[i]


class Linear(Module):
    """y = x @ w + b, x (T, in) -> (T, out)."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.w = _uniform(rng, (in_features, out_features), in_features)
        self.b = _uniform(rng, (out_features,), in_features)

    def forward(self, x: Tensor) -> Tensor:
        return T.add(T.matmul(x, self.w), self.b)

    __call__ = forward


class Conv1d(Module):
    """Grouped/dilated conv over (T, C) features; transposes internally to the
    kernel layout (C, T). padding: 'causal' or 'same'."""

    def __init__(self, spec: ConvSpec, rng: np.random.Generator,
                 padding: str = "causal"):
        super().__init__()
        self.spec = spec
        self.padding = padding
        fan_in = (spec.in_channels // spec.groups) * spec.kernel
        self.w = _uniform(rng, (spec.out_channels, spec.in_channels // spec.groups,
                                spec.kernel), fan_in)
        self.b = _uniform(rng, (spec.out_channels,), fan_in)

    def forward(self, x: Tensor) -> Tensor:
        y = T.conv1d(T.transpose(x), self.w, self.b, groups=self.spec.groups,
                     dilation=self.spec.dilation, padding=self.padding)
        return T.transpose(y)

    __call__ = forward


class ConvTranspose1d(Module):
    """Strided upsampler over (C, T) -> (C_out, T*stride)."""

    def __init__(self, in_channels: int, out_channels: int, kernel: int,
                 stride: int, rng: np.random.Generator):
        super().__init__()
        self.stride = stride
        fan_in = in_channels * kernel
        self.w = _uniform(rng, (in_channels, out_channels, kernel), fan_in)
        self.b = _uniform(rng, (out_channels,), fan_in)

    def forward(self, x: Tensor) -> Tensor:
        return T.conv_transpose1d(x, self.w, self.b, stride=self.stride)

    __call__ = forward


class LayerNorm(Module):
    def __init__(self, dim: int):
        super().__init__()
        self.gamma = Tensor(np.ones(dim), requires_grad=True)
        self.beta = Tensor(np.zeros(dim), requires_grad=True)

    def forward(self, x: Tensor) -> Tensor:
        return T.layer_norm(x, self.gamma, self.beta)

    __call__ = forward


class Embedding(Module):
    def __init__(self, vocab: int, dim: int, rng: np.random.Generator):
        super().__init__()
        self.table = _uniform(rng, (vocab, dim), dim)

    def forward(self, ids) -> Tensor:
        return T.embedding(self.table, ids)

    __call__ = forward


class Dropout(Module):
    """Inverted dropout; identity unless a generator is supplied."""

    def __init__(self, rate: float):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ShapeError("Dropout", "rate", "[0, 1)", rate)
        self.rate = rate

    def forward(self, x: Tensor, rng: np.random.Generator | None = None) -> Tensor:
        if rng is None or self.rate == 0.0:
            return x
        keep = 1.0 - self.rate
        mask = (rng.random(x.data.shape) < keep) / keep
        return T.mul(x, Tensor(mask))

    __call__ = forward


class CausalSelfAttention(Module):
    """Multi-head causal self-attention on (T, D). Position t never sees t+1..;
    masked weights are exactly zero, so the prefix property is bitwise."""

    def __init__(self, dim: int, heads: int, rng: np.random.Generator):
        super().__init__()
        if dim % heads != 0:
            raise ShapeError("CausalSelfAttention", "dim", f"divisible by {heads}", dim)
        self.dim = dim
        self.heads = heads
        self.head_dim = dim // heads
        self.wq = Linear(dim, dim, rng)
        self.wk = Linear(dim, dim, rng)
        self.wv = Linear(dim, dim, rng)
        self.wo = Linear(dim, dim, rng)

    def _heads(self, x: Tensor):
        q, k, v = self.wq(x), self.wk(x), self.wv(x)
        scale = 1.0 / math.sqrt(self.head_dim)
        outs = []
        weights = []
        for h in range(self.heads):
            sl = (slice(None), slice(h * self.head_dim, (h + 1) * self.head_dim))
            qh, kh, vh = q[sl], k[sl], v[sl]
            att = T.causal_softmax(T.mul(T.matmul(qh, T.transpose(kh)), scale))
            weights.append(att)
            outs.append(T.matmul(att, vh))
        return outs, weights

    def forward(self, x: Tensor) -> Tensor:
        outs, _ = self._heads(x)
        return self.wo(T.concat(outs, axis=1))

    __call__ = forward

    def attention_weights(self, x: Tensor) -> list[np.ndarray]:
        """Per-head (T, T) attention matrices (forward-only, for inspection)."""
        _, weights = self._heads(x)
        return [w.data.copy() for w in weights]


class LSTMCell(Module):
    """Single-step LSTM. Gate order (i, f, g, o); x (B, in), h/c (B, H)."""

    def __init__(self, input_size: int, hidden: int, rng: np.random.Generator):
        super().__init__()
        self.input_size = input_size
        self.hidden = hidden
        self.w_x = _uniform(rng, (input_size, 4 * hidden), hidden)
        self.w_h = _uniform(rng, (hidden, 4 * hidden), hidden)
        self.b = _uniform(rng, (4 * hidden,), hidden)

    def step(self, x: Tensor, h: Tensor, c: Tensor):
        gates = T.add(T.add(T.matmul(x, self.w_x), T.matmul(h, self.w_h)), self.b)
        hd = self.hidden
        i = T.sigmoid(gates[:, 0 * hd:1 * hd])
        f = T.sigmoid(gates[:, 1 * hd:2 * hd])
        g = T.tanh(gates[:, 2 * hd:3 * hd])
        o = T.sigmoid(gates[:, 3 * hd:4 * hd])
        c_new = T.add(T.mul(f, c), T.mul(i, g))
        h_new = T.mul(o, T.tanh(c_new))
        return h_new, c_new

    __call__ = step


def lstm_step(x, h, c, w_x, w_h, b, hidden: int):
    """Functional LSTM step with explicit parameter tensors."""
    cell = LSTMCell.__new__(LSTMCell)
    Module.__init__(cell)
    object.__setattr__(cell, "hidden", hidden)
    cell.w_x, cell.w_h, cell.b = w_x, w_h, b
    return cell.step(x, h, c)


def sinusoidal_positions(length: int, dim: int) -> np.ndarray:
    """Fixed sin/cos position table (length, dim)."""
    pos = np.arange(length)[:, None]
    idx = np.arange(dim)[None, :]
    angle = pos / np.power(10000.0, (2 * (idx // 2)) / dim)
    table = np.where(idx % 2 == 0, np.sin(angle), np.cos(angle))
    return table
