"""Numerics core: autodiff tensors, conv kernels, layers, Adam, serialization."""

from . import kernels, serialize
from .modules import (Conv1d, ConvSpec, ConvTranspose1d, CausalSelfAttention,
                      Dropout, Embedding, LayerNorm, Linear, LSTMCell, Module,
                      ModuleList, lstm_step, sinusoidal_positions)
from .optim import Adam
from .tensor import (Tensor, absval, add, as_tensor, causal_softmax, concat,
                     conv1d, conv_transpose1d, cross_entropy, div, embedding,
                     exp, finite_checks, gather_rows, getitem, layer_norm, log,
                     masked_softmax, matmul, mean, mul, pad1d, power, relu,
                     repeat_rows, reshape, rfft_magnitude, sigmoid, sum_,
                     take_flat, tanh, transpose)

__all__ = [
    "kernels", "serialize", "Tensor", "Adam", "Module", "ModuleList",
    "Linear", "Conv1d", "ConvSpec", "ConvTranspose1d", "CausalSelfAttention",
    "Dropout", "Embedding", "LayerNorm", "LSTMCell", "lstm_step",
    "sinusoidal_positions", "finite_checks",
    "absval", "add", "as_tensor", "causal_softmax", "concat", "conv1d",
    "conv_transpose1d", "cross_entropy", "div", "embedding", "exp",
    "gather_rows", "getitem", "layer_norm", "log", "masked_softmax", "matmul",
    "mean", "mul", "pad1d", "power", "relu", "repeat_rows", "reshape",
    "rfft_magnitude", "sigmoid", "sum_", "take_flat", "tanh", "transpose",
]
