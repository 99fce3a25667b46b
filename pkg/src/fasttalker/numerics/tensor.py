"""Reverse-mode autodiff over numpy float64 arrays.

A Tensor wraps an ndarray plus an optional backward closure. Ops build the
graph eagerly; Tensor.backward() on a scalar toposorts it and pushes vector-
Jacobian products to the leaves. Gradients land only on requires_grad leaves
and accumulate across repeated backward() calls until cleared.

Everything is float64. Integer payloads (token ids, durations, codebook
indices) stay plain numpy arrays and enter ops as constants.
"""

from __future__ import annotations

import numpy as np

from ..errors import GraphError, NumericsError, ShapeError
from . import kernels

_CHECK_FINITE = False


class finite_checks:
    """Context manager: validate every op output is finite (debug aid)."""

    def __enter__(self):
        global _CHECK_FINITE
        self._prev = _CHECK_FINITE
        _CHECK_FINITE = True
        return self

    def __exit__(self, *exc):
        global _CHECK_FINITE
        _CHECK_FINITE = self._prev
        return False


def _finite(name: str, arr: np.ndarray) -> np.ndarray:
    if _CHECK_FINITE and not np.all(np.isfinite(arr)):
        raise NumericsError(f"{name}: non-finite output")
    return arr


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None

    # -------- graph plumbing --------

    @staticmethod
    def _result(data, parents, backward, name: str) -> "Tensor":
        out = Tensor.__new__(Tensor)
        out.data = _finite(name, np.asarray(data, dtype=np.float64))
        out.grad = None
        live = tuple(p for p in parents if p.requires_grad)
        if live:
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        else:
            out.requires_grad = False
            out._parents = ()
            out._backward = None
        return out

    def backward(self) -> None:
        if self.data.size != 1:
            raise GraphError(f"backward: expected a scalar, got shape {self.data.shape}")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))

        acc: dict[int, np.ndarray] = {id(self): np.ones_like(self.data)}

        def push(parent: "Tensor", contrib: np.ndarray) -> None:
            if parent._backward is None and not parent.requires_grad:
                return
            key = id(parent)
            prev = acc.get(key)
            acc[key] = contrib if prev is None else prev + contrib

        for node in reversed(topo):
            g = acc.pop(id(node), None)
            if g is None:
                continue
            if node._backward is not None:
                node._backward(g, push)
            elif node.requires_grad:
                node.grad = np.array(g) if node.grad is None else node.grad + g

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    # -------- conveniences --------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        flag = ", grad" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(as_tensor(other), -1.0))

    def __rsub__(self, other):
        return add(as_tensor(other), mul(self, -1.0))

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(as_tensor(other), self)

    def __pow__(self, p):
        return power(self, p)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return getitem(self, key)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) > 1 else shape[0])

    @property
    def T(self):
        return transpose(self)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Reduce `grad` to `shape` by summing the axes numpy broadcast."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# ---- arithmetic ----


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out_data = a.data + b.data

    def backward(g, push):
        push(a, _unbroadcast(g, a.data.shape))
        push(b, _unbroadcast(g, b.data.shape))

    return Tensor._result(out_data, (a, b), backward, "add")


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out_data = a.data * b.data

    def backward(g, push):
        push(a, _unbroadcast(g * b.data, a.data.shape))
        push(b, _unbroadcast(g * a.data, b.data.shape))

    return Tensor._result(out_data, (a, b), backward, "mul")


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out_data = a.data / b.data

    def backward(g, push):
        push(a, _unbroadcast(g / b.data, a.data.shape))
        push(b, _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape))

    return Tensor._result(out_data, (a, b), backward, "div")


def power(a, p: float) -> Tensor:
    a = as_tensor(a)
    p = float(p)
    out_data = a.data ** p

    def backward(g, push):
        base = a.data
        if p < 1.0:
            # subgradient 0 at the origin so sqrt-style norms stay finite
            safe = np.where(base == 0.0, 1.0, base)
            local = np.where(base == 0.0, 0.0, p * safe ** (p - 1.0))
        else:
            local = p * base ** (p - 1.0)
        push(a, g * local)

    return Tensor._result(out_data, (a,), backward, "power")


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError("matmul", "ndim", 2, (a.data.ndim, b.data.ndim))
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError("matmul", "inner", a.data.shape[1], b.data.shape[0])
    out_data = a.data @ b.data

    def backward(g, push):
        push(a, g @ b.data.T)
        push(b, a.data.T @ g)

    return Tensor._result(out_data, (a, b), backward, "matmul")


def transpose(a) -> Tensor:
    a = as_tensor(a)
    if a.data.ndim != 2:
        raise ShapeError("transpose", "ndim", 2, a.data.ndim)

    def backward(g, push):
        push(a, g.T)

    return Tensor._result(a.data.T, (a,), backward, "transpose")


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    out_data = a.data.reshape(shape)

    def backward(g, push):
        push(a, g.reshape(a.data.shape))

    return Tensor._result(out_data, (a,), backward, "reshape")


def getitem(a, key) -> Tensor:
    a = as_tensor(a)
    out_data = a.data[key]

    def backward(g, push):
        dx = np.zeros_like(a.data)
        np.add.at(dx, key, g)
        push(a, dx)

    return Tensor._result(out_data, (a,), backward, "getitem")


def concat(tensors, axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    out_data = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.data.shape[axis] for p in parts]
    offsets = np.cumsum([0] + sizes)

    def backward(g, push):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            idx = [slice(None)] * g.ndim
            idx[axis] = slice(int(lo), int(hi))
            push(p, g[tuple(idx)])

    return Tensor._result(out_data, tuple(parts), backward, "concat")


def sum_(a, axis=None, keepdims=False) -> Tensor:
    a = as_tensor(a)
    out_data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g, push):
        gg = np.asarray(g)
        if axis is not None and not keepdims:
            gg = np.expand_dims(gg, axis)
        push(a, np.broadcast_to(gg, a.data.shape).copy())

    return Tensor._result(out_data, (a,), backward, "sum")


def mean(a, axis=None, keepdims=False) -> Tensor:
    a = as_tensor(a)
    count = a.data.size if axis is None else np.prod(
        [a.data.shape[ax] for ax in (axis if isinstance(axis, tuple) else (axis,))])
    return mul(sum_(a, axis=axis, keepdims=keepdims), 1.0 / float(count))


# ---- pointwise nonlinearities ----


def relu(a) -> Tensor:
    a = as_tensor(a)
    out_data = np.maximum(a.data, 0.0)

    def backward(g, push):
        push(a, g * (a.data > 0.0))

    return Tensor._result(out_data, (a,), backward, "relu")


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out_data = np.tanh(a.data)

    def backward(g, push):
        push(a, g * (1.0 - out_data * out_data))

    return Tensor._result(out_data, (a,), backward, "tanh")


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    out_data = 1.0 / (1.0 + np.exp(-np.abs(a.data)))
    out_data = np.where(a.data >= 0.0, out_data, 1.0 - out_data)

    def backward(g, push):
        push(a, g * out_data * (1.0 - out_data))

    return Tensor._result(out_data, (a,), backward, "sigmoid")


def exp(a) -> Tensor:
    a = as_tensor(a)
    out_data = np.exp(a.data)

    def backward(g, push):
        push(a, g * out_data)

    return Tensor._result(out_data, (a,), backward, "exp")


def log(a) -> Tensor:
    a = as_tensor(a)
    out_data = np.log(a.data)

    def backward(g, push):
        push(a, g / a.data)

    return Tensor._result(out_data, (a,), backward, "log")


def absval(a) -> Tensor:
    a = as_tensor(a)
    out_data = np.abs(a.data)

    def backward(g, push):
        push(a, g * np.sign(a.data))

    return Tensor._result(out_data, (a,), backward, "abs")


# ---- structured ops ----


def masked_softmax(scores, mask: np.ndarray) -> Tensor:
    """Softmax over the last axis restricted to mask==True; masked-out entries
    are exactly 0 in the output, so they contribute nothing downstream."""
    scores = as_tensor(scores)
    m = np.broadcast_to(np.asarray(mask, dtype=bool), scores.data.shape)
    if not m.any(axis=-1).all():
        raise NumericsError("masked_softmax: a row has no allowed entries")
    neg = np.where(m, scores.data, -np.inf)
    top = neg.max(axis=-1, keepdims=True)
    e = np.where(m, np.exp(scores.data - top), 0.0)
    out_data = e / e.sum(axis=-1, keepdims=True)

    def backward(g, push):
        dot = (g * out_data).sum(axis=-1, keepdims=True)
        push(scores, out_data * (g - dot))

    return Tensor._result(out_data, (scores,), backward, "masked_softmax")


def causal_softmax(scores) -> Tensor:
    """Row t attends to columns 0..t. scores: (T, T)."""
    scores = as_tensor(scores)
    t = scores.data.shape[-1]
    return masked_softmax(scores, np.tril(np.ones((t, t), dtype=bool)))


def layer_norm(x, gamma, beta, eps: float = 1e-5) -> Tensor:
    x, gamma, beta = as_tensor(x), as_tensor(gamma), as_tensor(beta)
    d = x.data.shape[-1]
    if gamma.data.shape != (d,) or beta.data.shape != (d,):
        raise ShapeError("layer_norm", "features", d, (gamma.data.shape, beta.data.shape))
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    out_data = xhat * gamma.data + beta.data

    def backward(g, push):
        lead = tuple(range(g.ndim - 1))
        push(gamma, (g * xhat).sum(axis=lead))
        push(beta, g.sum(axis=lead))
        gx = g * gamma.data
        push(x, inv * (gx - gx.mean(axis=-1, keepdims=True)
                       - xhat * (gx * xhat).mean(axis=-1, keepdims=True)))

    return Tensor._result(out_data, (x, gamma, beta), backward, "layer_norm")


def embedding(table, ids) -> Tensor:
    table = as_tensor(table)
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= table.data.shape[0]):
        raise ShapeError("embedding", "id", f"< {table.data.shape[0]}",
                         int(ids.max(initial=0)))
    out_data = table.data[ids]

    def backward(g, push):
        dt = np.zeros_like(table.data)
        np.add.at(dt, ids, g)
        push(table, dt)

    return Tensor._result(out_data, (table,), backward, "embedding")


def repeat_rows(x, counts) -> Tensor:
    """Row i is repeated counts[i] times; the length-regulation primitive."""
    x = as_tensor(x)
    counts = np.asarray(counts, dtype=np.int64)
    if counts.ndim != 1 or counts.shape[0] != x.data.shape[0]:
        raise ShapeError("repeat_rows", "rows", x.data.shape[0], counts.shape)
    if counts.size == 0:
        raise NumericsError("repeat_rows: empty input")
    if counts.min() < 1:
        raise NumericsError(f"repeat_rows: counts must be >= 1, got {counts.min()}")
    out_data = np.repeat(x.data, counts, axis=0)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))

    def backward(g, push):
        push(x, np.add.reduceat(g, starts, axis=0))

    return Tensor._result(out_data, (x,), backward, "repeat_rows")


def gather_rows(x, idx) -> Tensor:
    x = as_tensor(x)
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= x.data.shape[0]):
        raise ShapeError("gather_rows", "row", f"< {x.data.shape[0]}", int(idx.max()))
    out_data = x.data[idx]

    def backward(g, push):
        dx = np.zeros_like(x.data)
        np.add.at(dx, idx, g)
        push(x, dx)

    return Tensor._result(out_data, (x,), backward, "gather_rows")


def take_flat(x, idx) -> Tensor:
    """Gather from a 1-D tensor with an arbitrarily shaped index array."""
    x = as_tensor(x)
    if x.data.ndim != 1:
        raise ShapeError("take_flat", "ndim", 1, x.data.ndim)
    idx = np.asarray(idx, dtype=np.int64)
    out_data = x.data[idx]

    def backward(g, push):
        dx = np.zeros_like(x.data)
        np.add.at(dx, idx, g)
        push(x, dx)

    return Tensor._result(out_data, (x,), backward, "take_flat")


def pad1d(x, left: int, right: int) -> Tensor:
    x = as_tensor(x)
    if x.data.ndim != 1:
        raise ShapeError("pad1d", "ndim", 1, x.data.ndim)
    out_data = np.pad(x.data, (left, right))
    n = x.data.shape[0]

    def backward(g, push):
        push(x, g[left:left + n])

    return Tensor._result(out_data, (x,), backward, "pad1d")


def cross_entropy(logits, targets) -> Tensor:
    """Mean negative log-likelihood over rows. logits (T, K), targets int (T,)."""
    logits = as_tensor(logits)
    targets = np.asarray(targets, dtype=np.int64)
    t, k = logits.data.shape
    if targets.shape != (t,):
        raise ShapeError("cross_entropy", "targets", (t,), targets.shape)
    if targets.size and (targets.min() < 0 or targets.max() >= k):
        raise ShapeError("cross_entropy", "class", f"< {k}", int(targets.max()))
    top = logits.data.max(axis=1, keepdims=True)
    lse = top + np.log(np.exp(logits.data - top).sum(axis=1, keepdims=True))
    nll = lse[:, 0] - logits.data[np.arange(t), targets]
    out_data = nll.mean()

    def backward(g, push):
        probs = np.exp(logits.data - lse)
        probs[np.arange(t), targets] -= 1.0
        push(logits, probs * (float(g) / t))

    return Tensor._result(out_data, (logits,), backward, "cross_entropy")


def rfft_magnitude(frames) -> Tensor:
    """Magnitude spectrum per row: frames (F, N) -> (F, N//2+1). N must be even."""
    frames = as_tensor(frames)
    n = frames.data.shape[-1]
    if n % 2 != 0:
        raise ShapeError("rfft_magnitude", "frame_length", "even", n)
    spec = np.fft.rfft(frames.data, axis=-1)
    mag = np.abs(spec)
    out_data = mag

    def backward(g, push):
        safe = np.where(mag == 0.0, 1.0, mag)
        c = (g / safe) * spec
        c[mag == 0.0] = 0.0
        c[..., 1:n // 2] *= 0.5
        c[..., 0] = c[..., 0].real
        c[..., n // 2] = c[..., n // 2].real
        push(frames, n * np.fft.irfft(c, n=n, axis=-1))

    return Tensor._result(out_data, (frames,), backward, "rfft_magnitude")


def conv1d(x, w, b=None, *, groups: int = 1, dilation: int = 1,
           padding: str = "causal") -> Tensor:
    """x (C_in, T) -> (C_out, T). padding: 'causal' pads (K-1)*dilation on the
    left; 'same' splits it symmetrically (odd K only); 'valid' pads nothing."""
    x, w = as_tensor(x), as_tensor(w)
    if x.data.ndim != 2:
        raise ShapeError("conv1d", "input_ndim", 2, x.data.ndim)
    if w.data.ndim != 3:
        raise ShapeError("conv1d", "weight_ndim", 3, w.data.ndim)
    cin, t_in = x.data.shape
    cout, cin_g, k = w.data.shape
    if cin % groups != 0 or cout % groups != 0:
        raise ShapeError("conv1d", "groups", f"divides {cin} and {cout}", groups)
    if cin_g != cin // groups:
        raise ShapeError("conv1d", "in_channels_per_group", cin // groups, cin_g)
    halo = (k - 1) * dilation
    if padding == "causal":
        pl, pr = halo, 0
    elif padding == "same":
        if k % 2 == 0:
            raise ShapeError("conv1d", "kernel", "odd for 'same' padding", k)
        pl = pr = halo // 2
    elif padding == "valid":
        pl = pr = 0
    else:
        raise NumericsError(f"conv1d: unknown padding {padding!r}")
    xc = np.ascontiguousarray(x.data)
    wc = np.ascontiguousarray(w.data)
    y = kernels.conv1d_forward(xc, wc, groups, dilation, pl, pr)
    if b is not None:
        b = as_tensor(b)
        if b.data.shape != (cout,):
            raise ShapeError("conv1d", "bias", (cout,), b.data.shape)
        out_data = y + b.data[:, None]
        parents = (x, w, b)
    else:
        out_data = y
        parents = (x, w)

    def backward(g, push):
        gc = np.ascontiguousarray(g)
        push(x, kernels.conv1d_grad_input(gc, wc, groups, dilation, pl, t_in))
        push(w, kernels.conv1d_grad_weight(gc, xc, wc.shape, groups, dilation, pl, pr))
        if b is not None:
            push(b, g.sum(axis=1))

    return Tensor._result(out_data, parents, backward, "conv1d")


def conv_transpose1d(x, w, b=None, *, stride: int = 1) -> Tensor:
    """x (C_in, T), w (C_in, C_out, K) -> (C_out, T*stride). Output sample t
    depends only on inputs s with s*stride <= t."""
    x, w = as_tensor(x), as_tensor(w)
    if x.data.ndim != 2:
        raise ShapeError("conv_transpose1d", "input_ndim", 2, x.data.ndim)
    if w.data.ndim != 3:
        raise ShapeError("conv_transpose1d", "weight_ndim", 3, w.data.ndim)
    cin, t_in = x.data.shape
    if w.data.shape[0] != cin:
        raise ShapeError("conv_transpose1d", "in_channels", cin, w.data.shape[0])
    if stride < 1:
        raise ShapeError("conv_transpose1d", "stride", ">= 1", stride)
    cout = w.data.shape[1]
    xc = np.ascontiguousarray(x.data)
    wc = np.ascontiguousarray(w.data)
    y = kernels.conv_transpose1d_forward(xc, wc, stride)
    if b is not None:
        b = as_tensor(b)
        if b.data.shape != (cout,):
            raise ShapeError("conv_transpose1d", "bias", (cout,), b.data.shape)
        out_data = y + b.data[:, None]
        parents = (x, w, b)
    else:
        out_data = y
        parents = (x, w)

    def backward(g, push):
        gc = np.ascontiguousarray(g)
        push(x, kernels.conv_transpose1d_grad_input(gc, wc, stride))
        push(w, kernels.conv_transpose1d_grad_weight(gc, xc, wc.shape, stride))
        if b is not None:
            push(b, g.sum(axis=1))

    return Tensor._result(out_data, parents, backward, "conv_transpose1d")
