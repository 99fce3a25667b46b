"""Vectorized numpy conv kernels (fallback when the compiled module is absent).

Layout conventions shared with the compiled backend:
  conv1d:           x (C_in, T), w (C_out, C_in/groups, K) -> y (C_out, T_out)
  conv_transpose1d: x (C_in, T), w (C_in, C_out, K)        -> y (C_out, T*stride)

conv1d output length is T + pad_left + pad_right - (K-1)*dilation; callers pick
padding so T_out == T. The transposed conv is "causal": output sample t draws
only on inputs s with s*stride <= t, and the full output is cropped to exactly
T*stride samples.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _windows(xp: np.ndarray, k: int, dilation: int) -> np.ndarray:
    """xp (C, Tp) -> (C, T_out, K) dilated sliding windows."""
    span = (k - 1) * dilation + 1
    win = sliding_window_view(xp, span, axis=1)
    return win[:, :, ::dilation] if dilation > 1 else win


def conv1d_forward(x, w, groups, dilation, pad_left, pad_right):
    cin, _ = x.shape
    cout, cin_g, k = w.shape
    xp = np.pad(x, ((0, 0), (pad_left, pad_right)))
    win = _windows(xp, k, dilation)                       # (cin, t_out, k)
    t_out = win.shape[1]
    win = win.reshape(groups, cin_g, t_out, k)
    wg = w.reshape(groups, cout // groups, cin_g, k)
    y = np.einsum("gitk,goik->got", win, wg, optimize=True)
    return np.ascontiguousarray(y.reshape(cout, t_out))


def conv1d_grad_input(dy, w, groups, dilation, pad_left, t_in):
    cout, cin_g, k = w.shape
    cout_g = cout // groups
    cin = cin_g * groups
    # Swap in/out roles and flip taps; then the input gradient is itself a conv.
    wg = w.reshape(groups, cout_g, cin_g, k)
    w2 = wg.transpose(0, 2, 1, 3)[:, :, :, ::-1].reshape(cin, cout_g, k)
    halo = (k - 1) * dilation
    dy_z = np.pad(dy, ((0, 0), (halo, halo)))
    dxp = conv1d_forward(np.ascontiguousarray(dy_z), np.ascontiguousarray(w2),
                         groups, dilation, 0, 0)
    return np.ascontiguousarray(dxp[:, pad_left:pad_left + t_in])


def conv1d_grad_weight(dy, x, w_shape, groups, dilation, pad_left, pad_right):
    cout, cin_g, k = w_shape
    xp = np.pad(x, ((0, 0), (pad_left, pad_right)))
    win = _windows(xp, k, dilation)
    t_out = win.shape[1]
    win = win.reshape(groups, cin_g, t_out, k)
    dyg = dy.reshape(groups, cout // groups, t_out)
    dw = np.einsum("got,gitk->goik", dyg, win, optimize=True)
    return np.ascontiguousarray(dw.reshape(cout, cin_g, k))


def conv_transpose1d_forward(x, w, stride):
    cin, t = x.shape
    _, cout, k = w.shape
    t_out = t * stride
    y = np.zeros((cout, t_out))
    tmp = np.einsum("iok,it->okt", w, x, optimize=True)   # (cout, k, t)
    pos = np.arange(t) * stride
    for kk in range(k):
        cols = pos + kk
        n = int(np.searchsorted(cols, t_out))
        if n > 0:
            y[:, cols[:n]] += tmp[:, kk, :n]
    return y


def conv_transpose1d_grad_input(dy, w, stride):
    cin, cout, k = w.shape
    t_out = dy.shape[1]
    t = t_out // stride
    dx = np.zeros((cin, t))
    pos = np.arange(t) * stride
    for kk in range(k):
        cols = pos + kk
        n = int(np.searchsorted(cols, t_out))
        if n > 0:
            dx[:, :n] += w[:, :, kk] @ dy[:, cols[:n]]
    return dx


def conv_transpose1d_grad_weight(dy, x, w_shape, stride):
    cin, cout, k = w_shape
    t = x.shape[1]
    t_out = dy.shape[1]
    dw = np.zeros((cin, cout, k))
    pos = np.arange(t) * stride
    for kk in range(k):
        cols = pos + kk
        n = int(np.searchsorted(cols, t_out))
        if n > 0:
            dw[:, :, kk] = x[:, :n] @ dy[:, cols[:n]].T
    return dw
