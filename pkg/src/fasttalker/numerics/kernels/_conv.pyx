# Compiled conv kernels. Same contracts as numpy_impl.py; plain C loops over
# float64 memoryviews. Build in place with: python setup.py build_ext --inplace

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv1d_forward(const double[:, ::1] x, const double[:, :, ::1] w,
                   Py_ssize_t groups, Py_ssize_t dilation,
                   Py_ssize_t pad_left, Py_ssize_t pad_right):
    cdef Py_ssize_t cin = x.shape[0], t_in = x.shape[1]
    cdef Py_ssize_t cout = w.shape[0], cin_g = w.shape[1], k = w.shape[2]
    cdef Py_ssize_t t_out = t_in + pad_left + pad_right - (k - 1) * dilation
    cdef Py_ssize_t cout_g = cout // groups
    out_arr = np.zeros((cout, t_out))
    cdef double[:, ::1] y = out_arr
    cdef Py_ssize_t g, o, i, kk, t, src
    cdef double acc, wv
    for g in range(groups):
        for o in range(g * cout_g, (g + 1) * cout_g):
            for t in range(t_out):
                acc = 0.0
                for i in range(cin_g):
                    for kk in range(k):
                        src = t + kk * dilation - pad_left
                        if 0 <= src < t_in:
                            acc += w[o, i, kk] * x[g * cin_g + i, src]
                y[o, t] = acc
    return out_arr


def conv1d_grad_input(const double[:, ::1] dy, const double[:, :, ::1] w,
                      Py_ssize_t groups, Py_ssize_t dilation,
                      Py_ssize_t pad_left, Py_ssize_t t_in):
    cdef Py_ssize_t cout = w.shape[0], cin_g = w.shape[1], k = w.shape[2]
    cdef Py_ssize_t t_out = dy.shape[1]
    cdef Py_ssize_t cout_g = cout // groups
    cdef Py_ssize_t cin = cin_g * groups
    out_arr = np.zeros((cin, t_in))
    cdef double[:, ::1] dx = out_arr
    cdef Py_ssize_t g, o, i, kk, s, t
    cdef double acc
    for g in range(groups):
        for i in range(cin_g):
            for s in range(t_in):
                acc = 0.0
                for o in range(g * cout_g, (g + 1) * cout_g):
                    for kk in range(k):
                        t = s + pad_left - kk * dilation
                        if 0 <= t < t_out:
                            acc += w[o, i, kk] * dy[o, t]
                dx[g * cin_g + i, s] = acc
    return out_arr


def conv1d_grad_weight(const double[:, ::1] dy, const double[:, ::1] x, w_shape,
                       Py_ssize_t groups, Py_ssize_t dilation,
                       Py_ssize_t pad_left, Py_ssize_t pad_right):
    cdef Py_ssize_t cout = w_shape[0], cin_g = w_shape[1], k = w_shape[2]
    cdef Py_ssize_t t_in = x.shape[1], t_out = dy.shape[1]
    cdef Py_ssize_t cout_g = cout // groups
    out_arr = np.zeros((cout, cin_g, k))
    cdef double[:, :, ::1] dw = out_arr
    cdef Py_ssize_t g, o, i, kk, t, src
    cdef double acc
    for g in range(groups):
        for o in range(g * cout_g, (g + 1) * cout_g):
            for i in range(cin_g):
                for kk in range(k):
                    acc = 0.0
                    for t in range(t_out):
                        src = t + kk * dilation - pad_left
                        if 0 <= src < t_in:
                            acc += dy[o, t] * x[g * cin_g + i, src]
                    dw[o, i, kk] = acc
    return out_arr


def conv_transpose1d_forward(const double[:, ::1] x, const double[:, :, ::1] w,
                             Py_ssize_t stride):
    cdef Py_ssize_t cin = x.shape[0], t_in = x.shape[1]
    cdef Py_ssize_t cout = w.shape[1], k = w.shape[2]
    cdef Py_ssize_t t_out = t_in * stride
    out_arr = np.zeros((cout, t_out))
    cdef double[:, ::1] y = out_arr
    cdef Py_ssize_t i, o, kk, s, dst
    cdef double xv
    for i in range(cin):
        for s in range(t_in):
            xv = x[i, s]
            for o in range(cout):
                for kk in range(k):
                    dst = s * stride + kk
                    if dst < t_out:
                        y[o, dst] += w[i, o, kk] * xv
    return out_arr


def conv_transpose1d_grad_input(const double[:, ::1] dy, const double[:, :, ::1] w,
                                Py_ssize_t stride):
    cdef Py_ssize_t cin = w.shape[0], cout = w.shape[1], k = w.shape[2]
    cdef Py_ssize_t t_out = dy.shape[1]
    cdef Py_ssize_t t_in = t_out // stride
    out_arr = np.zeros((cin, t_in))
    cdef double[:, ::1] dx = out_arr
    cdef Py_ssize_t i, o, kk, s, dst
    cdef double acc
    for i in range(cin):
        for s in range(t_in):
            acc = 0.0
            for o in range(cout):
                for kk in range(k):
                    dst = s * stride + kk
                    if dst < t_out:
                        acc += w[i, o, kk] * dy[o, dst]
            dx[i, s] = acc
    return out_arr


def conv_transpose1d_grad_weight(const double[:, ::1] dy, const double[:, ::1] x, w_shape,
                                 Py_ssize_t stride):
    cdef Py_ssize_t cin = w_shape[0], cout = w_shape[1], k = w_shape[2]
    cdef Py_ssize_t t_in = x.shape[1], t_out = dy.shape[1]
    out_arr = np.zeros((cin, cout, k))
    cdef double[:, :, ::1] dw = out_arr
    cdef Py_ssize_t i, o, kk, s, dst
    cdef double acc
    for i in range(cin):
        for o in range(cout):
            for kk in range(k):
                acc = 0.0
                for s in range(t_in):
                    dst = s * stride + kk
                    if dst < t_out:
                        acc += x[i, s] * dy[o, dst]
                dw[i, o, kk] = acc
    return out_arr
